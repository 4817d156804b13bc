// Slow, obviously-correct reference computations used by the unit and
// acceptance tests. None of this is used by the library itself.
#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <set>
#include <span>
#include <stdexcept>
#include <vector>

#include "rwre/environment.hpp"
#include "rwre/lattice.hpp"
#include "rwre/walk.hpp"

namespace oracle {

using rwre::Site;

// Direct O(N^2) scan: n is a candidate iff every earlier height is strictly
// below h[n] and every later height is at least h[n].
inline std::vector<std::uint64_t> regeneration_candidates(std::span<const std::int64_t> h) {
    std::vector<std::uint64_t> out;
    for (std::size_t n = 1; n < h.size(); ++n) {
        bool ok = true;
        for (std::size_t k = 0; k < n && ok; ++k) ok = h[k] < h[n];
        for (std::size_t k = n + 1; k < h.size() && ok; ++k) ok = h[k] >= h[n];
        if (ok) out.push_back(n);
    }
    return out;
}

inline std::vector<std::int64_t> heights(const rwre::Trajectory& traj, const Site& dir) {
    std::vector<std::int64_t> h;
    for (const auto& x : traj.positions()) h.push_back(rwre::dot(x, dir));
    return h;
}

// P(X_n = x) by summing over all (2d)^n step sequences.
inline std::map<Site, double> enumerate_kernel(const rwre::Environment& env, const Site& start, int n) {
    std::map<Site, double> out;
    const int m = rwre::num_steps(env.dim());
    std::function<void(Site, int, double)> rec = [&](Site x, int left, double p) {
        if (left == 0) {
            out[x] += p;
            return;
        }
        const auto w = env.at(x);
        for (int s = 0; s < m; ++s) {
            Site y = x;
            rwre::apply_step(y, s);
            rec(y, left - 1, p * w[s]);
        }
    };
    rec(start, n, 1.0);
    return out;
}

// Exact E[I_n] for two independent walks that stop on leaving the l1 ball of
// radius n + slack or after `horizon` steps: sum over all pairs of truncated
// paths of p1 p2 |V1 cap V2 cap B_n|, where V includes the start.
inline double expected_intersections(const rwre::Environment& env, std::int64_t n, std::int64_t slack,
                                     int horizon) {
    struct Path {
        double p;
        std::set<Site> visited;
    };
    std::vector<Path> paths;
    const int m = rwre::num_steps(env.dim());
    std::function<void(Site, int, double, std::set<Site>)> rec = [&](Site x, int t, double p, std::set<Site> seen) {
        if (rwre::norm1(x) <= n) seen.insert(x);
        if (rwre::norm1(x) > n + slack || t == horizon) {
            paths.push_back({p, std::move(seen)});
            return;
        }
        const auto w = env.at(x);
        for (int s = 0; s < m; ++s) {
            if (w[s] == 0.0) continue;
            Site y = x;
            rwre::apply_step(y, s);
            rec(y, t + 1, p * w[s], seen);
        }
    };
    rec(Site{}, 0, 1.0, {});
    double total = 0.0;
    for (const auto& a : paths) {
        for (const auto& b : paths) {
            std::size_t common = 0;
            for (const auto& x : a.visited) common += b.visited.count(x);
            total += a.p * b.p * static_cast<double>(common);
        }
    }
    return total;
}

// P(first exit of the region is through the right face) from every interior
// site, by Gauss-Seidel on the harmonic equations. Exact to `tol`.
inline std::map<Site, double> right_exit_probability(const rwre::Environment& env, const rwre::Parallelogram& region,
                                                     double tol = 1e-13) {
    // Enumerate interior sites by flood fill from the center.
    std::vector<Site> sites;
    std::set<Site> seen{region.center};
    std::vector<Site> stack{region.center};
    while (!stack.empty()) {
        Site x = stack.back();
        stack.pop_back();
        sites.push_back(x);
        for (int s = 0; s < rwre::num_steps(region.dim); ++s) {
            Site y = x;
            rwre::apply_step(y, s);
            if (region.contains(y) && seen.insert(y).second) stack.push_back(y);
        }
    }
    std::map<Site, double> u;
    for (const auto& x : sites) u[x] = 0.0;
    for (int iter = 0; iter < 1'000'000; ++iter) {
        double change = 0.0;
        for (const auto& x : sites) {
            const auto w = env.at(x);
            double v = 0.0;
            for (int s = 0; s < rwre::num_steps(region.dim); ++s) {
                Site y = x;
                rwre::apply_step(y, s);
                if (region.contains(y)) {
                    v += w[s] * u[y];
                } else if (y[0] - region.center[0] >= region.length()) {
                    v += w[s];
                }
            }
            change = std::max(change, std::abs(v - u[x]));
            u[x] = v;
        }
        if (change < tol) return u;
    }
    throw std::runtime_error("right_exit_probability did not converge");
}

// Solves pi P = pi, sum pi = 1 for a small dense stochastic matrix by
// Gaussian elimination with partial pivoting.
inline std::vector<double> stationary_dense(const std::vector<std::vector<double>>& P) {
    const std::size_t n = P.size();
    // Rows: (P^T - I) with the last equation replaced by sum = 1.
    std::vector<std::vector<double>> A(n, std::vector<double>(n + 1, 0.0));
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) A[i][j] = P[j][i] - (i == j ? 1.0 : 0.0);
    }
    for (std::size_t j = 0; j < n; ++j) A[n - 1][j] = 1.0;
    A[n - 1][n] = 1.0;
    for (std::size_t c = 0; c < n; ++c) {
        std::size_t piv = c;
        for (std::size_t r = c + 1; r < n; ++r) {
            if (std::abs(A[r][c]) > std::abs(A[piv][c])) piv = r;
        }
        std::swap(A[c], A[piv]);
        for (std::size_t r = 0; r < n; ++r) {
            if (r == c) continue;
            const double f = A[r][c] / A[c][c];
            for (std::size_t k = c; k <= n; ++k) A[r][k] -= f * A[c][k];
        }
    }
    std::vector<double> pi(n);
    for (std::size_t i = 0; i < n; ++i) pi[i] = A[i][n] / A[i][i];
    return pi;
}

// Nearest-neighbour walk on Z with P(+1) = p, started at 0 and stopped at
// +-L: probability of reaching -L first (gambler's ruin).
inline double gamblers_ruin_backtrack(double p, std::int64_t L) {
    const double r = (1.0 - p) / p;
    if (std::abs(r - 1.0) < 1e-15) return 0.5;
    const double rl = std::pow(r, static_cast<double>(L));
    return rl / (1.0 + rl);
}

}  // namespace oracle
