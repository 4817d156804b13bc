#include "rwre/torus.hpp"

#include <cmath>
#include <stdexcept>

namespace rwre {

std::size_t TorusChain::state_of(const Site& x) const noexcept {
    const Site r = reduce_mod(x, side, dim);
    std::size_t idx = 0;
    for (int i = 0; i < dim; ++i) idx = idx * static_cast<std::size_t>(side) + static_cast<std::size_t>(r[i]);
    return idx;
}

Site TorusChain::site_of(std::size_t state) const noexcept {
    Site x;
    for (int i = dim - 1; i >= 0; --i) {
        x[i] = static_cast<std::int64_t>(state % static_cast<std::size_t>(side));
        state /= static_cast<std::size_t>(side);
    }
    return x;
}

std::size_t TorusChain::neighbor(std::size_t state, int step) const noexcept {
    Site x = site_of(state);
    return state_of(apply_step(x, step));
}

std::vector<double> TorusChain::apply(const std::vector<double>& pi) const {
    std::vector<double> out(pi.size(), 0.0);
    for (std::size_t s = 0; s < rows.size(); ++s) {
        for (int e = 0; e < num_steps(dim); ++e) out[neighbor(s, e)] += pi[s] * rows[s][e];
    }
    return out;
}

namespace {

TorusChain build_chain(const Environment& env, std::int64_t side) {
    if (side < 2) throw std::invalid_argument("torus side must be >= 2");
    TorusChain chain;
    chain.side = side;
    chain.dim = env.dim();
    std::size_t states = 1;
    for (int i = 0; i < chain.dim; ++i) states *= static_cast<std::size_t>(side);
    const Environment periodic = env.periodized(side);
    chain.rows.resize(states);
    for (std::size_t s = 0; s < states; ++s) chain.rows[s] = periodic.at(chain.site_of(s));
    return chain;
}

double l1_distance(const std::vector<double>& a, const std::vector<double>& b) {
    double d = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) d += std::abs(a[i] - b[i]);
    return d;
}

}  // namespace

TorusChain torus_stationary(const Environment& env, std::int64_t side, PowerIterationOptions opts) {
    TorusChain chain = build_chain(env, side);
    const std::size_t n = chain.states();
    std::vector<double> pi(n, 1.0 / static_cast<double>(n));
    for (chain.iterations = 0; chain.iterations < opts.max_iterations; ++chain.iterations) {
        const auto next = chain.apply(pi);
        chain.residual = l1_distance(next, pi);
        if (chain.residual <= opts.tolerance) {
            chain.converged = true;
            break;
        }
        double total = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            pi[i] = 0.5 * (pi[i] + next[i]);
            total += pi[i];
        }
        for (double& p : pi) p /= total;
    }
    chain.residual = l1_distance(chain.apply(pi), pi);
    chain.stationary = pi;
    chain.density.resize(n);
    for (std::size_t i = 0; i < n; ++i) chain.density[i] = static_cast<double>(n) * pi[i];
    return chain;
}

std::vector<double> torus_f_sequence(const Environment& env, std::int64_t side, std::uint64_t n) {
    const TorusChain chain = build_chain(env, side);
    const std::size_t states = chain.states();
    std::vector<std::array<std::size_t, 2 * kMaxDim>> nbr(states);
    for (std::size_t s = 0; s < states; ++s)
        for (int e = 0; e < num_steps(chain.dim); ++e) nbr[s][static_cast<std::size_t>(e)] = chain.neighbor(s, e);

    std::vector<double> h(states, 0.0), next(states, 0.0);
    h[chain.state_of(Site{})] = 1.0;
    std::vector<double> out{1.0};
    out.reserve(n + 1);
    for (std::uint64_t k = 0; k < n; ++k) {
        double total = 0.0;
        for (std::size_t s = 0; s < states; ++s) {
            double v = 0.0;
            for (int e = 0; e < num_steps(chain.dim); ++e) v += chain.rows[s][e] * h[nbr[s][static_cast<std::size_t>(e)]];
            next[s] = v;
            total += v;
        }
        std::swap(h, next);
        out.push_back(total);
    }
    return out;
}

std::vector<TorusConsistency> torus_gap_curve(const Environment& env, std::int64_t side, std::uint64_t n_max,
                                              PowerIterationOptions opts) {
    const TorusChain chain = torus_stationary(env, side, opts);
    const double g0 = chain.density[chain.state_of(Site{})];
    const auto f = torus_f_sequence(env, side, n_max + 1);
    std::vector<TorusConsistency> out;
    for (std::uint64_t n = 1; n <= n_max; ++n) {
        TorusConsistency c;
        c.n = n;
        c.f_n = f[n];
        c.f_next = f[n + 1];
        c.g0 = g0;
        c.gap = std::abs(0.5 * (c.f_n + c.f_next) - g0);
        out.push_back(c);
    }
    return out;
}

TorusConsistency torus_fn_consistency(const Environment& env, std::int64_t side, std::uint64_t n,
                                      PowerIterationOptions opts) {
    if (n < 1) throw std::invalid_argument("torus_fn_consistency: n must be >= 1");
    return torus_gap_curve(env, side, n, opts).back();
}

}  // namespace rwre
