#pragma once

#include <cstdint>
#include <vector>

#include "rwre/environment.hpp"

namespace rwre {

// The walk on (Z / L Z)^d in an L-periodic environment. States are the
// sites of [0, L)^d in row-major order.
struct TorusChain {
    std::int64_t side = 0;
    int dim = 0;
    std::vector<SiteDistribution> rows;  // transition law out of each state
    std::vector<double> stationary;      // pi
    std::vector<double> density;         // L^d pi
    double residual = 0.0;               // |pi P - pi|_1
    std::uint64_t iterations = 0;
    bool converged = false;

    std::size_t states() const noexcept { return rows.size(); }
    std::size_t state_of(const Site& x) const noexcept;
    Site site_of(std::size_t state) const noexcept;
    std::size_t neighbor(std::size_t state, int step) const noexcept;
    // pi P as a vector.
    std::vector<double> apply(const std::vector<double>& pi) const;
};

struct PowerIterationOptions {
    double tolerance = 1e-12;
    std::uint64_t max_iterations = 1'000'000;
};

// Stationary law by power iteration on the lazy chain (I + P) / 2 from the
// uniform vector.
TorusChain torus_stationary(const Environment& env, std::int64_t side, PowerIterationOptions opts = {});

// f_0..f_n on the torus: sum over the fundamental domain of P^z(X_k = 0 mod L).
std::vector<double> torus_f_sequence(const Environment& env, std::int64_t side, std::uint64_t n);

struct TorusConsistency {
    std::uint64_t n = 0;
    double f_n = 0.0;
    double f_next = 0.0;
    double g0 = 0.0;
    double gap = 0.0;  // |(f_n + f_{n+1}) / 2 - g(0)|
};

TorusConsistency torus_fn_consistency(const Environment& env, std::int64_t side, std::uint64_t n,
                                      PowerIterationOptions opts = {});

// Gaps for every n in [1, n_max], sharing one chain and one backward pass.
std::vector<TorusConsistency> torus_gap_curve(const Environment& env, std::int64_t side, std::uint64_t n_max,
                                              PowerIterationOptions opts = {});

}  // namespace rwre
