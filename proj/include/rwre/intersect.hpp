#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "rwre/environment.hpp"
#include "rwre/stats.hpp"

namespace rwre {

// I_n for one pair of walks: sites of the l1 ball of radius n visited by
// both walks. Each walk runs until it first leaves the ball of radius
// n + slack, or until its horizon.
struct IntersectionSample {
    std::int64_t n = 0;
    std::size_t count = 0;
    std::uint64_t steps1 = 0;
    std::uint64_t steps2 = 0;
    bool censored = false;
};

// 2 R_5(n), rounded up.
std::int64_t default_slack(std::int64_t n);

// C (n + slack) with C = 20 / <v, e1>.
std::uint64_t default_intersection_horizon(std::int64_t n, double speed);

IntersectionSample count_intersections(const Environment& env, std::int64_t n, std::uint64_t walk_seed_1,
                                       std::uint64_t walk_seed_2, std::uint64_t horizon, std::int64_t slack);

struct QuenchedIntersections {
    std::int64_t n = 0;
    MeanEstimate estimate;
    std::vector<double> counts;
    double censor_rate = 0.0;
    bool high_censoring = false;  // more than 10% of pairs censored
};

QuenchedIntersections quenched_expected_intersections(const Environment& env, std::int64_t n, std::size_t pairs,
                                                      std::uint64_t master_seed, std::uint64_t horizon,
                                                      std::int64_t slack, int threads = 1);

struct IntersectionScaling {
    std::vector<std::int64_t> n_grid;
    // estimates[e][i]: environment e at n_grid[i].
    std::vector<std::vector<double>> estimates;
    std::vector<std::vector<double>> censor_rates;
    std::vector<double> median;
    std::vector<double> q90;
    LineFit median_fit;  // log median against log n
    LineFit q90_fit;
};

// horizon_factor C gives horizon C (n + slack) per walk.
IntersectionScaling intersection_scaling(const EnvironmentLaw& law, std::span<const std::int64_t> n_grid,
                                         std::size_t env_count, std::size_t pairs, std::uint64_t master_seed,
                                         double horizon_factor, int threads = 1);

}  // namespace rwre
