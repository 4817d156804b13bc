#include "rwre/intersect.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <unordered_set>

#include "rwre/parallel.hpp"
#include "rwre/walk.hpp"

namespace rwre {

std::int64_t default_slack(std::int64_t n) {
    return static_cast<std::int64_t>(std::ceil(2.0 * r_seq(5, static_cast<double>(std::max<std::int64_t>(n, 1)))));
}

std::uint64_t default_intersection_horizon(std::int64_t n, double speed) {
    if (!(speed > 0.0)) throw std::invalid_argument("intersection horizon needs positive speed");
    return static_cast<std::uint64_t>(std::ceil(20.0 / speed * static_cast<double>(n + default_slack(n))));
}

namespace {

struct Visits {
    std::unordered_set<std::uint64_t> sites;
    StoppingReport report;
};

Visits visit_ball(const Environment& env, std::int64_t n, std::uint64_t seed, std::uint64_t horizon,
                  std::int64_t slack) {
    Visits v;
    v.sites.insert(pack_site(Site{}));
    SplitMix64 rng(seed);
    v.report = simulate_rule(env, Site{}, BallExit{n + slack}, horizon, rng, [&](const Site& x, std::uint64_t, int) {
        if (norm1(x) <= n) v.sites.insert(pack_site(x));
    });
    return v;
}

}  // namespace

IntersectionSample count_intersections(const Environment& env, std::int64_t n, std::uint64_t walk_seed_1,
                                       std::uint64_t walk_seed_2, std::uint64_t horizon, std::int64_t slack) {
    if (walk_seed_1 == walk_seed_2) throw std::invalid_argument("count_intersections: walk seeds must differ");
    if (n < 0 || slack < 0) throw std::invalid_argument("count_intersections: negative radius");
    const auto a = visit_ball(env, n, walk_seed_1, horizon, slack);
    const auto b = visit_ball(env, n, walk_seed_2, horizon, slack);
    const auto& small = a.sites.size() <= b.sites.size() ? a.sites : b.sites;
    const auto& large = a.sites.size() <= b.sites.size() ? b.sites : a.sites;
    IntersectionSample s;
    s.n = n;
    for (auto key : small) s.count += large.count(key);
    s.steps1 = a.report.time;
    s.steps2 = b.report.time;
    s.censored = a.report.censored() || b.report.censored();
    return s;
}

QuenchedIntersections quenched_expected_intersections(const Environment& env, std::int64_t n, std::size_t pairs,
                                                      std::uint64_t master_seed, std::uint64_t horizon,
                                                      std::int64_t slack, int threads) {
    if (pairs == 0) throw std::invalid_argument("quenched_expected_intersections: pairs must be >= 1");
    const std::uint64_t tag = hash_words({hash_tag("intersect"), env.seed(), static_cast<std::uint64_t>(n)});
    auto samples = parallel_map(pairs, threads, [&](std::size_t i) {
        return count_intersections(env, n, derive_seed(master_seed, tag, i, StreamRole::walk1),
                                   derive_seed(master_seed, tag, i, StreamRole::walk2), horizon, slack);
    });
    QuenchedIntersections q;
    q.n = n;
    std::size_t censored = 0;
    for (const auto& s : samples) {
        q.counts.push_back(static_cast<double>(s.count));
        censored += s.censored ? 1 : 0;
    }
    q.estimate = mean_estimate(q.counts);
    q.censor_rate = static_cast<double>(censored) / static_cast<double>(pairs);
    q.high_censoring = q.censor_rate > 0.1;
    return q;
}

IntersectionScaling intersection_scaling(const EnvironmentLaw& law, std::span<const std::int64_t> n_grid,
                                         std::size_t env_count, std::size_t pairs, std::uint64_t master_seed,
                                         double horizon_factor, int threads) {
    if (n_grid.size() < 4) throw std::invalid_argument("intersection_scaling: need >= 4 grid points");
    for (std::size_t i = 0; i < n_grid.size(); ++i) {
        if (n_grid[i] < 1) throw std::invalid_argument("intersection_scaling: radii must be positive");
        if (i >= 2) {
            const double r0 = static_cast<double>(n_grid[1]) / static_cast<double>(n_grid[0]);
            const double ri = static_cast<double>(n_grid[i]) / static_cast<double>(n_grid[i - 1]);
            if (std::abs(ri - r0) > 0.05 * r0) throw std::invalid_argument("intersection_scaling: grid not geometric");
        }
    }
    if (env_count == 0) throw std::invalid_argument("intersection_scaling: env_count must be >= 1");

    IntersectionScaling out;
    out.n_grid.assign(n_grid.begin(), n_grid.end());
    const std::uint64_t tag = hash_tag("intersect");
    // One task per (environment, radius); each task runs its pairs serially.
    const std::size_t tasks = env_count * n_grid.size();
    auto results = parallel_map(tasks, threads, [&](std::size_t t) {
        const std::size_t e = t / n_grid.size();
        const std::int64_t n = n_grid[t % n_grid.size()];
        const Environment env(law, derive_seed(master_seed, tag, e, StreamRole::env));
        const std::int64_t slack = default_slack(n);
        const auto horizon = static_cast<std::uint64_t>(std::ceil(horizon_factor * static_cast<double>(n + slack)));
        const auto q = quenched_expected_intersections(env, n, pairs, master_seed, horizon, slack, 1);
        return std::pair<double, double>{q.estimate.mean, q.censor_rate};
    });
    out.estimates.assign(env_count, std::vector<double>(n_grid.size()));
    out.censor_rates.assign(env_count, std::vector<double>(n_grid.size()));
    for (std::size_t t = 0; t < tasks; ++t) {
        out.estimates[t / n_grid.size()][t % n_grid.size()] = results[t].first;
        out.censor_rates[t / n_grid.size()][t % n_grid.size()] = results[t].second;
    }
    std::vector<double> logn, logmed, logq90;
    for (std::size_t i = 0; i < n_grid.size(); ++i) {
        std::vector<double> col;
        for (std::size_t e = 0; e < env_count; ++e) col.push_back(out.estimates[e][i]);
        out.median.push_back(quantile(col, 0.5));
        out.q90.push_back(quantile(col, 0.9));
        logn.push_back(std::log(static_cast<double>(n_grid[i])));
        logmed.push_back(std::log(out.median.back()));
        logq90.push_back(std::log(out.q90.back()));
    }
    out.median_fit = fit_line(logn, logmed);
    out.q90_fit = fit_line(logn, logq90);
    return out;
}

}  // namespace rwre
