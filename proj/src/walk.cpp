#include "rwre/walk.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "rwre/parallel.hpp"

namespace rwre {

Site Trajectory::end() const {
    Site x = start;
    for (auto s : steps) apply_step(x, s);
    return x;
}

std::vector<Site> Trajectory::positions() const {
    std::vector<Site> out;
    out.reserve(steps.size() + 1);
    Site x = start;
    out.push_back(x);
    for (auto s : steps) out.push_back(apply_step(x, s));
    return out;
}

double r_seq(int j, double N) {
    if (j < 1) throw std::invalid_argument("r_seq: j must be positive");
    if (!(N >= 1.0)) throw std::invalid_argument("r_seq: N must be >= 1");
    const double exponent = static_cast<double>(j + 2) / static_cast<double>(j + 3);
    return std::exp(std::pow(std::log(N), exponent));
}

double Parallelogram::width() const { return static_cast<double>(N) * r_seq(width_index, static_cast<double>(N)); }

Vec Parallelogram::transverse(const Site& x) const {
    const double along = static_cast<double>(x[0] - center[0]);
    Vec t{};
    for (int i = 1; i < dim; ++i) {
        t[static_cast<std::size_t>(i)] = static_cast<double>(x[i] - center[i]) -
                                         direction[static_cast<std::size_t>(i)] * along / direction[0];
    }
    return t;
}

double Parallelogram::transverse_offset(const Site& x) const {
    const Vec t = transverse(x);
    return std::max({std::abs(t[0]), std::abs(t[1]), std::abs(t[2])});
}

bool Parallelogram::contains(const Site& x) const {
    const std::int64_t along = x[0] - center[0];
    return (along < 0 ? -along : along) < length() && transverse_offset(x) < width();
}

bool Parallelogram::in_middle_third(const Site& x) const {
    const std::int64_t along = x[0] - center[0];
    return 3 * (along < 0 ? -along : along) < length() && transverse_offset(x) < width() / 3.0;
}

bool Parallelogram::on_right_boundary(const Site& x) const {
    return x[0] - center[0] == length() && transverse_offset(x) < width();
}

bool reaches_level(const Site& x, const Site& direction, std::int64_t level) noexcept {
    const std::int64_t s = dot(x, direction);
    const std::int64_t n2 = norm2_squared(direction);
    if (level <= 0) return s >= 0 || s * s <= level * level * n2;
    return s > 0 && s * s >= level * level * n2;
}

namespace {

struct NoOp {
    void operator()(const Site&, std::uint64_t, int) const noexcept {}
};

}  // namespace

std::pair<Trajectory, StoppingReport> run_quenched(const Environment& env, const Site& start, const StopRule& rule,
                                                   std::uint64_t horizon, std::uint64_t walk_seed) {
    Trajectory traj;
    traj.dim = env.dim();
    traj.start = start;
    traj.walk_seed = walk_seed;
    SplitMix64 rng(walk_seed);
    auto report = simulate_rule(env, start, rule, horizon, rng, [&](const Site&, std::uint64_t, int step) {
        traj.steps.push_back(static_cast<std::uint8_t>(step));
    });
    return {std::move(traj), report};
}

std::pair<Trajectory, StoppingReport> run_annealed(const EnvironmentLaw& law, const Site& start,
                                                   const StopRule& rule, std::uint64_t horizon,
                                                   std::uint64_t trial_index, std::uint64_t master_seed,
                                                   std::uint64_t experiment_tag) {
    const Environment env(law, derive_seed(master_seed, experiment_tag, trial_index, StreamRole::env));
    return run_quenched(env, start, rule, horizon,
                        derive_seed(master_seed, experiment_tag, trial_index, StreamRole::walk1));
}

BacktrackEstimate backtrack_probability(const EnvironmentLaw& law, const Site& direction, std::int64_t level,
                                        std::size_t trials, std::uint64_t horizon, std::uint64_t master_seed,
                                        int threads, std::uint64_t experiment_tag) {
    if (trials == 0) throw std::invalid_argument("backtrack_probability: trials must be >= 1");
    // Seeds depend on the level too, so different L values use disjoint streams.
    const std::uint64_t tag = hash_words({experiment_tag, static_cast<std::uint64_t>(level)});
    const Slab rule{direction, level};
    auto outcomes = parallel_map(trials, threads, [&](std::size_t i) -> int {
        const Environment env(law, derive_seed(master_seed, tag, i, StreamRole::env));
        SplitMix64 rng(derive_seed(master_seed, tag, i, StreamRole::walk1));
        const auto rep = simulate_rule(env, Site{}, rule, horizon, rng, NoOp{});
        if (rep.censored()) return 2;
        return rep.face == Face::negative ? 1 : 0;
    });
    BacktrackEstimate est;
    est.level = level;
    est.trials = trials;
    for (int o : outcomes) {
        if (o == 1) ++est.backtracks;
        if (o == 2) ++est.censored;
    }
    est.censored_as_failure = static_cast<double>(est.backtracks + est.censored) / static_cast<double>(trials);
    est.ci_failure = clopper_pearson(est.backtracks + est.censored, trials, 0.95);
    const std::size_t kept = trials - est.censored;
    if (kept > 0) {
        est.censored_dropped = static_cast<double>(est.backtracks) / static_cast<double>(kept);
        est.ci_dropped = clopper_pearson(est.backtracks, kept, 0.95);
    }
    est.horizon_too_small = 2 * est.censored > trials;
    return est;
}

std::uint64_t default_halfspace_horizon(std::int64_t level, double speed_along_direction) {
    if (!(speed_along_direction > 0.0)) throw std::invalid_argument("default horizon needs positive speed");
    const double h = 50.0 * static_cast<double>(level) / speed_along_direction;
    return std::max<std::uint64_t>(static_cast<std::uint64_t>(std::ceil(h)), static_cast<std::uint64_t>(level));
}

std::pair<double, double> VelocityEstimate::ci(int axis, double confidence) const {
    const auto a = static_cast<std::size_t>(axis);
    const double hw = normal_quantile(0.5 + confidence / 2.0) * se[a];
    return {mean[a] - hw, mean[a] + hw};
}

VelocityEstimate velocity_estimate(const EnvironmentLaw& law, std::uint64_t n, std::size_t trials,
                                   std::uint64_t master_seed, int threads, std::uint64_t experiment_tag) {
    if (n == 0) throw std::invalid_argument("velocity_estimate: n must be >= 1");
    VelocityEstimate est;
    est.n = n;
    const FixedSteps rule{n};
    auto endpoints = parallel_map(trials, threads, [&](std::size_t i) {
        const Environment env(law, derive_seed(master_seed, experiment_tag, i, StreamRole::env));
        SplitMix64 rng(derive_seed(master_seed, experiment_tag, i, StreamRole::walk1));
        return simulate_rule(env, Site{}, rule, n, rng, NoOp{}).position;
    });
    Vec dir{};
    for (const Site& x : endpoints) {
        Vec v{};
        for (int a = 0; a < law.dim; ++a) v[static_cast<std::size_t>(a)] = static_cast<double>(x[a]) / static_cast<double>(n);
        est.samples.push_back(v);
        const double len = norm2(x);
        if (len > 0.0) {
            for (int a = 0; a < law.dim; ++a) dir[static_cast<std::size_t>(a)] += static_cast<double>(x[a]) / len;
        }
    }
    for (int a = 0; a < law.dim; ++a) {
        std::vector<double> col;
        col.reserve(est.samples.size());
        for (const auto& v : est.samples) col.push_back(v[static_cast<std::size_t>(a)]);
        const auto m = mean_estimate(col);
        est.mean[static_cast<std::size_t>(a)] = m.mean;
        est.se[static_cast<std::size_t>(a)] = m.se;
    }
    const double dn = std::sqrt(dir[0] * dir[0] + dir[1] * dir[1] + dir[2] * dir[2]);
    if (dn > 0.0) {
        for (double& c : dir) c /= dn;
    }
    est.direction = dir;
    return est;
}

ExitClass classify_exit(const Parallelogram& region, const Trajectory& traj) {
    Site x = traj.start;
    for (auto s : traj.steps) {
        apply_step(x, s);
        if (!region.contains(x)) {
            return x[0] - region.center[0] >= region.length() ? ExitClass::right : ExitClass::other_boundary;
        }
    }
    return ExitClass::still_inside;
}

std::map<std::array<std::int64_t, kMaxDim>, double> ExitStatistics::normalized() const {
    std::size_t total = 0;
    for (const auto& [k, c] : histogram) total += c;
    std::map<std::array<std::int64_t, kMaxDim>, double> out;
    for (const auto& [k, c] : histogram) out[k] = static_cast<double>(c) / static_cast<double>(total);
    return out;
}

namespace {

ExitStatistics summarize_exits(std::vector<ExitSample> samples, const Parallelogram& region, double cell_size,
                               std::optional<double> time_anchor) {
    if (!(cell_size >= 1.0)) throw std::invalid_argument("exit_statistics: cell size must be >= 1");
    ExitStatistics st;
    st.trials = samples.size();
    st.cell_size = cell_size;
    std::vector<double> right_times;
    std::size_t finished = 0, non_right = 0;
    for (const auto& s : samples) {
        if (s.censored) {
            ++st.censored;
            continue;
        }
        ++finished;
        if (s.right) {
            right_times.push_back(static_cast<double>(s.time));
        } else {
            ++non_right;
        }
    }
    if (finished > 0) st.non_right_fraction = static_cast<double>(non_right) / static_cast<double>(finished);
    if (time_anchor) {
        st.time_anchor = *time_anchor;
    } else if (!right_times.empty()) {
        st.time_anchor = quantile(right_times, 0.5);
    }
    const double deviation = static_cast<double>(region.N) *
                             r_seq(region.width_index + 1, static_cast<double>(region.N));
    std::size_t deviating = 0;
    for (const auto& s : samples) {
        if (s.censored) continue;
        if (std::abs(static_cast<double>(s.time) - st.time_anchor) > deviation) ++deviating;
        if (!s.right) continue;
        const Vec t = region.transverse(s.position);
        std::array<std::int64_t, kMaxDim> key{};
        for (int i = 1; i < region.dim; ++i) {
            key[static_cast<std::size_t>(i - 1)] =
                static_cast<std::int64_t>(std::floor(t[static_cast<std::size_t>(i)] / cell_size));
        }
        key[static_cast<std::size_t>(region.dim - 1)] =
            static_cast<std::int64_t>(std::floor((static_cast<double>(s.time) - st.time_anchor) / cell_size));
        ++st.histogram[key];
    }
    if (finished > 0) st.deviation_fraction = static_cast<double>(deviating) / static_cast<double>(finished);
    st.samples = std::move(samples);
    return st;
}

ExitSample to_sample(const StoppingReport& rep) {
    ExitSample s;
    s.censored = rep.censored();
    s.right = rep.face == Face::right;
    s.time = rep.time;
    s.position = rep.position;
    return s;
}

}  // namespace

ExitStatistics exit_statistics(const Environment& env, const Parallelogram& region, const Site& start,
                               std::size_t trials, double cell_size, std::uint64_t horizon,
                               std::uint64_t master_seed, std::optional<double> time_anchor, int threads) {
    if (!region.contains(start)) throw std::invalid_argument("exit_statistics: start outside the parallelogram");
    const std::uint64_t tag = hash_tag("exit_stats");
    const ParallelogramExit rule{region};
    auto samples = parallel_map(trials, threads, [&](std::size_t i) {
        SplitMix64 rng(derive_seed(master_seed, tag, i, StreamRole::walk1));
        return to_sample(simulate_rule(env, start, rule, horizon, rng, NoOp{}));
    });
    return summarize_exits(std::move(samples), region, cell_size, time_anchor);
}

ExitStatistics exit_statistics_annealed(const EnvironmentLaw& law, const Parallelogram& region, const Site& start,
                                        std::size_t trials, double cell_size, std::uint64_t horizon,
                                        std::uint64_t master_seed, std::optional<double> time_anchor,
                                        int threads) {
    if (!region.contains(start)) throw std::invalid_argument("exit_statistics: start outside the parallelogram");
    const std::uint64_t tag = hash_tag("exit_stats_annealed");
    const ParallelogramExit rule{region};
    auto samples = parallel_map(trials, threads, [&](std::size_t i) {
        const Environment env(law, derive_seed(master_seed, tag, i, StreamRole::env));
        SplitMix64 rng(derive_seed(master_seed, tag, i, StreamRole::walk1));
        return to_sample(simulate_rule(env, start, rule, horizon, rng, NoOp{}));
    });
    return summarize_exits(std::move(samples), region, cell_size, time_anchor);
}

double histogram_discrepancy(const ExitStatistics& quenched, const ExitStatistics& annealed) {
    const auto q = quenched.normalized();
    const auto a = annealed.normalized();
    double sup = 0.0;
    for (const auto& [k, v] : q) {
        const auto it = a.find(k);
        sup = std::max(sup, std::abs(v - (it == a.end() ? 0.0 : it->second)));
    }
    for (const auto& [k, v] : a) {
        if (!q.count(k)) sup = std::max(sup, v);
    }
    return sup;
}

}  // namespace rwre
