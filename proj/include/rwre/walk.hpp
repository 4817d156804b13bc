#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <utility>
#include <variant>
#include <vector>

#include "rwre/environment.hpp"
#include "rwre/lattice.hpp"
#include "rwre/rng.hpp"
#include "rwre/stats.hpp"

namespace rwre {

// Sequence of step indices from a start site.
struct Trajectory {
    int dim = 0;
    Site start{};
    std::vector<std::uint8_t> steps;
    std::uint64_t walk_seed = 0;

    std::size_t length() const noexcept { return steps.size(); }
    Site end() const;
    // X_0, ..., X_n.
    std::vector<Site> positions() const;
};

// R_j(N) = exp((log N)^((j+2)/(j+3))).
double r_seq(int j, double N);

// Slanted box of length N^2 along e1 and transverse half-width
// N * R_j(N) around the direction line, j = width_index.
struct Parallelogram {
    Site center{};
    std::int64_t N = 1;
    Vec direction{1.0, 0.0, 0.0};
    int width_index = 5;
    int dim = 2;

    double width() const;
    std::int64_t length() const noexcept { return N * N; }
    // sup-norm of x - z - direction <x-z, e1> / <direction, e1>.
    double transverse_offset(const Site& x) const;
    Vec transverse(const Site& x) const;
    bool contains(const Site& x) const;
    bool in_middle_third(const Site& x) const;
    // Outer face <x - z, e1> = N^2 within the transverse width.
    bool on_right_boundary(const Site& x) const;
};

enum class ExitClass { right, other_boundary, still_inside };

struct FixedSteps {
    std::uint64_t n = 0;
};
// First n with <X_n, l>/|l| >= level; l an integer direction.
struct Halfspace {
    Site direction{};
    std::int64_t level = 0;
};
// First hit of either <X, l>/|l| >= level or <X, -l>/|l| >= level.
struct Slab {
    Site direction{};
    std::int64_t level = 0;
};
struct SetHit {
    std::function<bool(const Site&)> contains;
};
struct ParallelogramExit {
    Parallelogram region;
};
// First exit from the l1 ball of the given radius around the origin.
struct BallExit {
    std::int64_t radius = 0;
};

using StopRule = std::variant<FixedSteps, Halfspace, Slab, SetHit, ParallelogramExit, BallExit>;

enum class StopKind { fixed_time, halfspace_hit, set_hit, boundary_exit, horizon_censored };

enum class Face { none, positive, negative, right, other };

struct StoppingReport {
    StopKind kind = StopKind::horizon_censored;
    std::uint64_t time = 0;
    Site position{};
    Face face = Face::none;

    bool censored() const noexcept { return kind == StopKind::horizon_censored; }
    bool operator==(const StoppingReport&) const = default;
};

// <x, l> >= level * |l| using integers only.
bool reaches_level(const Site& x, const Site& direction, std::int64_t level) noexcept;

inline int sample_step(const SiteDistribution& dist, double u) noexcept {
    const int n = num_steps(dist.dim);
    double acc = 0.0;
    for (int s = 0; s + 1 < n; ++s) {
        acc += dist[s];
        if (u < acc) return s;
    }
    for (int s = n - 1; s > 0; --s) {
        if (dist[s] > 0.0) return s;
    }
    return 0;
}

// Runs the walk until stop(x, t) fires or t == horizon. `source` needs
// at(Site) -> SiteDistribution. on_step(x, t, step) sees every position after
// a step.
template <class Source, class Stop, class OnStep>
StoppingReport simulate(const Source& source, Site x, std::uint64_t horizon, SplitMix64& rng, Stop&& stop,
                        OnStep&& on_step) {
    for (std::uint64_t t = 0;; ++t) {
        if (auto hit = stop(x, t)) return *hit;
        if (t >= horizon) return StoppingReport{StopKind::horizon_censored, t, x, Face::none};
        const int step = sample_step(source.at(x), rng.uniform());
        apply_step(x, step);
        on_step(x, t + 1, step);
    }
}

// Simulation loop specialized per rule, without recording the path.
template <class Source, class OnStep>
StoppingReport simulate_rule(const Source& source, Site start, const StopRule& rule, std::uint64_t horizon,
                             SplitMix64& rng, OnStep&& on_step);

std::pair<Trajectory, StoppingReport> run_quenched(const Environment& env, const Site& start, const StopRule& rule,
                                                   std::uint64_t horizon, std::uint64_t walk_seed);

inline const std::uint64_t kAnnealedTag = hash_tag("annealed");

// Fresh environment per trial, seeded from (master_seed, tag, trial_index).
std::pair<Trajectory, StoppingReport> run_annealed(const EnvironmentLaw& law, const Site& start,
                                                   const StopRule& rule, std::uint64_t horizon,
                                                   std::uint64_t trial_index, std::uint64_t master_seed,
                                                   std::uint64_t experiment_tag = kAnnealedTag);

struct BacktrackEstimate {
    std::int64_t level = 0;
    std::size_t trials = 0;
    std::size_t backtracks = 0;
    std::size_t censored = 0;
    double censored_as_failure = 0.0;  // (backtracks + censored) / trials
    double censored_dropped = 0.0;     // backtracks / (trials - censored)
    std::pair<double, double> ci_failure{0.0, 1.0};
    std::pair<double, double> ci_dropped{0.0, 1.0};
    bool horizon_too_small = false;  // censor rate above one half
};

// Annealed P(T^{(-l)}_L < T^{(l)}_L).
BacktrackEstimate backtrack_probability(const EnvironmentLaw& law, const Site& direction, std::int64_t level,
                                        std::size_t trials, std::uint64_t horizon, std::uint64_t master_seed,
                                        int threads = 1, std::uint64_t experiment_tag = hash_tag("condt"));

// 50 L / <v, l>, at least L.
std::uint64_t default_halfspace_horizon(std::int64_t level, double speed_along_direction);

struct VelocityEstimate {
    std::uint64_t n = 0;
    std::vector<Vec> samples;  // X_n / n per trial
    Vec mean{};
    Vec se{};
    Vec direction{};  // mean of X_n / |X_n|, normalized

    std::pair<double, double> ci(int axis, double confidence) const;
};

VelocityEstimate velocity_estimate(const EnvironmentLaw& law, std::uint64_t n, std::size_t trials,
                                   std::uint64_t master_seed, int threads = 1,
                                   std::uint64_t experiment_tag = hash_tag("velocity"));

// First exit of the path from P; the start must lie in P.
ExitClass classify_exit(const Parallelogram& region, const Trajectory& traj);

struct ExitSample {
    bool right = false;
    bool censored = false;
    std::uint64_t time = 0;
    Site position{};
};

struct ExitStatistics {
    std::size_t trials = 0;
    std::size_t censored = 0;
    std::optional<double> non_right_fraction;  // undefined without trials
    std::optional<double> deviation_fraction;  // |T - anchor| > N R_{j+1}(N)
    double time_anchor = 0.0;                  // median exit time unless given
    double cell_size = 1.0;
    // key: transverse cell indices (d-1 of them, padded) then time bin.
    std::map<std::array<std::int64_t, kMaxDim>, std::size_t> histogram;
    std::vector<ExitSample> samples;

    // Histogram normalized by the number of right exits.
    std::map<std::array<std::int64_t, kMaxDim>, double> normalized() const;
};

// Quenched exit statistics from `start` in a fixed environment.
ExitStatistics exit_statistics(const Environment& env, const Parallelogram& region, const Site& start,
                               std::size_t trials, double cell_size, std::uint64_t horizon,
                               std::uint64_t master_seed, std::optional<double> time_anchor = std::nullopt,
                               int threads = 1);

// Same with a fresh environment per trial (annealed law).
ExitStatistics exit_statistics_annealed(const EnvironmentLaw& law, const Parallelogram& region, const Site& start,
                                        std::size_t trials, double cell_size, std::uint64_t horizon,
                                        std::uint64_t master_seed, std::optional<double> time_anchor = std::nullopt,
                                        int threads = 1);

// sup over cells of |quenched - annealed| for normalized histograms.
double histogram_discrepancy(const ExitStatistics& quenched, const ExitStatistics& annealed);

// ------------------------------------------------------------------------

template <class Source, class OnStep>
StoppingReport simulate_rule(const Source& source, Site start, const StopRule& rule, std::uint64_t horizon,
                             SplitMix64& rng, OnStep&& on_step) {
    return std::visit(
        [&](const auto& r) -> StoppingReport {
            using R = std::decay_t<decltype(r)>;
            if constexpr (std::is_same_v<R, FixedSteps>) {
                return simulate(
                    source, start, horizon, rng,
                    [&](const Site& x, std::uint64_t t) -> std::optional<StoppingReport> {
                        if (t >= r.n) return StoppingReport{StopKind::fixed_time, t, x, Face::none};
                        return std::nullopt;
                    },
                    on_step);
            } else if constexpr (std::is_same_v<R, Halfspace>) {
                return simulate(
                    source, start, horizon, rng,
                    [&](const Site& x, std::uint64_t t) -> std::optional<StoppingReport> {
                        if (reaches_level(x, r.direction, r.level))
                            return StoppingReport{StopKind::halfspace_hit, t, x, Face::positive};
                        return std::nullopt;
                    },
                    on_step);
            } else if constexpr (std::is_same_v<R, Slab>) {
                const Site neg = Site{} - r.direction;
                return simulate(
                    source, start, horizon, rng,
                    [&](const Site& x, std::uint64_t t) -> std::optional<StoppingReport> {
                        if (reaches_level(x, r.direction, r.level))
                            return StoppingReport{StopKind::halfspace_hit, t, x, Face::positive};
                        if (reaches_level(x, neg, r.level))
                            return StoppingReport{StopKind::halfspace_hit, t, x, Face::negative};
                        return std::nullopt;
                    },
                    on_step);
            } else if constexpr (std::is_same_v<R, SetHit>) {
                return simulate(
                    source, start, horizon, rng,
                    [&](const Site& x, std::uint64_t t) -> std::optional<StoppingReport> {
                        if (r.contains(x)) return StoppingReport{StopKind::set_hit, t, x, Face::none};
                        return std::nullopt;
                    },
                    on_step);
            } else if constexpr (std::is_same_v<R, ParallelogramExit>) {
                return simulate(
                    source, start, horizon, rng,
                    [&](const Site& x, std::uint64_t t) -> std::optional<StoppingReport> {
                        if (r.region.contains(x)) return std::nullopt;
                        const bool right = x[0] - r.region.center[0] >= r.region.length();
                        return StoppingReport{StopKind::boundary_exit, t, x, right ? Face::right : Face::other};
                    },
                    on_step);
            } else {
                return simulate(
                    source, start, horizon, rng,
                    [&](const Site& x, std::uint64_t t) -> std::optional<StoppingReport> {
                        if (norm1(x) > r.radius) return StoppingReport{StopKind::boundary_exit, t, x, Face::other};
                        return std::nullopt;
                    },
                    on_step);
            }
        },
        rule);
}

}  // namespace rwre
