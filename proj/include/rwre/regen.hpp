#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "rwre/lattice.hpp"
#include "rwre/walk.hpp"

namespace rwre {

struct RegenerationIncrement {
    std::uint64_t dtau = 0;
    Site dx{};
};

// Regeneration times of a finite path in an integer direction l.
//
// `candidates` are the times n >= 1 with <X_k,l> < <X_n,l> for every k < n and
// <X_k,l> >= <X_n,l> for every observed k > n. `times` keeps the candidates
// n < N whose final height is at least <X_n,l> + guard; only these are
// treated as regeneration times.
struct RegenerationRecord {
    std::vector<std::uint64_t> candidates;
    std::vector<std::uint64_t> times;
    std::vector<RegenerationIncrement> increments;  // between consecutive certified times
    std::optional<Site> first_position;             // X_{tau_1}
    std::int64_t guard = 0;
};

inline constexpr std::int64_t kDefaultGuard = 20;

RegenerationRecord find_regenerations(const Trajectory& traj, const Site& direction,
                                      std::int64_t guard = kDefaultGuard);

// Same on an explicit height sequence h_0..h_N (h_k = <X_k, l>).
RegenerationRecord find_regenerations(std::span<const std::int64_t> heights, std::int64_t guard);

struct IidReport {
    std::size_t increments = 0;
    bool insufficient = false;
    double lag1_autocorrelation = 0.0;
    double ks_statistic = 0.0;
    double ks_p_value = 1.0;
    double mean_dtau = 0.0;
    double var_dtau = 0.0;
    Vec mean_dx{};
    Vec var_dx{};
};

// Pools tau_{k+1} - tau_k over k >= 1 across records. Lag-1 pairs are taken
// within a record only.
IidReport iid_diagnostics(std::span<const RegenerationRecord> records);

struct TailPoint {
    double u = 0.0;
    double survival = 0.0;
    double lower = 0.0;
    double upper = 1.0;
    bool beyond_max = false;  // only the upper bound is informative
};

struct TailFit {
    // log(-log S) against log log u.
    double alpha = 0.0;
    double r2 = 0.0;
    // log(-log S) against log u; fits better when the tail is not of the
    // exp(-(log u)^alpha) type.
    double power_slope = 0.0;
    double power_r2 = 0.0;
    bool non_log_shape = false;
    std::size_t points = 0;
    std::string caveat;
};

struct TailEstimate {
    std::vector<TailPoint> points;
    std::optional<TailFit> fit;
};

TailEstimate tail_estimate(std::span<const double> samples, std::span<const double> u_grid,
                           double confidence = 0.95);

}  // namespace rwre
