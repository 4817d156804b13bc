#pragma once

#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "rwre/environment.hpp"
#include "rwre/stats.hpp"

namespace rwre {

// Trap region Delta = {x : |<x,e1>| < L, |x - dir <x,e1>/<dir,e1>|_inf < L}
// with inward drift strength c1 on Delta \ {0}.
struct TrapSpec {
    std::int64_t L = 1;
    double c1 = 0.0;
    int dim = 2;
    Vec direction{1.0, 0.0, 0.0};
    double kappa = 0.05;

    bool contains(const Site& x) const;
    // Delta \ {0}, lexicographic.
    std::vector<Site> sites() const;
    void validate() const;
};

TrapSpec make_trap_spec(int dim, std::int64_t L, double c1);

// omega(y, e) = 1/(2d) + (c1/2) <e, -y/|y|> on Delta \ {0}; exact local drift
// -c1 y/|y|. The origin and the exterior keep the law sample.
Environment build_naive_trap(const TrapSpec& spec, const EnvironmentLaw& background, std::uint64_t seed);

SiteDistribution inward_site_dist(const Site& y, double c1, int dim);

// <d(y, omega), y/|y|> <= -c1 + tol for every y in Delta \ {0}.
bool in_trap_event(const Environment& env, const TrapSpec& spec, double c1, double tol = 1e-12);

struct EscapeSamples {
    std::vector<double> times;  // T_{Delta^c} from the origin; horizon when censored
    std::vector<bool> censored;
    std::size_t censored_count = 0;
    MeanEstimate mean;
    bool flagged = false;  // some trial hit the horizon
};

EscapeSamples trap_escape_time(const Environment& env, const TrapSpec& spec, std::size_t trials,
                               std::uint64_t horizon, std::uint64_t master_seed, int threads = 1);

struct SupermartingaleSite {
    Site y{};
    double norm = 0.0;
    double ratio = 0.0;  // E^y[exp(c3 |X_1|)] / exp(c3 |y|)
    bool ok = false;
};

struct SupermartingaleReport {
    double c2 = 0.0;
    double c3 = 0.0;
    std::vector<SupermartingaleSite> sites;  // y in Delta with |y| >= c2
    bool passed = true;
};

SupermartingaleReport supermartingale_check(const Environment& env, const TrapSpec& spec, double c2, double c3);

// Smallest c2 among site norms for which the check passes at c3.
double calibrate_c2(const Environment& env, const TrapSpec& spec, double c3);

// Finite set of unit directions: 2 in d=1, `size` angles in d=2, a
// Fibonacci sphere of `size` points in d=3.
std::vector<Vec> direction_net(int dim, std::size_t size);

struct TrapProbability {
    std::size_t delta_size = 0;  // |Delta \ {0}|
    // Exact E_L for finite-support laws; -inf when some site cannot comply.
    std::optional<double> exact_log_prob;
    std::string explanation;
    // Relaxed event <d(y), u(y)> <= -c1' with u(y) the nearest net direction.
    double relaxed_c1 = 0.0;
    std::vector<Vec> net;
    std::vector<double> net_prob;  // per net direction
    bool net_prob_exact = false;
    double relaxed_log_prob = 0.0;
};

// Per-direction probabilities are exact for finite support and otherwise
// estimated from `law_samples` draws of nu.
TrapProbability trap_probability(const EnvironmentLaw& law, const TrapSpec& spec, double relaxed_c1,
                                 std::size_t net_size, std::size_t law_samples, std::uint64_t seed);

// Direct Monte Carlo frequency of the relaxed event over sampled
// environments on Delta.
struct TrapEventEstimate {
    std::size_t hits = 0;
    std::size_t trials = 0;
    double estimate = 0.0;
    std::pair<double, double> ci{0.0, 1.0};
};

TrapEventEstimate trap_event_monte_carlo(const EnvironmentLaw& law, const TrapSpec& spec, double relaxed_c1,
                                         std::size_t net_size, std::size_t trials, std::uint64_t seed,
                                         int threads = 1);

}  // namespace rwre
