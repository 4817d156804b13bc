#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "rwre/lattice.hpp"
#include "rwre/rng.hpp"

namespace rwre {

using Vec = std::array<double, kMaxDim>;

class EllipticityError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

class UnsupportedLaw : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// Transition probabilities out of one site, indexed by step (see lattice.hpp).
struct SiteDistribution {
    int dim = 0;
    std::array<double, 2 * kMaxDim> probs{};

    double operator[](int step) const noexcept { return probs[static_cast<std::size_t>(step)]; }
    double min_prob() const noexcept;

    bool operator==(const SiteDistribution&) const = default;
};

// Normalizes nonnegative weights (length 2d). With kappa > 0 the result must
// also satisfy min entry >= kappa.
SiteDistribution make_site_dist(std::span<const double> weights, double kappa = 0.0);

SiteDistribution uniform_site_dist(int dim);

// Throws EllipticityError when some entry is below kappa.
void check_ellipticity(const SiteDistribution& dist, double kappa);

// d(x, omega) = sum_e omega(x, e) e.
Vec local_drift(const SiteDistribution& dist) noexcept;

// Default ellipticity constants per dimension.
double default_kappa(int dim);

// The single-site law nu. All built-in laws are choices of this library; none
// is prescribed by the model beyond uniform ellipticity.
struct EnvironmentLaw {
    enum class Kind { uniform, mixture, drift_perturbed, truncated_dirichlet };

    Kind kind = Kind::uniform;
    int dim = 2;
    double kappa = 0.25;

    // mixture
    std::vector<double> weights;
    std::vector<SiteDistribution> atoms;

    // drift_perturbed: mean (1 + delta <e, e_axis>) / 2d plus zero-sum
    // Dirichlet(1) noise filling the remaining ellipticity slack.
    double delta = 0.0;
    int axis = 0;

    // truncated_dirichlet
    std::vector<double> alpha;

    static EnvironmentLaw uniform(int dim);
    static EnvironmentLaw mixture(std::vector<double> weights, std::vector<SiteDistribution> atoms);
    static EnvironmentLaw two_point(double p, const SiteDistribution& a, const SiteDistribution& b);
    static EnvironmentLaw constant(const SiteDistribution& dist);
    static EnvironmentLaw drift_perturbed(int dim, double delta, int axis, double kappa);
    static EnvironmentLaw truncated_dirichlet(std::vector<double> alpha, double kappa);

    // Throws std::invalid_argument on inconsistent parameters.
    void validate() const;

    SiteDistribution sample(SplitMix64& rng) const;

    bool finite_support() const noexcept { return kind == Kind::uniform || kind == Kind::mixture; }

    // (weight, atom) pairs; throws UnsupportedLaw for continuous laws.
    std::vector<std::pair<double, SiteDistribution>> support() const;

    // E[omega(0, step)] when available in closed form.
    std::optional<double> mean_prob(int step) const;

    // E[d(0, omega)] when available in closed form.
    std::optional<Vec> mean_drift() const;

    bool operator==(const EnvironmentLaw&) const = default;
};

std::string kind_name(EnvironmentLaw::Kind kind);

using OverrideMap = std::map<Site, SiteDistribution>;

// Lazy realization of omega ~ nu^{Z^d}: the distribution at a site is a pure
// function of (law, seed, site), with overrides and optional periodization.
class Environment {
public:
    Environment(EnvironmentLaw law, std::uint64_t seed);

    const EnvironmentLaw& law() const noexcept { return law_; }
    int dim() const noexcept { return law_.dim; }
    std::uint64_t seed() const noexcept { return seed_; }
    const OverrideMap& overrides() const noexcept { return *overrides_; }
    std::optional<std::int64_t> period() const noexcept { return period_; }

    Environment with_overrides(OverrideMap extra) const;
    Environment periodized(std::int64_t side) const;

    SiteDistribution at(const Site& site) const;

    // Law sample at a site ignoring overrides and periodization.
    SiteDistribution sampled(const Site& site) const;

private:
    EnvironmentLaw law_;
    std::uint64_t seed_;
    std::shared_ptr<const OverrideMap> overrides_;
    std::optional<std::int64_t> period_;
};

inline SiteDistribution sample_env_site(const Environment& env, const Site& site) { return env.at(site); }

// Convex hull data of the support of the local drift.
struct DriftHull {
    std::vector<Vec> drift_support;
    bool contains_zero_interior = false;
};

// Exact-up-to-rounding test whether 0 is interior to conv(points) in R^dim.
bool zero_in_interior(std::span<const Vec> points, int dim, double tol = 1e-12);

DriftHull drift_hull(const EnvironmentLaw& law);

// Nestling: 0 interior to the convex hull of the drift support. Finite
// support only.
bool is_nestling(const EnvironmentLaw& law);

}  // namespace rwre
