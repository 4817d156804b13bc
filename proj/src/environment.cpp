#include "rwre/environment.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

namespace rwre {

double SiteDistribution::min_prob() const noexcept {
    double m = probs[0];
    for (int s = 1; s < num_steps(dim); ++s) m = std::min(m, (*this)[s]);
    return m;
}

SiteDistribution make_site_dist(std::span<const double> weights, double kappa) {
    if (weights.size() % 2 != 0 || !valid_dim(static_cast<int>(weights.size() / 2))) {
        throw std::invalid_argument("site distribution needs 2d weights with d in {1,2,3}, got " +
                                    std::to_string(weights.size()));
    }
    double total = 0.0;
    for (double w : weights) {
        if (!(w >= 0.0) || !std::isfinite(w)) throw std::invalid_argument("negative or non-finite step weight");
        total += w;
    }
    if (total <= 0.0) throw std::invalid_argument("all step weights are zero");

    SiteDistribution dist;
    dist.dim = static_cast<int>(weights.size() / 2);
    for (std::size_t i = 0; i < weights.size(); ++i) dist.probs[i] = weights[i] / total;
    if (kappa > 0.0) check_ellipticity(dist, kappa);
    return dist;
}

SiteDistribution uniform_site_dist(int dim) {
    SiteDistribution dist;
    dist.dim = dim;
    for (int s = 0; s < num_steps(dim); ++s) dist.probs[static_cast<std::size_t>(s)] = 1.0 / num_steps(dim);
    return dist;
}

void check_ellipticity(const SiteDistribution& dist, double kappa) {
    if (dist.min_prob() < kappa) {
        throw EllipticityError("site distribution has entry " + std::to_string(dist.min_prob()) +
                               " below kappa " + std::to_string(kappa));
    }
}

Vec local_drift(const SiteDistribution& dist) noexcept {
    Vec d{};
    for (int axis = 0; axis < dist.dim; ++axis) {
        d[static_cast<std::size_t>(axis)] = dist[2 * axis] - dist[2 * axis + 1];
    }
    return d;
}

double default_kappa(int dim) {
    switch (dim) {
        case 1: return 0.1;
        case 2: return 0.05;
        case 3: return 0.02;
        default: throw std::invalid_argument("dimension must be 1, 2 or 3");
    }
}

std::string kind_name(EnvironmentLaw::Kind kind) {
    switch (kind) {
        case EnvironmentLaw::Kind::uniform: return "uniform";
        case EnvironmentLaw::Kind::mixture: return "mixture";
        case EnvironmentLaw::Kind::drift_perturbed: return "drift-perturbed";
        case EnvironmentLaw::Kind::truncated_dirichlet: return "truncated-dirichlet";
    }
    return "?";
}

EnvironmentLaw EnvironmentLaw::uniform(int dim) {
    EnvironmentLaw law;
    law.kind = Kind::uniform;
    law.dim = dim;
    law.kappa = 1.0 / num_steps(dim);
    law.validate();
    return law;
}

EnvironmentLaw EnvironmentLaw::mixture(std::vector<double> weights, std::vector<SiteDistribution> atoms) {
    EnvironmentLaw law;
    law.kind = Kind::mixture;
    law.dim = atoms.empty() ? 0 : atoms.front().dim;
    const double total = std::accumulate(weights.begin(), weights.end(), 0.0);
    if (total > 0.0) {
        for (double& w : weights) w /= total;
    }
    law.weights = std::move(weights);
    law.atoms = std::move(atoms);
    law.kappa = 1.0;
    for (const auto& a : law.atoms) law.kappa = std::min(law.kappa, a.min_prob());
    law.validate();
    return law;
}

EnvironmentLaw EnvironmentLaw::two_point(double p, const SiteDistribution& a, const SiteDistribution& b) {
    return mixture({p, 1.0 - p}, {a, b});
}

EnvironmentLaw EnvironmentLaw::constant(const SiteDistribution& dist) { return mixture({1.0}, {dist}); }

EnvironmentLaw EnvironmentLaw::drift_perturbed(int dim, double delta, int axis, double kappa) {
    EnvironmentLaw law;
    law.kind = Kind::drift_perturbed;
    law.dim = dim;
    law.delta = delta;
    law.axis = axis;
    law.kappa = kappa;
    law.validate();
    return law;
}

EnvironmentLaw EnvironmentLaw::truncated_dirichlet(std::vector<double> alpha, double kappa) {
    EnvironmentLaw law;
    law.kind = Kind::truncated_dirichlet;
    law.dim = static_cast<int>(alpha.size() / 2);
    law.alpha = std::move(alpha);
    law.kappa = kappa;
    law.validate();
    return law;
}

void EnvironmentLaw::validate() const {
    if (!valid_dim(dim)) throw std::invalid_argument("law dimension must be 1, 2 or 3");
    switch (kind) {
        case Kind::uniform:
            break;
        case Kind::mixture: {
            if (atoms.empty() || atoms.size() != weights.size()) {
                throw std::invalid_argument("mixture needs one weight per atom");
            }
            for (double w : weights) {
                if (!(w >= 0.0)) throw std::invalid_argument("mixture weight must be nonnegative");
            }
            for (const auto& a : atoms) {
                if (a.dim != dim) throw std::invalid_argument("mixture atoms disagree on dimension");
            }
            break;
        }
        case Kind::drift_perturbed: {
            if (axis < 0 || axis >= dim) throw std::invalid_argument("drift axis out of range");
            if (!(kappa > 0.0)) throw std::invalid_argument("kappa must be positive");
            if (!(delta >= 0.0 && delta < 1.0)) throw std::invalid_argument("delta must lie in [0, 1)");
            if ((1.0 - delta) - num_steps(dim) * kappa < 0.0) {
                throw EllipticityError("delta too large for kappa: need 1 - delta >= 2d kappa");
            }
            break;
        }
        case Kind::truncated_dirichlet: {
            if (alpha.size() != static_cast<std::size_t>(num_steps(dim))) {
                throw std::invalid_argument("dirichlet needs 2d concentration parameters");
            }
            for (double a : alpha) {
                if (!(a > 0.0)) throw std::invalid_argument("dirichlet parameters must be positive");
            }
            if (!(kappa > 0.0) || num_steps(dim) * kappa >= 1.0) {
                throw std::invalid_argument("kappa must lie in (0, 1/2d)");
            }
            break;
        }
    }
}

namespace {

// Dirichlet(1,...,1) via normalized exponentials.
void flat_dirichlet(SplitMix64& rng, int n, double* out) {
    double total = 0.0;
    for (int i = 0; i < n; ++i) {
        out[i] = rng.exponential();
        total += out[i];
    }
    for (int i = 0; i < n; ++i) out[i] /= total;
}

}  // namespace

SiteDistribution EnvironmentLaw::sample(SplitMix64& rng) const {
    const int n = num_steps(dim);
    SiteDistribution dist;
    dist.dim = dim;
    switch (kind) {
        case Kind::uniform:
            return uniform_site_dist(dim);
        case Kind::mixture: {
            if (atoms.size() == 1) return atoms.front();
            const double u = rng.uniform();
            double acc = 0.0;
            for (std::size_t i = 0; i + 1 < atoms.size(); ++i) {
                acc += weights[i];
                if (u < acc) return atoms[i];
            }
            return atoms.back();
        }
        case Kind::drift_perturbed: {
            std::array<double, 2 * kMaxDim> noise{};
            flat_dirichlet(rng, n, noise.data());
            const double slack = (1.0 - delta) - n * kappa;
            const double base = 1.0 / n;
            for (int s = 0; s < n; ++s) {
                double p = base + slack * (noise[static_cast<std::size_t>(s)] - base);
                if (step_axis(s) == axis) p += step_sign(s) * delta * base;
                dist.probs[static_cast<std::size_t>(s)] = std::max(p, kappa);
            }
            return dist;
        }
        case Kind::truncated_dirichlet: {
            std::vector<std::gamma_distribution<double>> gammas;
            gammas.reserve(alpha.size());
            for (double a : alpha) gammas.emplace_back(a, 1.0);
            for (int attempt = 0; attempt < 1'000'000; ++attempt) {
                double total = 0.0;
                for (int s = 0; s < n; ++s) {
                    auto& p = dist.probs[static_cast<std::size_t>(s)];
                    p = gammas[static_cast<std::size_t>(s)](rng);
                    total += p;
                }
                bool ok = total > 0.0;
                for (int s = 0; s < n && ok; ++s) {
                    dist.probs[static_cast<std::size_t>(s)] /= total;
                    ok = dist[s] >= kappa;
                }
                if (ok) return dist;
            }
            throw EllipticityError("truncated dirichlet: acceptance rate too low for kappa");
        }
    }
    return dist;
}

std::vector<std::pair<double, SiteDistribution>> EnvironmentLaw::support() const {
    switch (kind) {
        case Kind::uniform:
            return {{1.0, uniform_site_dist(dim)}};
        case Kind::mixture: {
            std::vector<std::pair<double, SiteDistribution>> out;
            for (std::size_t i = 0; i < atoms.size(); ++i) out.emplace_back(weights[i], atoms[i]);
            return out;
        }
        default:
            throw UnsupportedLaw("law '" + kind_name(kind) + "' has no finite support");
    }
}

std::optional<double> EnvironmentLaw::mean_prob(int step) const {
    const int n = num_steps(dim);
    switch (kind) {
        case Kind::uniform:
            return 1.0 / n;
        case Kind::mixture: {
            double m = 0.0;
            for (std::size_t i = 0; i < atoms.size(); ++i) m += weights[i] * atoms[i][step];
            return m;
        }
        case Kind::drift_perturbed: {
            double m = 1.0 / n;
            if (step_axis(step) == axis) m += step_sign(step) * delta / n;
            return m;
        }
        case Kind::truncated_dirichlet:
            if (std::all_of(alpha.begin(), alpha.end(), [&](double a) { return a == alpha.front(); })) {
                return 1.0 / n;
            }
            return std::nullopt;
    }
    return std::nullopt;
}

std::optional<Vec> EnvironmentLaw::mean_drift() const {
    Vec d{};
    for (int axis_i = 0; axis_i < dim; ++axis_i) {
        const auto plus = mean_prob(2 * axis_i);
        const auto minus = mean_prob(2 * axis_i + 1);
        if (!plus || !minus) return std::nullopt;
        d[static_cast<std::size_t>(axis_i)] = *plus - *minus;
    }
    return d;
}

Environment::Environment(EnvironmentLaw law, std::uint64_t seed)
    : law_(std::move(law)), seed_(seed), overrides_(std::make_shared<const OverrideMap>()) {
    law_.validate();
}

Environment Environment::with_overrides(OverrideMap extra) const {
    Environment out = *this;
    OverrideMap merged = *overrides_;
    for (auto& [site, dist] : extra) {
        if (dist.dim != law_.dim) throw std::invalid_argument("override dimension does not match law");
        merged.insert_or_assign(site, dist);
    }
    out.overrides_ = std::make_shared<const OverrideMap>(std::move(merged));
    return out;
}

Environment Environment::periodized(std::int64_t side) const {
    if (side < 1) throw std::invalid_argument("torus side must be positive");
    Environment out = *this;
    out.period_ = side;
    return out;
}

SiteDistribution Environment::sampled(const Site& site) const {
    if (law_.kind == EnvironmentLaw::Kind::uniform) return uniform_site_dist(law_.dim);
    SplitMix64 rng(hash_words({seed_, static_cast<std::uint64_t>(site[0]), static_cast<std::uint64_t>(site[1]),
                               static_cast<std::uint64_t>(site[2])}));
    return law_.sample(rng);
}

SiteDistribution Environment::at(const Site& site) const {
    const Site key = period_ ? reduce_mod(site, *period_, law_.dim) : site;
    if (!overrides_->empty()) {
        if (auto it = overrides_->find(key); it != overrides_->end()) return it->second;
    }
    return sampled(key);
}

bool zero_in_interior(std::span<const Vec> points, int dim, double tol) {
    // 0 is interior iff no nonzero u has <p, u> <= 0 for every p. If such u
    // exists and the points span R^d, an extreme ray of that cone is
    // orthogonal to d-1 independent points, so it suffices to test those.
    auto dotv = [](const Vec& a, const Vec& b) { return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]; };
    auto separates = [&](const Vec& u) {
        return std::all_of(points.begin(), points.end(), [&](const Vec& p) { return dotv(p, u) <= tol; });
    };
    auto norm = [&](const Vec& v) { return std::sqrt(dotv(v, v)); };

    std::vector<Vec> candidates;
    if (dim == 1) {
        candidates = {Vec{1, 0, 0}, Vec{-1, 0, 0}};
    } else if (dim == 2) {
        for (const auto& p : points) {
            const Vec perp{-p[1], p[0], 0};
            if (norm(perp) <= tol) continue;
            candidates.push_back(perp);
            candidates.push_back(Vec{p[1], -p[0], 0});
        }
    } else {
        for (std::size_t i = 0; i < points.size(); ++i) {
            for (std::size_t j = i + 1; j < points.size(); ++j) {
                const auto& a = points[i];
                const auto& b = points[j];
                const Vec cr{a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]};
                if (norm(cr) <= tol) continue;
                candidates.push_back(cr);
                candidates.push_back(Vec{-cr[0], -cr[1], -cr[2]});
            }
        }
    }
    if (candidates.empty()) return false;  // points do not span R^d

    // Rank check: for d >= 2 a nonzero candidate only proves span >= d-1.
    if (dim == 3) {
        bool full = false;
        for (std::size_t i = 0; i < points.size() && !full; ++i)
            for (std::size_t j = i + 1; j < points.size() && !full; ++j)
                for (std::size_t k = j + 1; k < points.size() && !full; ++k) {
                    const auto& a = points[i];
                    const auto& b = points[j];
                    const auto& c = points[k];
                    const double det = a[0] * (b[1] * c[2] - b[2] * c[1]) - a[1] * (b[0] * c[2] - b[2] * c[0]) +
                                       a[2] * (b[0] * c[1] - b[1] * c[0]);
                    full = std::abs(det) > tol;
                }
        if (!full) return false;
    } else if (dim == 2) {
        bool full = false;
        for (std::size_t i = 0; i < points.size() && !full; ++i)
            for (std::size_t j = i + 1; j < points.size() && !full; ++j)
                full = std::abs(points[i][0] * points[j][1] - points[i][1] * points[j][0]) > tol;
        if (!full) return false;
    }
    // Normalize candidates so the tolerance is scale free.
    for (auto& u : candidates) {
        const double n = norm(u);
        for (double& x : u) x /= n;
        if (separates(u)) return false;
    }
    return true;
}

DriftHull drift_hull(const EnvironmentLaw& law) {
    DriftHull hull;
    for (const auto& [w, atom] : law.support()) {
        if (w > 0.0) hull.drift_support.push_back(local_drift(atom));
    }
    hull.contains_zero_interior = zero_in_interior(hull.drift_support, law.dim);
    return hull;
}

bool is_nestling(const EnvironmentLaw& law) { return drift_hull(law).contains_zero_interior; }

}  // namespace rwre
