#include "rwre/traps.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "rwre/env_window.hpp"
#include "rwre/parallel.hpp"
#include "rwre/walk.hpp"

namespace rwre {

namespace {

double transverse_reach(const TrapSpec& spec) {
    double m = 0.0;
    for (int i = 1; i < spec.dim; ++i) m = std::max(m, std::abs(spec.direction[static_cast<std::size_t>(i)] / spec.direction[0]));
    return m;
}

Vec unit(const Site& y) {
    const double n = norm2(y);
    return {static_cast<double>(y[0]) / n, static_cast<double>(y[1]) / n, static_cast<double>(y[2]) / n};
}

double dotv(const Vec& a, const Vec& b) { return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]; }

std::size_t nearest(const std::vector<Vec>& net, const Site& y) {
    const Vec u = unit(y);
    std::size_t best = 0;
    for (std::size_t k = 1; k < net.size(); ++k) {
        if (dotv(net[k], u) > dotv(net[best], u)) best = k;
    }
    return best;
}

}  // namespace

bool TrapSpec::contains(const Site& x) const {
    if (std::abs(x[0]) >= L) return false;
    const double along = static_cast<double>(x[0]) / direction[0];
    for (int i = 0; i < dim; ++i) {
        if (std::abs(static_cast<double>(x[i]) - direction[static_cast<std::size_t>(i)] * along) >= static_cast<double>(L)) {
            return false;
        }
    }
    return true;
}

std::vector<Site> TrapSpec::sites() const {
    const auto reach = static_cast<std::int64_t>(std::ceil(static_cast<double>(L) * (1.0 + transverse_reach(*this))));
    const BoxIndex box(dim, reach);
    std::vector<Site> out;
    for (std::size_t i = 0; i < box.volume(); ++i) {
        const Site x = box.site(i);
        if (x != Site{} && contains(x)) out.push_back(x);
    }
    return out;
}

void TrapSpec::validate() const {
    if (!valid_dim(dim)) throw std::invalid_argument("trap dimension must be 1, 2 or 3");
    if (L < 1) throw std::invalid_argument("trap size L must be >= 1");
    if (!(direction[0] > 0.0)) throw std::invalid_argument("trap direction needs <dir, e1> > 0");
    if (c1 < 0.0) throw std::invalid_argument("trap strength c1 must be nonnegative");
    if (c1 > 2.0 * (1.0 / num_steps(dim) - kappa) + 1e-15) {
        throw EllipticityError("trap strength c1 too large for kappa: need c1 <= 2 (1/2d - kappa)");
    }
}

TrapSpec make_trap_spec(int dim, std::int64_t L, double c1) {
    TrapSpec spec;
    spec.dim = dim;
    spec.L = L;
    spec.c1 = c1;
    spec.kappa = default_kappa(dim);
    spec.validate();
    return spec;
}

SiteDistribution inward_site_dist(const Site& y, double c1, int dim) {
    const Vec u = unit(y);
    SiteDistribution d;
    d.dim = dim;
    for (int s = 0; s < num_steps(dim); ++s) {
        d.probs[static_cast<std::size_t>(s)] = 1.0 / num_steps(dim) - 0.5 * c1 * step_sign(s) * u[static_cast<std::size_t>(step_axis(s))];
    }
    return d;
}

Environment build_naive_trap(const TrapSpec& spec, const EnvironmentLaw& background, std::uint64_t seed) {
    spec.validate();
    if (background.dim != spec.dim) throw std::invalid_argument("trap and background law disagree on dimension");
    OverrideMap overrides;
    for (const Site& y : spec.sites()) overrides.emplace(y, inward_site_dist(y, spec.c1, spec.dim));
    return Environment(background, seed).with_overrides(std::move(overrides));
}

bool in_trap_event(const Environment& env, const TrapSpec& spec, double c1, double tol) {
    for (const Site& y : spec.sites()) {
        if (dotv(local_drift(env.at(y)), unit(y)) > -c1 + tol) return false;
    }
    return true;
}

EscapeSamples trap_escape_time(const Environment& env, const TrapSpec& spec, std::size_t trials,
                               std::uint64_t horizon, std::uint64_t master_seed, int threads) {
    spec.validate();
    const auto reach = static_cast<std::int64_t>(std::ceil(static_cast<double>(spec.L) * (1.0 + transverse_reach(spec))));
    const EnvWindow window(env, reach);
    const std::uint64_t tag = hash_words({hash_tag("trap_escape"), static_cast<std::uint64_t>(spec.L)});
    const SetHit outside{[&](const Site& x) { return !spec.contains(x); }};
    auto reports = parallel_map(trials, threads, [&](std::size_t i) {
        SplitMix64 rng(derive_seed(master_seed, tag, i, StreamRole::walk1));
        return simulate_rule(window, Site{}, outside, horizon, rng, [](const Site&, std::uint64_t, int) {});
    });
    EscapeSamples out;
    for (const auto& r : reports) {
        out.times.push_back(static_cast<double>(r.time));
        out.censored.push_back(r.censored());
        out.censored_count += r.censored() ? 1 : 0;
    }
    out.mean = mean_estimate(out.times);
    out.flagged = out.censored_count > 0;
    return out;
}

SupermartingaleReport supermartingale_check(const Environment& env, const TrapSpec& spec, double c2, double c3) {
    SupermartingaleReport rep;
    rep.c2 = c2;
    rep.c3 = c3;
    for (const Site& y : spec.sites()) {
        const double ny = norm2(y);
        if (ny < c2) continue;
        const SiteDistribution w = env.at(y);
        double ratio = 0.0;
        for (int s = 0; s < num_steps(spec.dim); ++s) {
            Site next = y;
            apply_step(next, s);
            ratio += w[s] * std::exp(c3 * (norm2(next) - ny));
        }
        SupermartingaleSite site{y, ny, ratio, ratio <= 1.0};
        rep.passed = rep.passed && site.ok;
        rep.sites.push_back(site);
    }
    return rep;
}

double calibrate_c2(const Environment& env, const TrapSpec& spec, double c3) {
    const auto all = supermartingale_check(env, spec, 0.0, c3);
    double worst_failure = -1.0;
    for (const auto& s : all.sites) {
        if (!s.ok) worst_failure = std::max(worst_failure, s.norm);
    }
    double c2 = 0.0;
    for (const auto& s : all.sites) {
        if (s.norm > worst_failure && (c2 == 0.0 || s.norm < c2)) c2 = s.norm;
    }
    return worst_failure < 0.0 ? 0.0 : c2;
}

std::vector<Vec> direction_net(int dim, std::size_t size) {
    std::vector<Vec> net;
    if (dim == 1) return {Vec{1, 0, 0}, Vec{-1, 0, 0}};
    if (size < 2) throw std::invalid_argument("direction net needs >= 2 directions");
    if (dim == 2) {
        for (std::size_t k = 0; k < size; ++k) {
            const double a = 2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(size);
            net.push_back({std::cos(a), std::sin(a), 0.0});
        }
        return net;
    }
    const double golden = std::numbers::pi * (3.0 - std::sqrt(5.0));
    for (std::size_t k = 0; k < size; ++k) {
        const double z = 1.0 - 2.0 * (static_cast<double>(k) + 0.5) / static_cast<double>(size);
        const double r = std::sqrt(1.0 - z * z);
        const double a = golden * static_cast<double>(k);
        net.push_back({r * std::cos(a), r * std::sin(a), z});
    }
    return net;
}

TrapProbability trap_probability(const EnvironmentLaw& law, const TrapSpec& spec, double relaxed_c1,
                                 std::size_t net_size, std::size_t law_samples, std::uint64_t seed) {
    if (law.dim != spec.dim) throw std::invalid_argument("trap and law disagree on dimension");
    TrapProbability out;
    const auto sites = spec.sites();
    out.delta_size = sites.size();
    out.relaxed_c1 = relaxed_c1;
    out.net = direction_net(spec.dim, net_size);
    out.net_prob.assign(out.net.size(), 0.0);

    if (law.finite_support()) {
        const auto support = law.support();
        double log_p = 0.0;
        for (const Site& y : sites) {
            double p = 0.0;
            for (const auto& [w, atom] : support) {
                if (dotv(local_drift(atom), unit(y)) <= -spec.c1 + 1e-12) p += w;
            }
            if (p <= 0.0) {
                log_p = -std::numeric_limits<double>::infinity();
                out.explanation = "no support atom has drift <= -c1 along y/|y| for y = " + to_string(y, spec.dim) +
                                  "; the exact event has probability 0";
                break;
            }
            log_p += std::log(p);
        }
        out.exact_log_prob = log_p;
        for (std::size_t k = 0; k < out.net.size(); ++k) {
            for (const auto& [w, atom] : support) {
                if (dotv(local_drift(atom), out.net[k]) <= -relaxed_c1) out.net_prob[k] += w;
            }
        }
        out.net_prob_exact = true;
    } else {
        out.explanation = "law has continuous support; exact event not evaluated";
        if (law_samples == 0) throw std::invalid_argument("trap_probability: need law samples for continuous laws");
        SplitMix64 rng(seed);
        std::vector<std::size_t> hits(out.net.size(), 0);
        for (std::size_t i = 0; i < law_samples; ++i) {
            const Vec d = local_drift(law.sample(rng));
            for (std::size_t k = 0; k < out.net.size(); ++k) hits[k] += dotv(d, out.net[k]) <= -relaxed_c1 ? 1 : 0;
        }
        for (std::size_t k = 0; k < out.net.size(); ++k) {
            out.net_prob[k] = static_cast<double>(hits[k]) / static_cast<double>(law_samples);
        }
    }
    for (const Site& y : sites) out.relaxed_log_prob += std::log(out.net_prob[nearest(out.net, y)]);
    return out;
}

TrapEventEstimate trap_event_monte_carlo(const EnvironmentLaw& law, const TrapSpec& spec, double relaxed_c1,
                                         std::size_t net_size, std::size_t trials, std::uint64_t seed,
                                         int threads) {
    if (trials == 0) throw std::invalid_argument("trap_event_monte_carlo: trials must be >= 1");
    const auto sites = spec.sites();
    const auto net = direction_net(spec.dim, net_size);
    std::vector<std::size_t> dir_of;
    for (const Site& y : sites) dir_of.push_back(nearest(net, y));
    const std::uint64_t tag = hash_tag("trap_event");
    auto hits = parallel_map(trials, threads, [&](std::size_t i) -> int {
        const Environment env(law, derive_seed(seed, tag, i, StreamRole::env));
        for (std::size_t j = 0; j < sites.size(); ++j) {
            if (dotv(local_drift(env.at(sites[j])), net[dir_of[j]]) > -relaxed_c1) return 0;
        }
        return 1;
    });
    TrapEventEstimate est;
    est.trials = trials;
    for (int h : hits) est.hits += static_cast<std::size_t>(h);
    est.estimate = static_cast<double>(est.hits) / static_cast<double>(trials);
    est.ci = clopper_pearson(est.hits, trials, 0.95);
    return est;
}

}  // namespace rwre
