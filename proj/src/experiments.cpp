#include "rwre/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

#include "rwre/intersect.hpp"
#include "rwre/kernel.hpp"
#include "rwre/parallel.hpp"
#include "rwre/regen.hpp"
#include "rwre/torus.hpp"
#include "rwre/traps.hpp"

namespace rwre {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

double safe_log(double x) { return x > 0.0 ? std::log(x) : -std::numeric_limits<double>::infinity(); }

std::string axis_label(const char* stem, int axis) { return std::string(stem) + std::to_string(axis + 1); }

ConfigError bad(const std::string& message) { return ConfigError("<config>", 0, message); }

std::size_t positive(const ExperimentConfig& cfg, const std::string& key) {
    const auto v = cfg.integer(key);
    if (v <= 0) throw bad("key '" + key + "' must be positive");
    return static_cast<std::size_t>(v);
}

std::size_t positive(const ExperimentConfig& cfg, const std::string& key, std::int64_t fallback) {
    return cfg.has(key) ? positive(cfg, key) : static_cast<std::size_t>(fallback);
}

Site direction_of(const ExperimentConfig& cfg, int dim) {
    Site dir{};
    if (!cfg.has("run.direction")) {
        dir[0] = 1;
        return dir;
    }
    const auto v = cfg.integers("run.direction");
    if (static_cast<int>(v.size()) != dim) throw bad("run.direction needs one integer per dimension");
    for (int i = 0; i < dim; ++i) dir[static_cast<std::size_t>(i)] = v[static_cast<std::size_t>(i)];
    if (norm1(dir) == 0) throw bad("run.direction must be nonzero");
    return dir;
}

// Speed along dir used to size horizons: run.speed, else the law's mean drift.
double speed_along(const ExperimentConfig& cfg, const EnvironmentLaw& law, const Site& dir) {
    if (cfg.has("run.speed")) return cfg.real("run.speed");
    const auto drift = law.mean_drift();
    if (!drift) return 0.0;
    double s = 0.0;
    for (int i = 0; i < law.dim; ++i) s += (*drift)[static_cast<std::size_t>(i)] * static_cast<double>(dir[static_cast<std::size_t>(i)]);
    return s / norm2(dir);
}

std::vector<std::uint64_t> unsigned_grid(const ExperimentConfig& cfg, const std::string& key) {
    std::vector<std::uint64_t> out;
    for (auto v : cfg.integers(key)) {
        if (v < 0) throw bad("key '" + key + "' must be nonnegative");
        out.push_back(static_cast<std::uint64_t>(v));
    }
    return out;
}

void fit_request(ResultTable& t, const std::string& name, const std::string& x, const std::string& y) {
    t.set_meta("fit." + name, x + " " + y);
}

void add_fit_summary(ResultTable& t, const std::string& name, const std::vector<double>& x,
                     const std::vector<double>& y) {
    std::vector<double> fx, fy;
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (std::isfinite(x[i]) && std::isfinite(y[i])) {
            fx.push_back(x[i]);
            fy.push_back(y[i]);
        }
    }
    if (fx.size() < 2) {
        t.set_summary(name + ".slope", kNaN);
        t.set_summary(name + ".r2", kNaN);
        return;
    }
    const LineFit f = fit_line(fx, fy);
    t.set_summary(name + ".slope", f.slope);
    t.set_summary(name + ".slope_se", f.slope_se);
    t.set_summary(name + ".intercept", f.intercept);
    t.set_summary(name + ".r2", f.r2);
    t.set_summary(name + ".points", static_cast<double>(f.n));
}

// ---- experiments --------------------------------------------------------

ResultTable run_velocity(const ExperimentConfig& cfg, int threads) {
    const auto law = cfg.law();
    const auto n = positive(cfg, "run.steps");
    const auto trials = positive(cfg, "run.trials");
    const double conf = cfg.real("run.confidence", 0.99);
    const auto est = velocity_estimate(law, n, trials, cfg.seed(), threads);

    std::vector<std::string> cols{"trial"};
    for (int a = 0; a < law.dim; ++a) cols.push_back("x" + std::to_string(a + 1) + "/n");
    ResultTable t(cols);
    for (std::size_t i = 0; i < est.samples.size(); ++i) {
        std::vector<double> row{static_cast<double>(i)};
        for (int a = 0; a < law.dim; ++a) row.push_back(est.samples[i][static_cast<std::size_t>(a)]);
        t.add_row(std::move(row));
    }
    for (int a = 0; a < law.dim; ++a) {
        const auto i = static_cast<std::size_t>(a);
        const auto [lo, hi] = est.ci(a, conf);
        t.set_summary(axis_label("mean.v", a), est.mean[i]);
        t.set_summary(axis_label("se.v", a), est.se[i]);
        t.set_summary(axis_label("ci_low.v", a), lo);
        t.set_summary(axis_label("ci_high.v", a), hi);
        t.set_summary(axis_label("direction.", a), est.direction[i]);
    }
    t.set_summary("confidence", conf);
    return t;
}

ResultTable run_condt(const ExperimentConfig& cfg, int threads) {
    const auto law = cfg.law();
    const Site dir = direction_of(cfg, law.dim);
    const auto levels = cfg.integers("run.levels");
    std::vector<std::int64_t> trials;
    if (cfg.has("run.trials_per_level")) {
        trials = cfg.integers("run.trials_per_level");
        if (trials.size() != levels.size()) throw bad("run.trials_per_level needs one count per level");
    } else {
        trials.assign(levels.size(), static_cast<std::int64_t>(positive(cfg, "run.trials")));
    }
    const double speed = speed_along(cfg, law, dir);
    const double conf = cfg.real("run.confidence", 0.95);

    ResultTable t({"level", "trials", "backtracks", "censored", "p", "ci_low", "ci_high", "p_dropped", "horizon",
                   "log_p"});
    std::vector<double> xs, ys;
    std::size_t small_horizon = 0;
    for (std::size_t k = 0; k < levels.size(); ++k) {
        const auto L = levels[k];
        if (L <= 0 || trials[k] <= 0) throw bad("levels and trial counts must be positive");
        std::uint64_t horizon = 0;
        if (cfg.has("run.horizon")) {
            horizon = static_cast<std::uint64_t>(cfg.integer("run.horizon"));
        } else {
            if (!(speed > 0.0)) throw bad("set run.horizon or run.speed: the law has no positive drift along run.direction");
            horizon = default_halfspace_horizon(L, speed);
        }
        auto est = backtrack_probability(law, dir, L, static_cast<std::size_t>(trials[k]), horizon, cfg.seed(),
                                         threads);
        if (est.horizon_too_small) ++small_horizon;
        const auto ci = clopper_pearson(est.backtracks + est.censored, est.trials, conf);
        t.add_row({static_cast<double>(L), static_cast<double>(est.trials), static_cast<double>(est.backtracks),
                   static_cast<double>(est.censored), est.censored_as_failure, ci.first, ci.second,
                   est.censored_dropped, static_cast<double>(horizon), safe_log(est.censored_as_failure)});
        xs.push_back(static_cast<double>(L));
        ys.push_back(safe_log(est.censored_as_failure));
    }
    fit_request(t, "log_p", "level", "log_p");
    add_fit_summary(t, "log_p", xs, ys);
    t.set_summary("horizon_too_small", static_cast<double>(small_horizon));
    return t;
}

ResultTable run_regen(const ExperimentConfig& cfg, int threads) {
    const auto law = cfg.law();
    const auto steps = positive(cfg, "run.steps");
    const auto trials = positive(cfg, "run.trials");
    const auto guard = cfg.integer("run.guard", kDefaultGuard);
    const Site dir = direction_of(cfg, law.dim);

    const auto records = parallel_map(trials, threads, [&](std::size_t i) {
        return find_regenerations(regen_trajectory(law, steps, i, cfg.seed()), dir, guard);
    });

    ResultTable t({"trial", "candidates", "certified", "tau1", "height_tau1", "last_candidate"});
    std::vector<double> tau1;
    for (std::size_t i = 0; i < records.size(); ++i) {
        const auto& r = records[i];
        const double first = r.times.empty() ? kNaN : static_cast<double>(r.times.front());
        const double height = r.first_position ? static_cast<double>(dot(*r.first_position, dir)) : kNaN;
        const double last = r.candidates.empty() ? kNaN : static_cast<double>(r.candidates.back());
        t.add_row({static_cast<double>(i), static_cast<double>(r.candidates.size()),
                   static_cast<double>(r.times.size()), first, height, last});
        if (!r.times.empty()) tau1.push_back(first);
    }
    const auto iid = iid_diagnostics(records);
    t.set_summary("increments", static_cast<double>(iid.increments));
    t.set_summary("insufficient", iid.insufficient ? 1.0 : 0.0);
    t.set_summary("lag1_autocorrelation", iid.lag1_autocorrelation);
    t.set_summary("ks_statistic", iid.ks_statistic);
    t.set_summary("ks_p_value", iid.ks_p_value);
    t.set_summary("mean_dtau", iid.mean_dtau);
    t.set_summary("var_dtau", iid.var_dtau);
    t.set_summary("tau1_found", static_cast<double>(tau1.size()));
    if (cfg.has("run.u_grid")) {
        const auto grid = cfg.reals("run.u_grid");
        const auto tail = tail_estimate(tau1, grid, cfg.real("run.confidence", 0.95));
        for (const auto& p : tail.points) {
            t.set_summary("survival." + format_number(p.u), p.survival);
            t.set_summary("survival_upper." + format_number(p.u), p.upper);
        }
        if (tail.fit) {
            t.set_summary("tail.alpha", tail.fit->alpha);
            t.set_summary("tail.r2", tail.fit->r2);
            t.set_summary("tail.power_slope", tail.fit->power_slope);
            t.set_summary("tail.power_r2", tail.fit->power_r2);
            t.set_meta("tail.caveat", tail.fit->caveat);
        }
    }
    return t;
}

ResultTable run_intersect(const ExperimentConfig& cfg, int threads) {
    const auto law = cfg.law();
    const auto grid = cfg.integers("run.n_grid");
    const auto envs = positive(cfg, "run.envs");
    const auto pairs = positive(cfg, "run.pairs");
    double factor = cfg.real("run.horizon_factor", 0.0);
    if (!cfg.has("run.horizon_factor")) {
        const double speed = speed_along(cfg, law, direction_of(cfg, law.dim));
        if (!(speed > 0.0)) throw bad("set run.horizon_factor: the law has no positive drift");
        factor = 20.0 / speed;
    }
    const auto res = intersection_scaling(law, grid, envs, pairs, cfg.seed(), factor, threads);

    ResultTable t({"n", "log_n", "median", "q90", "log_median", "log_q90", "mean_censor_rate"});
    for (std::size_t i = 0; i < res.n_grid.size(); ++i) {
        double censor = 0.0;
        for (const auto& per_env : res.censor_rates) censor += per_env[i];
        censor /= static_cast<double>(res.censor_rates.size());
        const double n = static_cast<double>(res.n_grid[i]);
        t.add_row({n, std::log(n), res.median[i], res.q90[i], safe_log(res.median[i]), safe_log(res.q90[i]), censor});
    }
    fit_request(t, "median", "log_n", "log_median");
    fit_request(t, "q90", "log_n", "log_q90");
    t.set_summary("median.slope", res.median_fit.slope);
    t.set_summary("median.r2", res.median_fit.r2);
    t.set_summary("q90.slope", res.q90_fit.slope);
    t.set_summary("q90.r2", res.q90_fit.r2);
    t.set_summary("horizon_factor", factor);
    return t;
}

ResultTable run_fn_tail(const ExperimentConfig& cfg, int threads) {
    const auto law = cfg.law();
    const auto n = static_cast<std::uint64_t>(cfg.integer("run.n"));
    const std::string mode = cfg.text("run.mode", "tail");
    if (mode == "sequence") {
        const auto env = experiment_environment(law, "fn_tail", cfg.seed());
        const auto seq = f_n_sequence(env, n);
        ResultTable t({"n", "f_n", "deviation"});
        double worst = 0.0;
        for (std::size_t k = 0; k < seq.size(); ++k) {
            t.add_row({static_cast<double>(k), seq[k], seq[k] - 1.0});
            worst = std::max(worst, std::abs(seq[k] - 1.0));
        }
        t.set_summary("max_abs_deviation", worst);
        return t;
    }
    if (mode != "tail") throw bad("run.mode for fn_tail must be 'tail' or 'sequence'");

    const auto envs = positive(cfg, "run.envs");
    const std::vector<double> grid = cfg.has("run.u_grid") ? cfg.reals("run.u_grid") : std::vector<double>{};
    const auto res = f_n_tail(law, n, envs, grid, cfg.seed(), threads);
    ResultTable t({"env", "f_n"});
    for (std::size_t i = 0; i < res.samples.size(); ++i) t.add_row({static_cast<double>(i), res.samples[i]});
    t.set_summary("mean", res.mean.mean);
    t.set_summary("se", res.mean.se);
    t.set_summary("z", res.mean.se > 0.0 ? (res.mean.mean - 1.0) / res.mean.se : kNaN);
    for (const auto& p : res.survival) {
        t.set_summary("survival." + format_number(p.u), p.survival);
        t.set_summary("survival_lower." + format_number(p.u), p.lower);
        t.set_summary("survival_upper." + format_number(p.u), p.upper);
    }
    return t;
}

ResultTable run_torus(const ExperimentConfig& cfg, int) {
    const auto law = cfg.law();
    const auto side = cfg.integer("run.side");
    const auto n = static_cast<std::uint64_t>(cfg.integer("run.n"));
    if (side <= 0 || n == 0) throw bad("run.side and run.n must be positive");
    const auto env = experiment_environment(law, "torus", cfg.seed()).periodized(side);
    const auto chain = torus_stationary(env, side);
    const auto curve = torus_gap_curve(env, side, n);

    ResultTable t({"n", "f_n", "f_next", "g0", "gap"});
    for (const auto& c : curve) t.add_row({static_cast<double>(c.n), c.f_n, c.f_next, c.g0, c.gap});
    t.set_summary("residual", chain.residual);
    t.set_summary("min_pi", *std::min_element(chain.stationary.begin(), chain.stationary.end()));
    t.set_summary("iterations", static_cast<double>(chain.iterations));
    t.set_summary("converged", chain.converged ? 1.0 : 0.0);
    if (!curve.empty()) t.set_summary("gap_at_n", curve.back().gap);
    return t;
}

ResultTable run_trap(const ExperimentConfig& cfg, int threads) {
    const auto law = cfg.law();
    const auto sizes = cfg.integers("run.sizes");
    const double c1 = cfg.real("run.c1");
    const std::string mode = cfg.text("run.mode", "escape");
    const std::uint64_t tag = hash_tag("trap");

    auto spec_for = [&](std::int64_t L) {
        if (L <= 0) throw bad("run.sizes must be positive");
        TrapSpec spec = make_trap_spec(law.dim, L, c1);
        if (cfg.has("law.kappa")) spec.kappa = cfg.real("law.kappa");
        spec.validate();
        return spec;
    };

    if (mode == "escape") {
        const auto trials = positive(cfg, "run.trials");
        const auto horizon = static_cast<std::uint64_t>(cfg.integer("run.horizon"));
        ResultTable t({"L", "trials", "censored", "mean", "se", "log_mean"});
        std::vector<double> xs, ys;
        std::size_t flagged = 0;
        for (auto L : sizes) {
            const auto spec = spec_for(L);
            const auto u = static_cast<std::uint64_t>(L);
            const auto env = build_naive_trap(spec, law, derive_seed(cfg.seed(), tag, u, StreamRole::env));
            const auto s = trap_escape_time(env, spec, trials, horizon, derive_seed(cfg.seed(), tag, u, StreamRole::walk1),
                                            threads);
            if (s.flagged) ++flagged;
            t.add_row({static_cast<double>(L), static_cast<double>(trials), static_cast<double>(s.censored_count),
                       s.mean.mean, s.mean.se, safe_log(s.mean.mean)});
            xs.push_back(static_cast<double>(L));
            ys.push_back(safe_log(s.mean.mean));
        }
        fit_request(t, "log_mean", "L", "log_mean");
        add_fit_summary(t, "log_mean", xs, ys);
        t.set_summary("censored_sizes", static_cast<double>(flagged));
        return t;
    }
    if (mode == "probability") {
        const double relaxed = cfg.real("run.c1_relaxed");
        const auto net = positive(cfg, "run.net_size", 16);
        const auto samples = positive(cfg, "run.law_samples", 100000);
        ResultTable t({"L", "delta_size", "log_prob", "exact_log_prob"});
        std::vector<double> xs, ys;
        std::string explanation;
        for (auto L : sizes) {
            const auto spec = spec_for(L);
            const auto p = trap_probability(law, spec, relaxed, net, samples, cfg.seed());
            t.add_row({static_cast<double>(L), static_cast<double>(p.delta_size), p.relaxed_log_prob,
                       p.exact_log_prob.value_or(kNaN)});
            xs.push_back(static_cast<double>(p.delta_size));
            ys.push_back(p.relaxed_log_prob);
            explanation = p.explanation;
        }
        fit_request(t, "log_prob", "delta_size", "log_prob");
        add_fit_summary(t, "log_prob", xs, ys);
        if (!explanation.empty()) t.set_meta("exact_branch", explanation);
        return t;
    }
    if (mode == "supermartingale") {
        if (sizes.size() != 1) throw bad("supermartingale mode takes a single value in run.sizes");
        const auto spec = spec_for(sizes.front());
        const auto env = build_naive_trap(spec, law, derive_seed(cfg.seed(), tag, 0, StreamRole::env));
        const double c3 = cfg.real("run.c3", c1 / 4.0);
        const double c2 = cfg.has("run.c2") ? cfg.real("run.c2") : calibrate_c2(env, spec, c3);
        const auto rep = supermartingale_check(env, spec, c2, c3);

        std::vector<std::string> cols;
        for (int a = 0; a < law.dim; ++a) cols.push_back(axis_label("y", a));
        for (const char* c : {"norm", "ratio", "ok"}) cols.emplace_back(c);
        ResultTable t(cols);
        double worst = 0.0;
        for (const auto& s : rep.sites) {
            std::vector<double> row;
            for (int a = 0; a < law.dim; ++a) row.push_back(static_cast<double>(s.y[static_cast<std::size_t>(a)]));
            row.insert(row.end(), {s.norm, s.ratio, s.ok ? 1.0 : 0.0});
            t.add_row(std::move(row));
            worst = std::max(worst, s.ratio);
        }
        t.set_summary("c2", rep.c2);
        t.set_summary("c3", rep.c3);
        t.set_summary("sites", static_cast<double>(rep.sites.size()));
        t.set_summary("max_ratio", worst);
        t.set_summary("passed", rep.passed ? 1.0 : 0.0);
        return t;
    }
    throw bad("run.mode for trap must be 'escape', 'probability' or 'supermartingale'");
}

ResultTable run_clt(const ExperimentConfig& cfg, int threads) {
    const auto law = cfg.law();
    const auto grid = unsigned_grid(cfg, "run.n_grid");
    const auto envs = positive(cfg, "run.envs");
    const std::string mode = cfg.text("run.mode", "tv");
    if (mode == "decay") {
        const auto d = annealed_kernel_decay(law, grid, envs, cfg.seed(), threads);
        ResultTable t({"n", "max_prob", "log_n", "log_max_prob"});
        for (std::size_t i = 0; i < d.n_grid.size(); ++i) {
            const double n = static_cast<double>(d.n_grid[i]);
            t.add_row({n, d.max_prob[i], std::log(n), safe_log(d.max_prob[i])});
        }
        fit_request(t, "decay", "log_n", "log_max_prob");
        t.set_summary("decay.slope", d.fit.slope);
        t.set_summary("decay.r2", d.fit.r2);
        return t;
    }
    if (mode != "tv") throw bad("run.mode for clt must be 'tv' or 'decay'");

    const auto fields = annealed_kernels(law, grid, envs, cfg.seed(), threads);
    std::vector<std::string> cols{"n", "tv", "singular", "pruned_mass"};
    for (int a = 0; a < law.dim; ++a) cols.push_back(axis_label("mean", a));
    ResultTable t(cols);
    for (const auto& f : fields) {
        const auto r = local_clt_report(f);
        std::vector<double> row{static_cast<double>(f.time()), r.tv, r.singular ? 1.0 : 0.0, f.pruned_mass()};
        for (int a = 0; a < law.dim; ++a) row.push_back(r.mean[static_cast<std::size_t>(a)]);
        t.add_row(std::move(row));
    }
    return t;
}

ResultTable run_exit_stats(const ExperimentConfig& cfg, int threads) {
    const auto law = cfg.law();
    Parallelogram region;
    region.dim = law.dim;
    region.N = cfg.integer("run.N");
    if (region.N <= 1) throw bad("run.N must be at least 2");
    region.width_index = static_cast<int>(cfg.integer("run.width_index", 5));
    if (const auto drift = law.mean_drift(); drift && (*drift)[0] > 0.0) {
        double norm = 0.0;
        for (double v : *drift) norm += v * v;
        for (std::size_t i = 0; i < kMaxDim; ++i) region.direction[i] = (*drift)[i] / std::sqrt(norm);
    }
    const auto trials = positive(cfg, "run.trials");
    const double cell = cfg.real("run.cell_size", static_cast<double>(region.N));
    std::uint64_t horizon = 0;
    if (cfg.has("run.horizon")) {
        horizon = static_cast<std::uint64_t>(cfg.integer("run.horizon"));
    } else {
        const double speed = speed_along(cfg, law, direction_of(cfg, law.dim));
        if (!(speed > 0.0)) throw bad("set run.horizon: the law has no positive drift along e1");
        horizon = static_cast<std::uint64_t>(std::ceil(20.0 * static_cast<double>(region.length()) / speed));
    }
    const std::string mode = cfg.text("run.mode", "both");
    if (mode != "both" && mode != "quenched" && mode != "annealed") {
        throw bad("run.mode for exit_stats must be 'both', 'quenched' or 'annealed'");
    }

    const Site start{};
    std::optional<ExitStatistics> q, a;
    if (mode != "annealed") {
        const auto env = experiment_environment(law, "exit_stats", cfg.seed());
        q = exit_statistics(env, region, start, trials, cell, horizon, cfg.seed(), std::nullopt, threads);
    }
    if (mode != "quenched") {
        const auto anchor = q ? std::optional<double>(q->time_anchor) : std::nullopt;
        a = exit_statistics_annealed(law, region, start, trials, cell, horizon, cfg.seed(), anchor, threads);
    }

    ResultTable t({"cell1", "cell2", "time_bin", "quenched", "annealed"});
    std::map<std::array<std::int64_t, kMaxDim>, double> qn, an;
    if (q) qn = q->normalized();
    if (a) an = a->normalized();
    std::set<std::array<std::int64_t, kMaxDim>> keys;
    for (const auto& [k, v] : qn) keys.insert(k);
    for (const auto& [k, v] : an) keys.insert(k);
    for (const auto& k : keys) {
        // The time bin sits right after the d-1 transverse cells.
        const std::size_t tb = static_cast<std::size_t>(law.dim - 1);
        const double c1 = tb > 0 ? static_cast<double>(k[0]) : kNaN;
        const double c2 = tb > 1 ? static_cast<double>(k[1]) : kNaN;
        const double qv = q ? (qn.count(k) ? qn.at(k) : 0.0) : kNaN;
        const double av = a ? (an.count(k) ? an.at(k) : 0.0) : kNaN;
        t.add_row({c1, c2, static_cast<double>(k[tb]), qv, av});
    }
    auto report = [&](const char* name, const std::optional<ExitStatistics>& s) {
        if (!s) return;
        const std::string p = name;
        t.set_summary(p + ".non_right_fraction", s->non_right_fraction.value_or(kNaN));
        t.set_summary(p + ".deviation_fraction", s->deviation_fraction.value_or(kNaN));
        t.set_summary(p + ".censored", static_cast<double>(s->censored));
        t.set_summary(p + ".time_anchor", s->time_anchor);
    };
    report("quenched", q);
    report("annealed", a);
    if (q && a) t.set_summary("discrepancy", histogram_discrepancy(*q, *a));
    t.set_summary("width", region.width());
    t.set_summary("length", static_cast<double>(region.length()));
    t.set_summary("horizon", static_cast<double>(horizon));
    return t;
}

}  // namespace

Trajectory regen_trajectory(const EnvironmentLaw& law, std::uint64_t steps, std::uint64_t trial,
                            std::uint64_t master_seed) {
    return run_annealed(law, Site{}, FixedSteps{steps}, steps, trial, master_seed, hash_tag("regen")).first;
}

Environment experiment_environment(const EnvironmentLaw& law, const std::string& kind, std::uint64_t master_seed,
                                   std::uint64_t index) {
    return Environment(law, derive_seed(master_seed, hash_tag(kind), index, StreamRole::env));
}

ResultTable run_experiment(const ExperimentConfig& config, int threads) {
    if (threads < 1) threads = 1;
    const std::string kind = config.kind();
    ResultTable t;
    if (kind == "velocity") t = run_velocity(config, threads);
    else if (kind == "condt") t = run_condt(config, threads);
    else if (kind == "regen") t = run_regen(config, threads);
    else if (kind == "intersect") t = run_intersect(config, threads);
    else if (kind == "fn_tail") t = run_fn_tail(config, threads);
    else if (kind == "torus") t = run_torus(config, threads);
    else if (kind == "trap") t = run_trap(config, threads);
    else if (kind == "clt") t = run_clt(config, threads);
    else if (kind == "exit_stats") t = run_exit_stats(config, threads);
    else throw bad("unknown experiment kind '" + kind + "'");

    // Header goes first; experiment metadata keeps its order after it.
    ResultTable out(t.columns());
    const std::string echo = config.serialize();
    out.set_meta("tool", std::string(kToolVersion));
    out.set_meta("experiment", kind);
    out.set_meta("config_hash", git_blob_hash(echo));
    for (const auto& [k, v] : config.values()) out.set_meta("config." + k, v);
    for (const auto& [k, v] : t.metadata()) out.set_meta(k, v);
    for (const auto& r : t.rows()) out.add_row(r);
    return out;
}

}  // namespace rwre
