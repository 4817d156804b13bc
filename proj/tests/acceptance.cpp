// Acceptance suite: one PASS/FAIL line per criterion. Every criterion runs
// through run_experiment on a shipped config so criterion 12 can replay them.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "rwre/config.hpp"
#include "rwre/experiments.hpp"
#include "rwre/regen.hpp"
#include "rwre/result_table.hpp"

using namespace rwre;

namespace {

std::map<std::string, std::string> g_csv;  // config name -> CSV produced with one thread

ResultTable run_named(const std::string& name, int threads = 1) {
    const auto cfg = ExperimentConfig::load(std::string(RWRE_CONFIG_DIR) + "/" + name + ".cfg");
    auto table = run_experiment(cfg, threads);
    if (threads == 1) g_csv[name] = table.to_csv();
    return table;
}

double summary(const ResultTable& t, const std::string& key) {
    const std::string v = t.meta("summary." + key, "nan");
    return v == "nan" ? std::nan("") : std::stod(v);
}

struct Outcome {
    bool pass = false;
    std::string detail;
};

int g_failures = 0;

void criterion(int id, const std::string& title, double budget_s, const std::function<Outcome()>& body) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
        o = body();
    } catch (const std::exception& e) {
        o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const bool in_time = secs < budget_s;
    const bool pass = o.pass && in_time;
    if (!pass) ++g_failures;
    std::printf("[%s] criterion %2d: %s | %s | %.2fs (budget %.0fs%s)\n", pass ? "PASS" : "FAIL", id, title.c_str(),
                o.detail.c_str(), secs, budget_s, in_time ? "" : ", exceeded");
    std::fflush(stdout);
}

std::string fmt(const char* f, double a, double b = 0, double c = 0, double d = 0) {
    char buf[256];
    std::snprintf(buf, sizeof buf, f, a, b, c, d);
    return buf;
}

}  // namespace

int main() {
    criterion(1, "f_0 = 1 and constant-environment f_n = 1 (n <= 64, d = 2)", 1.0, [] {
        const auto t = run_named("fn_constant");
        const auto f = t.column("f_n");
        const double dev = summary(t, "max_abs_deviation");
        const bool ok = f.size() == 65 && f[0] == 1.0 && dev <= 1e-12;
        return Outcome{ok, fmt("f_0 = %.17g, max |f_n - 1| = %.3g", f[0], dev)};
    });

    criterion(2, "E_P[f_n] = 1 within 4 SE (200 envs, n = 32, d = 2)", 60.0, [] {
        const auto t = run_named("fn_identity");
        const double m = summary(t, "mean"), se = summary(t, "se");
        return Outcome{std::abs(m - 1.0) <= 4.0 * se && t.rows().size() == 200,
                       fmt("mean = %.5f, se = %.5f, z = %.2f", m, se, (m - 1.0) / se)};
    });

    criterion(3, "torus L = 5: residual, positivity, (f_n + f_{n+1})/2 vs L^2 pi(0) at n = 500", 10.0, [] {
        const auto t = run_named("torus");
        const double res = summary(t, "residual"), mn = summary(t, "min_pi"), gap = summary(t, "gap_at_n");
        const bool at500 = t.rows().back()[0] == 500.0;
        return Outcome{res <= 1e-10 && mn > 0.0 && gap <= 1e-6 && at500,
                       fmt("residual = %.3g, min pi = %.4g, gap = %.3g", res, mn, gap)};
    });

    criterion(4, "regeneration detector == O(N^2) oracle (1000 paths x 2000 steps, d = 2,3, mixed laws)", 60.0, [] {
        std::size_t paths = 0, mismatches = 0, candidates = 0;
        for (const char* name : {"regen_d2_drift", "regen_d3_drift", "regen_d2_dirichlet", "regen_d3_mixture"}) {
            const auto cfg = ExperimentConfig::load(std::string(RWRE_CONFIG_DIR) + "/" + name + ".cfg");
            const auto t = run_named(name);
            const auto counts = t.column("candidates");
            const auto law = cfg.law();
            const auto steps = static_cast<std::uint64_t>(cfg.integer("run.steps"));
            const Site dir{{1, 0, 0}};
            for (std::size_t i = 0; i < counts.size(); ++i) {
                const auto traj = regen_trajectory(law, steps, i, cfg.seed());
                if (traj.length() != steps) ++mismatches;
                const auto fast = find_regenerations(traj, dir).candidates;
                const auto slow = oracle::regeneration_candidates(oracle::heights(traj, dir));
                if (fast != slow || counts[i] != static_cast<double>(slow.size())) ++mismatches;
                candidates += slow.size();
                ++paths;
            }
        }
        return Outcome{paths == 1000 && mismatches == 0,
                       fmt("%.0f paths, %.0f candidate times, %.0f mismatches", static_cast<double>(paths),
                           static_cast<double>(candidates), static_cast<double>(mismatches))};
    });

    criterion(5, "ballisticity: 99% CI of v.e1 excludes 0 (delta = 0.2, d = 2, 200 x 10^4)", 60.0, [] {
        const auto t = run_named("velocity");
        const double lo = summary(t, "ci_low.v1"), hi = summary(t, "ci_high.v1");
        return Outcome{lo > 0.0 || hi < 0.0, fmt("v1 = %.5f, 99%% CI [%.5f, %.5f]", summary(t, "mean.v1"), lo, hi)};
    });

    criterion(6, "backtracking: ln P vs L linear, slope < 0, R^2 >= 0.9 (L = 5..25)", 300.0, [] {
        const auto t = run_named("condt");
        const double slope = summary(t, "log_p.slope"), r2 = summary(t, "log_p.r2");
        bool enough = true;
        for (double n : t.column("trials")) enough = enough && n >= 1e4;
        const bool all_points = summary(t, "log_p.points") == 5.0;
        return Outcome{slope < 0.0 && r2 >= 0.9 && enough && all_points,
                       fmt("slope = %.4f, R^2 = %.4f", slope, r2)};
    });

    criterion(7, "annealed kernel decay slope in [-1.3, -0.7] (50 envs, n = 16..128, d = 2)", 120.0, [] {
        const auto t = run_named("kernel_decay");
        const double slope = summary(t, "decay.slope");
        return Outcome{slope >= -1.3 && slope <= -0.7, fmt("slope = %.4f, R^2 = %.4f", slope, summary(t, "decay.r2"))};
    });

    criterion(8, "local CLT: TV(400) < TV(50) and TV(400) < 0.15 (ballistic law, d = 2)", 300.0, [] {
        const auto t = run_named("clt");
        const auto n = t.column("n");
        const auto tv = t.column("tv");
        double tv50 = std::nan(""), tv400 = std::nan("");
        for (std::size_t i = 0; i < n.size(); ++i) {
            if (n[i] == 50) tv50 = tv[i];
            if (n[i] == 400) tv400 = tv[i];
        }
        return Outcome{tv400 < tv50 && tv400 < 0.15, fmt("TV(50) = %.5f, TV(400) = %.5f", tv50, tv400)};
    });

    criterion(9, "intersections: d = 3 strong drift slope <= 0.5; d = 1 symmetric control slope >= 0.8", 600.0, [] {
        const auto d3 = run_named("intersect_d3");
        const auto d1 = run_named("intersect_d1");
        const double s3 = summary(d3, "median.slope"), s1 = summary(d1, "median.slope");
        return Outcome{s3 <= 0.5 && s1 >= 0.8, fmt("d=3 slope = %.4f, d=1 slope = %.4f", s3, s1)};
    });

    criterion(10, "traps: log mean escape vs L slope > 0, R^2 >= 0.9; log P(E_L) vs |Delta| R^2 >= 0.95", 600.0, [] {
        const auto esc = run_named("trap_escape");
        const auto prob = run_named("trap_probability");
        const double s = summary(esc, "log_mean.slope"), r2 = summary(esc, "log_mean.r2");
        const double pr2 = summary(prob, "log_prob.r2");
        const bool uncensored = summary(esc, "censored_sizes") == 0.0;
        return Outcome{s > 0.0 && r2 >= 0.9 && pr2 >= 0.95 && uncensored,
                       fmt("escape slope = %.4f (R^2 %.4f), probability R^2 = %.6f, slope = %.4f", s, r2, pr2,
                           summary(prob, "log_prob.slope"))};
    });

    criterion(11, "one-step supermartingale at every planted-trap site with calibrated (c2, c3)", 1.0, [] {
        const auto t = run_named("supermartingale");
        const double passed = summary(t, "passed"), sites = summary(t, "sites");
        bool every = true;
        for (double ok : t.column("ok")) every = every && ok == 1.0;
        return Outcome{passed == 1.0 && every && sites > 0,
                       fmt("c2 = %.4g, c3 = %.4g, %.0f sites, max ratio = %.6f", summary(t, "c2"), summary(t, "c3"),
                           sites, summary(t, "max_ratio"))};
    });

    criterion(12, "determinism: criteria 1-11 rerun with 8 threads give byte-identical CSVs", 1800.0, [] {
        std::size_t same = 0;
        std::string differing;
        for (const auto& [name, csv] : g_csv) {
            if (run_named(name, 8).to_csv() == csv) {
                ++same;
            } else {
                differing += " " + name;
            }
        }
        return Outcome{same == g_csv.size() && same > 0,
                       fmt("%.0f of %.0f CSVs identical", static_cast<double>(same),
                           static_cast<double>(g_csv.size())) +
                           differing};
    });

    std::printf("%d criteria failed\n", g_failures);
    return g_failures == 0 ? 0 : 1;
}
