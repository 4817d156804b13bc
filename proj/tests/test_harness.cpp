#include <doctest.h>

#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>

#include "rwre/config.hpp"
#include "rwre/env_window.hpp"
#include "rwre/experiments.hpp"
#include "rwre/result_table.hpp"

using namespace rwre;
namespace fs = std::filesystem;

namespace {

const char* kVelocity = R"(# minimal
experiment = velocity
law.kind = drift-perturbed
law.dim = 2
law.delta = 0.2
run.steps = 200
run.trials = 10
seed = 3
)";

fs::path temp_file(const std::string& name) { return fs::temp_directory_path() / ("rwre_test_" + name); }

}  // namespace

TEST_CASE("config parses, serializes and round-trips") {
    const auto cfg = ExperimentConfig::parse(kVelocity);
    CHECK(cfg.kind() == "velocity");
    CHECK(cfg.seed() == 3);
    CHECK(cfg.integer("run.steps") == 200);
    CHECK(cfg.real("law.delta") == 0.2);
    CHECK(ExperimentConfig::parse(cfg.serialize()) == cfg);
    CHECK(ExperimentConfig::parse(cfg.serialize()).serialize() == cfg.serialize());
}

TEST_CASE("every shipped config round-trips") {
    int seen = 0;
    for (const auto& entry : fs::directory_iterator(RWRE_CONFIG_DIR)) {
        if (entry.path().extension() != ".cfg") continue;
        const auto cfg = ExperimentConfig::load(entry.path());
        CHECK(ExperimentConfig::parse(cfg.serialize()) == cfg);
        CHECK_NOTHROW(cfg.law());
        ++seen;
    }
    CHECK(seen >= 10);
}

TEST_CASE("config errors name the key and line") {
    try {
        ExperimentConfig::parse("law.kind = uniform\n\nlaw.dimm = 2\n", "x.cfg");
        FAIL("expected an error");
    } catch (const ConfigError& e) {
        CHECK(e.line() == 3);
        CHECK(std::string(e.what()).find("law.dimm") != std::string::npos);
        CHECK(std::string(e.what()).find("x.cfg:3") != std::string::npos);
    }
    CHECK_THROWS_AS(ExperimentConfig::parse("seed = -1"), ConfigError);
    CHECK_THROWS_AS(ExperimentConfig::parse("run.trials = ten"), ConfigError);
    CHECK_THROWS_AS(ExperimentConfig::parse("run.trials = 1\nrun.trials = 2"), ConfigError);
    CHECK_THROWS_AS(ExperimentConfig::parse("no equals sign"), ConfigError);
    CHECK_THROWS_AS(ExperimentConfig::parse("experiment = bogus"), ConfigError);
    CHECK_THROWS_AS(ExperimentConfig::parse("law.kind = weird\nlaw.dim = 2").law(), ConfigError);
    CHECK_THROWS_AS(ExperimentConfig::parse("law.kind = drift-perturbed\nlaw.dim = 2\nlaw.delta = 3").law(),
                    ConfigError);
}

TEST_CASE("laws survive a trip through config values") {
    const double a[] = {0.4, 0.1, 0.3, 0.2};
    const double b[] = {0.1, 0.4, 0.2, 0.3};
    const std::vector<EnvironmentLaw> laws = {
        EnvironmentLaw::uniform(3),
        EnvironmentLaw::drift_perturbed(2, 0.2, 1, 0.05),
        EnvironmentLaw::truncated_dirichlet({2, 1, 1, 1}, 0.05),
        EnvironmentLaw::two_point(0.3, make_site_dist(a), make_site_dist(b)),
    };
    for (const auto& law : laws) {
        std::string text;
        for (const auto& [k, v] : law_to_values(law)) text += k + " = " + v + "\n";
        const auto back = ExperimentConfig::parse(text).law();
        CHECK(back == law);
    }
}

TEST_CASE("number formatting is shortest round-trip") {
    for (double x : {0.1, 1.0 / 3.0, 1e-300, 123456789.0, -2.5, 5e-324}) {
        const auto s = format_number(x);
        double back = 0;
        std::from_chars(s.data(), s.data() + s.size(), back);
        CHECK(back == x);
    }
    CHECK(format_number(3.0) == "3");
    CHECK(format_number(0.1) == "0.1");
    CHECK(format_number(-0.0) == "0");
    CHECK(format_number(std::numeric_limits<double>::quiet_NaN()) == "nan");
    CHECK(format_number(-std::numeric_limits<double>::infinity()) == "-inf");
}

TEST_CASE("git blob hash") {
    CHECK(git_blob_hash("") == "e69de29bb2d1d6434b8b29ae775ad8c2e48c5391");
    CHECK(git_blob_hash("hello\n") == "ce013625030ba8dba906f756967f9e9ca394464a");
}

TEST_CASE("result table columns must be unique") {
    CHECK_THROWS(ResultTable({"a", "b", "a"}));
    CHECK_THROWS(ResultTable({"a,b"}));
    ResultTable t({"x", "y"});
    CHECK_THROWS(t.add_row({1.0}));
}

TEST_CASE("result table CSV round trip") {
    ResultTable t({"x", "y"});
    t.set_meta("note", "a = b");
    t.set_summary("s", 0.25);
    t.add_row({1, 0.1});
    t.add_row({2, std::numeric_limits<double>::quiet_NaN()});
    const auto back = ResultTable::parse_csv(t.to_csv());
    CHECK(back.columns() == t.columns());
    CHECK(back.meta("note") == "a = b");
    CHECK(back.meta("summary.s") == "0.25");
    CHECK(back.to_csv() == t.to_csv());
    CHECK_THROWS_AS(ResultTable::parse_csv("x,y\n1,2,3\n"), CsvError);
    CHECK_THROWS_AS(ResultTable::parse_csv("x,y\n1,abc\n"), CsvError);
    CHECK_THROWS_AS(ResultTable::parse_csv("# only = meta\n"), CsvError);
}

TEST_CASE("velocity smoke run") {
    const auto t = run_experiment(ExperimentConfig::parse(kVelocity));
    CHECK(t.columns() == std::vector<std::string>{"trial", "x1/n", "x2/n"});
    CHECK(t.rows().size() == 10);
    CHECK(t.meta("tool") == std::string(kToolVersion));
    CHECK(t.meta("config_hash") == git_blob_hash(ExperimentConfig::parse(kVelocity).serialize()));
    CHECK(t.meta("config.run.trials") == "10");
}

TEST_CASE("same config twice gives identical bytes, for any thread count") {
    const auto cfg = ExperimentConfig::parse(kVelocity);
    const auto a = run_experiment(cfg, 1).to_csv();
    CHECK(run_experiment(cfg, 1).to_csv() == a);
    CHECK(run_experiment(cfg, 4).to_csv() == a);
    auto other = cfg;
    other.set("seed", "4");
    CHECK(run_experiment(other, 1).to_csv() != a);
}

TEST_CASE("replay check compares bytes") {
    const auto cfg = ExperimentConfig::parse(kVelocity);
    const auto p1 = temp_file("a.csv"), p2 = temp_file("b.csv"), p3 = temp_file("c.csv");
    run_experiment(cfg, 1).write(p1);
    run_experiment(cfg, 3).write(p2);
    CHECK(replay_check(p1, p2));
    {
        std::ofstream(p3) << "different\n";
    }
    CHECK_FALSE(replay_check(p1, p3));
    fs::remove(p1);
    fs::remove(p2);
    fs::remove(p3);
}

TEST_CASE("summarize recovers a synthetic slope") {
    ResultTable t({"x", "y"});
    SplitMix64 g(1);
    for (int i = 0; i < 200; ++i) {
        const double x = i / 10.0;
        t.add_row({x, 2.0 * x + 1.0 + (g.uniform() - 0.5) * 0.2});
    }
    const auto fits = summarize(t);
    REQUIRE(fits.size() == 1);
    CHECK(fits[0].fit.slope == doctest::Approx(2.0).epsilon(0.01));
    CHECK(fits[0].ci_low < 2.0);
    CHECK(fits[0].ci_high > 2.0);
    CHECK(fits[0].fit.r2 > 0.99);
}

TEST_CASE("summarize follows fit requests and rejects empty tables") {
    ResultTable t({"a", "b", "c"});
    t.set_meta("fit.bc", "b c");
    t.add_row({0, 1, 3});
    t.add_row({0, 2, 6});
    t.add_row({0, 3, -std::numeric_limits<double>::infinity()});
    const auto fits = summarize(t);
    REQUIRE(fits.size() == 1);
    CHECK(fits[0].fit.slope == doctest::Approx(3.0));
    CHECK(fits[0].fit.n == 2);
    CHECK_THROWS_AS(summarize(ResultTable({"x", "y"})), CsvError);
}

TEST_CASE("experiments reject bad settings with a config error") {
    auto cfg = ExperimentConfig::parse(kVelocity);
    cfg.set("run.trials", "0");
    CHECK_THROWS_AS(run_experiment(cfg), ConfigError);
    CHECK_THROWS_AS(run_experiment(ExperimentConfig::parse("law.kind = uniform\nlaw.dim = 2")), ConfigError);
    // Condition (T) on a driftless law needs an explicit horizon.
    CHECK_THROWS_AS(run_experiment(ExperimentConfig::parse(
                        "experiment = condt\nlaw.kind = uniform\nlaw.dim = 2\nrun.levels = 2\nrun.trials = 5")),
                    ConfigError);
}

TEST_CASE("oversized kernels trip the resource guard") {
    const auto cfg = ExperimentConfig::parse(
        "experiment = clt\nlaw.kind = uniform\nlaw.dim = 3\nrun.n_grid = 2000\nrun.envs = 1\n");
    CHECK_THROWS_AS(run_experiment(cfg), ResourceGuardError);
}

TEST_CASE("each experiment kind runs on a small config") {
    const std::vector<std::string> configs = {
        "experiment = condt\nlaw.kind = drift-perturbed\nlaw.dim = 2\nlaw.delta = 0.2\nrun.levels = 2, 4\n"
        "run.trials = 50\n",
        "experiment = regen\nlaw.kind = drift-perturbed\nlaw.dim = 2\nlaw.delta = 0.3\nrun.steps = 500\n"
        "run.trials = 5\nrun.u_grid = 3, 10, 30\n",
        "experiment = intersect\nlaw.kind = drift-perturbed\nlaw.dim = 3\nlaw.delta = 0.6\nlaw.kappa = 0.02\n"
        "run.n_grid = 2, 4, 8, 16\nrun.envs = 2\nrun.pairs = 2\n",
        "experiment = fn_tail\nlaw.kind = drift-perturbed\nlaw.dim = 2\nlaw.delta = 0.2\nrun.n = 8\nrun.envs = 4\n"
        "run.u_grid = 1, 2\n",
        "experiment = torus\nlaw.kind = uniform\nlaw.dim = 2\nrun.side = 3\nrun.n = 10\n",
        "experiment = trap\nlaw.kind = drift-perturbed\nlaw.dim = 2\nlaw.delta = 0.2\nrun.sizes = 2, 3\n"
        "run.c1 = 0.2\nrun.trials = 5\nrun.horizon = 10000\n",
        "experiment = trap\nlaw.kind = drift-perturbed\nlaw.dim = 2\nlaw.delta = 0.2\nrun.mode = probability\n"
        "run.sizes = 2, 3\nrun.c1 = 0.2\nrun.c1_relaxed = 0.05\nrun.law_samples = 1000\n",
        "experiment = clt\nlaw.kind = uniform\nlaw.dim = 2\nrun.n_grid = 4, 8\nrun.envs = 1\n",
        "experiment = exit_stats\nlaw.kind = drift-perturbed\nlaw.dim = 2\nlaw.delta = 0.3\nrun.N = 3\n"
        "run.trials = 20\n",
    };
    for (const auto& text : configs) {
        CAPTURE(text);
        const auto t = run_experiment(ExperimentConfig::parse(text), 2);
        CHECK(!t.rows().empty());
        CHECK(ResultTable::parse_csv(t.to_csv()).to_csv() == t.to_csv());
    }
}
