// Command line front end: one subcommand per experiment kind, plus
// replay-check and summarize.
#include <chrono>
#include <cstdio>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "rwre/config.hpp"
#include "rwre/env_window.hpp"
#include "rwre/experiments.hpp"
#include "rwre/result_table.hpp"

namespace {

enum Exit { ok = 0, failure = 1, config_error = 2, guard_error = 3 };

struct RunFlags {
    std::string config;
    std::optional<std::uint64_t> seed;
    int threads = 1;
    std::string out;
};

int run(const std::string& kind, const RunFlags& f) {
    rwre::ExperimentConfig cfg = rwre::ExperimentConfig::load(f.config);
    if (cfg.has("experiment") && cfg.kind() != kind) {
        throw rwre::ConfigError(f.config, 0, "config is for '" + cfg.kind() + "', not '" + kind + "'");
    }
    cfg.set("experiment", kind);
    if (f.seed) cfg.set("seed", std::to_string(*f.seed));

    const auto t0 = std::chrono::steady_clock::now();
    const auto table = rwre::run_experiment(cfg, f.threads);
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

    const std::string out = !f.out.empty() ? f.out : cfg.output_path().value_or("");
    if (out.empty() || out == "-") {
        std::cout << table.to_csv();
    } else {
        table.write(out);
        std::cerr << "wrote " << out << "\n";
    }
    std::cerr << "wall_time_s = " << secs << "\n";
    return ok;
}

int summarize_file(const std::string& path, double confidence) {
    const auto table = rwre::ResultTable::read(path);
    const auto fits = rwre::summarize(table, confidence);
    const std::string kind = table.meta("experiment", "unknown");
    std::cout << "experiment = " << kind << "\n";
    for (const auto& [k, v] : table.metadata()) {
        if (k.rfind("summary.", 0) == 0) std::cout << k << " = " << v << "\n";
    }
    for (const auto& s : fits) {
        std::cout << "fit." << s.name << ": " << s.y_column << " ~ " << s.x_column
                  << "  slope = " << rwre::format_number(s.fit.slope) << "  ci = ["
                  << rwre::format_number(s.ci_low) << ", " << rwre::format_number(s.ci_high)
                  << "]  r2 = " << rwre::format_number(s.fit.r2) << "  points = " << s.fit.n << "\n";
    }
    return ok;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Random walk in random environment experiments"};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string(rwre::kToolVersion));

    RunFlags flags;
    std::string chosen;
    for (const auto& kind : rwre::experiment_kinds()) {
        auto* sub = app.add_subcommand(kind, "run the " + kind + " experiment");
        sub->add_option("--config", flags.config, "config file (key = value lines)")->required();
        sub->add_option("--seed", flags.seed, "master seed, overrides the config");
        sub->add_option("--threads", flags.threads, "worker threads; never changes the output")
            ->check(CLI::PositiveNumber);
        sub->add_option("--out", flags.out, "CSV path, overrides output.path; '-' for stdout");
        sub->callback([&chosen, kind] { chosen = kind; });
    }

    std::string path_a, path_b;
    auto* replay = app.add_subcommand("replay-check", "exit 0 when two files are byte-identical");
    replay->add_option("a", path_a)->required();
    replay->add_option("b", path_b)->required();
    replay->callback([&chosen] { chosen = "replay-check"; });

    std::string csv;
    double confidence = 0.95;
    auto* summ = app.add_subcommand("summarize", "least-squares fits and summaries of a result CSV");
    summ->add_option("csv", csv)->required();
    summ->add_option("--confidence", confidence, "confidence level for slope intervals");
    summ->callback([&chosen] { chosen = "summarize"; });

    CLI11_PARSE(app, argc, argv);

    try {
        if (chosen == "replay-check") {
            const bool same = rwre::replay_check(path_a, path_b);
            std::cout << (same ? "identical" : "different") << "\n";
            return same ? ok : failure;
        }
        if (chosen == "summarize") return summarize_file(csv, confidence);
        return run(chosen, flags);
    } catch (const rwre::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return config_error;
    } catch (const rwre::ResourceGuardError& e) {
        std::cerr << "resource guard exceeded [" << e.guard() << "]: " << e.what() << "\n";
        return guard_error;
    } catch (const rwre::CsvError& e) {
        std::cerr << "malformed CSV: " << e.what() << "\n";
        return failure;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return failure;
    }
}
