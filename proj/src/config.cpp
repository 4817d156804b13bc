#include "rwre/config.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <sstream>

#include "rwre/result_table.hpp"

namespace rwre {

namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

std::vector<std::string_view> split(std::string_view s, char sep) {
    std::vector<std::string_view> out;
    for (;;) {
        const auto pos = s.find(sep);
        out.push_back(trim(s.substr(0, pos)));
        if (pos == std::string_view::npos) break;
        s.remove_prefix(pos + 1);
    }
    return out;
}

template <class T>
std::optional<T> parse_number(std::string_view s) {
    T value{};
    if (s.empty()) return std::nullopt;
    if (s.front() == '+') s.remove_prefix(1);
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
    if (ec != std::errc{} || ptr != s.data() + s.size()) return std::nullopt;
    return value;
}

std::optional<std::vector<double>> parse_reals(std::string_view s) {
    std::vector<double> out;
    for (auto part : split(s, ',')) {
        auto v = parse_number<double>(part);
        if (!v) return std::nullopt;
        out.push_back(*v);
    }
    return out;
}

std::optional<std::vector<std::int64_t>> parse_integers(std::string_view s) {
    std::vector<std::int64_t> out;
    for (auto part : split(s, ',')) {
        auto v = parse_number<std::int64_t>(part);
        if (!v) return std::nullopt;
        out.push_back(*v);
    }
    return out;
}

const char* type_name(ValueType t) {
    switch (t) {
        case ValueType::text: return "text";
        case ValueType::integer: return "integer";
        case ValueType::unsigned_integer: return "unsigned integer";
        case ValueType::real: return "number";
        case ValueType::real_list: return "comma-separated numbers";
        case ValueType::integer_list: return "comma-separated integers";
        case ValueType::atom_list: return "';'-separated groups of comma-separated numbers";
    }
    return "?";
}

bool value_ok(ValueType t, std::string_view v) {
    switch (t) {
        case ValueType::text: return !v.empty();
        case ValueType::integer: return parse_number<std::int64_t>(v).has_value();
        case ValueType::unsigned_integer: return parse_number<std::uint64_t>(v).has_value();
        case ValueType::real: return parse_number<double>(v).has_value();
        case ValueType::real_list: return parse_reals(v).has_value();
        case ValueType::integer_list: return parse_integers(v).has_value();
        case ValueType::atom_list:
            for (auto group : split(v, ';')) {
                if (!parse_reals(group)) return false;
            }
            return true;
    }
    return false;
}

const KeySpec* find_key(std::string_view key) {
    for (const auto& spec : config_keys()) {
        if (spec.key == key) return &spec;
    }
    return nullptr;
}

std::string join_reals(const std::vector<double>& xs) {
    std::string out;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        if (i) out += ", ";
        out += format_number(xs[i]);
    }
    return out;
}

}  // namespace

ConfigError::ConfigError(const std::string& source, std::size_t line, const std::string& message)
    : std::runtime_error(line ? source + ":" + std::to_string(line) + ": " + message : source + ": " + message),
      line_(line) {}

const std::vector<KeySpec>& config_keys() {
    static const std::vector<KeySpec> keys = {
        {"experiment", ValueType::text},
        {"seed", ValueType::unsigned_integer},
        {"output.path", ValueType::text},
        {"law.kind", ValueType::text},
        {"law.dim", ValueType::integer},
        {"law.kappa", ValueType::real},
        {"law.delta", ValueType::real},
        {"law.axis", ValueType::integer},
        {"law.alpha", ValueType::real_list},
        {"law.weights", ValueType::real_list},
        {"law.atoms", ValueType::atom_list},
        {"run.mode", ValueType::text},
        {"run.trials", ValueType::integer},
        {"run.trials_per_level", ValueType::integer_list},
        {"run.steps", ValueType::integer},
        {"run.levels", ValueType::integer_list},
        {"run.direction", ValueType::integer_list},
        {"run.horizon", ValueType::integer},
        {"run.horizon_factor", ValueType::real},
        {"run.speed", ValueType::real},
        {"run.guard", ValueType::integer},
        {"run.u_grid", ValueType::real_list},
        {"run.n", ValueType::integer},
        {"run.n_grid", ValueType::integer_list},
        {"run.envs", ValueType::integer},
        {"run.pairs", ValueType::integer},
        {"run.side", ValueType::integer},
        {"run.sizes", ValueType::integer_list},
        {"run.c1", ValueType::real},
        {"run.c1_relaxed", ValueType::real},
        {"run.c2", ValueType::real},
        {"run.c3", ValueType::real},
        {"run.net_size", ValueType::integer},
        {"run.law_samples", ValueType::integer},
        {"run.N", ValueType::integer},
        {"run.width_index", ValueType::integer},
        {"run.cell_size", ValueType::real},
        {"run.confidence", ValueType::real},
    };
    return keys;
}

const std::vector<std::string>& experiment_kinds() {
    static const std::vector<std::string> kinds = {"condt", "velocity", "regen",  "intersect", "fn_tail",
                                                   "torus", "trap",     "clt",    "exit_stats"};
    return kinds;
}

ExperimentConfig ExperimentConfig::parse(std::string_view text, const std::string& source) {
    ExperimentConfig cfg;
    cfg.source_ = source;
    std::size_t line_no = 0;
    while (!text.empty()) {
        ++line_no;
        const auto eol = text.find('\n');
        std::string_view line = trim(text.substr(0, eol));
        text.remove_prefix(eol == std::string_view::npos ? text.size() : eol + 1);
        if (line.empty() || line.front() == '#') continue;

        const auto eq = line.find('=');
        if (eq == std::string_view::npos) throw ConfigError(source, line_no, "expected 'key = value'");
        const std::string key(trim(line.substr(0, eq)));
        const std::string value(trim(line.substr(eq + 1)));
        const KeySpec* spec = find_key(key);
        if (!spec) throw ConfigError(source, line_no, "unknown key '" + key + "'");
        if (cfg.values_.count(key)) throw ConfigError(source, line_no, "duplicate key '" + key + "'");
        if (!value_ok(spec->type, value)) {
            throw ConfigError(source, line_no, "key '" + key + "' expects " + type_name(spec->type) + ", got '" +
                                                   value + "'");
        }
        if (key == "experiment" &&
            std::find(experiment_kinds().begin(), experiment_kinds().end(), value) == experiment_kinds().end()) {
            throw ConfigError(source, line_no, "unknown experiment kind '" + value + "'");
        }
        cfg.values_[key] = value;
    }
    return cfg;
}

ExperimentConfig ExperimentConfig::load(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError(path.string(), 0, "cannot open config file");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse(buf.str(), path.string());
}

std::string ExperimentConfig::serialize() const {
    std::string out;
    for (const auto& [k, v] : values_) out += k + " = " + v + "\n";
    return out;
}

void ExperimentConfig::set(const std::string& key, const std::string& value) {
    // Reuse the parser so the checks stay in one place.
    ExperimentConfig one = parse(key + " = " + value, source_);
    values_[key] = one.values_.at(key);
}

const std::string& ExperimentConfig::require(const std::string& key) const {
    auto it = values_.find(key);
    if (it == values_.end()) throw ConfigError(source_, 0, "missing required key '" + key + "'");
    return it->second;
}

std::string ExperimentConfig::kind() const { return require("experiment"); }

std::uint64_t ExperimentConfig::seed() const {
    return has("seed") ? *parse_number<std::uint64_t>(values_.at("seed")) : 0;
}

std::optional<std::string> ExperimentConfig::output_path() const {
    if (!has("output.path")) return std::nullopt;
    return values_.at("output.path");
}

std::string ExperimentConfig::text(const std::string& key, const std::string& fallback) const {
    return has(key) ? values_.at(key) : fallback;
}

std::int64_t ExperimentConfig::integer(const std::string& key) const {
    return *parse_number<std::int64_t>(require(key));
}

std::int64_t ExperimentConfig::integer(const std::string& key, std::int64_t fallback) const {
    return has(key) ? integer(key) : fallback;
}

std::uint64_t ExperimentConfig::unsigned_integer(const std::string& key) const {
    auto v = parse_number<std::uint64_t>(require(key));
    if (!v) throw ConfigError(source_, 0, "key '" + key + "' must be a nonnegative integer");
    return *v;
}

double ExperimentConfig::real(const std::string& key) const { return *parse_number<double>(require(key)); }

double ExperimentConfig::real(const std::string& key, double fallback) const {
    return has(key) ? real(key) : fallback;
}

std::vector<double> ExperimentConfig::reals(const std::string& key) const { return *parse_reals(require(key)); }

std::vector<std::int64_t> ExperimentConfig::integers(const std::string& key) const {
    return *parse_integers(require(key));
}

EnvironmentLaw ExperimentConfig::law() const {
    const std::string k = require("law.kind");
    try {
        if (k == "uniform") return EnvironmentLaw::uniform(static_cast<int>(integer("law.dim")));
        if (k == "drift-perturbed") {
            const int dim = static_cast<int>(integer("law.dim"));
            return EnvironmentLaw::drift_perturbed(dim, real("law.delta"), static_cast<int>(integer("law.axis", 0)),
                                                   real("law.kappa", default_kappa(dim)));
        }
        if (k == "truncated-dirichlet") {
            auto alpha = reals("law.alpha");
            const int dim = static_cast<int>(alpha.size() / 2);
            const double kappa = real("law.kappa", valid_dim(dim) ? default_kappa(dim) : 0.0);
            return EnvironmentLaw::truncated_dirichlet(std::move(alpha), kappa);
        }
        if (k == "mixture") {
            std::vector<SiteDistribution> atoms;
            for (auto group : split(require("law.atoms"), ';')) {
                const auto w = *parse_reals(group);
                atoms.push_back(make_site_dist(w));
            }
            std::vector<double> weights = has("law.weights") ? reals("law.weights") : std::vector<double>{};
            if (weights.empty()) weights.assign(atoms.size(), 1.0);
            return EnvironmentLaw::mixture(std::move(weights), std::move(atoms));
        }
    } catch (const ConfigError&) {
        throw;
    } catch (const std::invalid_argument& e) {
        throw ConfigError(source_, 0, std::string("invalid law: ") + e.what());
    }
    throw ConfigError(source_, 0, "unknown law.kind '" + k + "'");
}

std::map<std::string, std::string> law_to_values(const EnvironmentLaw& law) {
    std::map<std::string, std::string> out;
    out["law.kind"] = kind_name(law.kind);
    switch (law.kind) {
        case EnvironmentLaw::Kind::uniform:
            out["law.dim"] = std::to_string(law.dim);
            break;
        case EnvironmentLaw::Kind::drift_perturbed:
            out["law.dim"] = std::to_string(law.dim);
            out["law.delta"] = format_number(law.delta);
            out["law.axis"] = std::to_string(law.axis);
            out["law.kappa"] = format_number(law.kappa);
            break;
        case EnvironmentLaw::Kind::truncated_dirichlet:
            out["law.alpha"] = join_reals(law.alpha);
            out["law.kappa"] = format_number(law.kappa);
            break;
        case EnvironmentLaw::Kind::mixture: {
            std::string atoms;
            for (std::size_t i = 0; i < law.atoms.size(); ++i) {
                if (i) atoms += "; ";
                const auto& a = law.atoms[i];
                atoms += join_reals(std::vector<double>(a.probs.begin(), a.probs.begin() + num_steps(a.dim)));
            }
            out["law.atoms"] = atoms;
            out["law.weights"] = join_reals(law.weights);
            break;
        }
    }
    return out;
}

}  // namespace rwre
