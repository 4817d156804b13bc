#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "rwre/environment.hpp"

namespace rwre {

// line == 0 when the problem is not tied to a line of the input.
class ConfigError : public std::runtime_error {
public:
    ConfigError(const std::string& source, std::size_t line, const std::string& message);
    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

enum class ValueType { text, integer, unsigned_integer, real, real_list, integer_list, atom_list };

struct KeySpec {
    std::string_view key;
    ValueType type;
};

// Every accepted key with its value type.
const std::vector<KeySpec>& config_keys();

// Experiment kinds, in CLI order.
const std::vector<std::string>& experiment_kinds();

// Flat "key = value" text with dotted namespaces; '#' starts a comment line.
// Values are kept as trimmed text after validation, so serialize() followed
// by parse() gives back the same map.
class ExperimentConfig {
public:
    static ExperimentConfig parse(std::string_view text, const std::string& source = "<config>");
    static ExperimentConfig load(const std::filesystem::path& path);

    // Sorted "key = value" lines.
    std::string serialize() const;

    const std::map<std::string, std::string>& values() const noexcept { return values_; }
    bool has(const std::string& key) const { return values_.count(key) != 0; }

    // Validates key and value like parse() does.
    void set(const std::string& key, const std::string& value);

    std::string kind() const;
    std::uint64_t seed() const;
    std::optional<std::string> output_path() const;

    std::string text(const std::string& key, const std::string& fallback) const;
    std::int64_t integer(const std::string& key) const;
    std::int64_t integer(const std::string& key, std::int64_t fallback) const;
    std::uint64_t unsigned_integer(const std::string& key) const;
    double real(const std::string& key) const;
    double real(const std::string& key, double fallback) const;
    std::vector<double> reals(const std::string& key) const;
    std::vector<std::int64_t> integers(const std::string& key) const;

    // Builds and validates the law described by the law.* keys.
    EnvironmentLaw law() const;

    bool operator==(const ExperimentConfig& other) const { return values_ == other.values_; }

private:
    const std::string& require(const std::string& key) const;

    std::map<std::string, std::string> values_;
    std::string source_ = "<config>";
};

// Inverse of ExperimentConfig::law(); shortest round-trip numbers.
std::map<std::string, std::string> law_to_values(const EnvironmentLaw& law);

}  // namespace rwre
