#pragma once

#include <filesystem>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "rwre/stats.hpp"

namespace rwre {

inline constexpr std::string_view kToolVersion = "rwre 0.1.0";

class CsvError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Shortest decimal that reads back to the same double; "nan", "inf", "-inf".
std::string format_number(double x);

// Hex SHA-1 of "blob <size>\0" + content, as git hash-object computes it.
std::string git_blob_hash(std::string_view content);

// Numeric table with a '#'-prefixed metadata header. Metadata keeps
// insertion order; rows keep the order they were added in.
class ResultTable {
public:
    ResultTable() = default;
    explicit ResultTable(std::vector<std::string> columns);

    const std::vector<std::string>& columns() const noexcept { return columns_; }
    const std::vector<std::vector<double>>& rows() const noexcept { return rows_; }
    const std::vector<std::pair<std::string, std::string>>& metadata() const noexcept { return meta_; }

    void add_row(std::vector<double> row);
    void set_meta(const std::string& key, const std::string& value);
    void set_summary(const std::string& name, double value);
    std::string meta(const std::string& key, const std::string& fallback = "") const;
    std::size_t column_index(const std::string& name) const;
    std::vector<double> column(const std::string& name) const;

    std::string to_csv() const;
    void write(const std::filesystem::path& path) const;

    static ResultTable parse_csv(std::string_view text);
    static ResultTable read(const std::filesystem::path& path);

private:
    std::vector<std::string> columns_;
    std::vector<std::vector<double>> rows_;
    std::vector<std::pair<std::string, std::string>> meta_;
};

bool replay_check(const std::filesystem::path& a, const std::filesystem::path& b);

struct FitSummary {
    std::string name;
    std::string x_column;
    std::string y_column;
    LineFit fit;
    double ci_low = 0.0;  // slope +- z se at the requested confidence
    double ci_high = 0.0;
};

// Least-squares fits requested by "fit.<name> = <x column> <y column>"
// metadata lines; without any, the last column against the first. Rows with
// a non-finite x or y are skipped. Throws CsvError on an empty table.
std::vector<FitSummary> summarize(const ResultTable& table, double confidence = 0.95);

}  // namespace rwre
