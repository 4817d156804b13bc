#include "rwre/result_table.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>

#include <openssl/evp.h>

namespace rwre {

std::string format_number(double x) {
    if (std::isnan(x)) return "nan";
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    if (x == 0.0) return "0";  // drops the sign of -0
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, res.ptr);
}

std::string git_blob_hash(std::string_view content) {
    std::string blob = "blob " + std::to_string(content.size()) + '\0';
    blob.append(content);
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (!EVP_Digest(blob.data(), blob.size(), digest, &len, EVP_sha1(), nullptr)) {
        throw std::runtime_error("sha1 failed");
    }
    static const char* hex = "0123456789abcdef";
    std::string out;
    for (unsigned int i = 0; i < len; ++i) {
        const unsigned char c = digest[i];
        out += hex[c >> 4];
        out += hex[c & 15];
    }
    return out;
}

ResultTable::ResultTable(std::vector<std::string> columns) : columns_(std::move(columns)) {
    std::set<std::string> seen;
    for (const auto& c : columns_) {
        if (c.empty() || c.find_first_of(",\n#") != std::string::npos) {
            throw std::invalid_argument("bad column name '" + c + "'");
        }
        if (!seen.insert(c).second) throw std::invalid_argument("duplicate column name '" + c + "'");
    }
}

void ResultTable::add_row(std::vector<double> row) {
    if (row.size() != columns_.size()) {
        throw std::invalid_argument("row has " + std::to_string(row.size()) + " values for " +
                                    std::to_string(columns_.size()) + " columns");
    }
    rows_.push_back(std::move(row));
}

void ResultTable::set_meta(const std::string& key, const std::string& value) {
    if (key.find(" = ") != std::string::npos || key.find('\n') != std::string::npos ||
        value.find('\n') != std::string::npos) {
        throw std::invalid_argument("metadata must be single-line 'key = value'");
    }
    for (auto& [k, v] : meta_) {
        if (k == key) {
            v = value;
            return;
        }
    }
    meta_.emplace_back(key, value);
}

void ResultTable::set_summary(const std::string& name, double value) { set_meta("summary." + name, format_number(value)); }

std::string ResultTable::meta(const std::string& key, const std::string& fallback) const {
    for (const auto& [k, v] : meta_) {
        if (k == key) return v;
    }
    return fallback;
}

std::size_t ResultTable::column_index(const std::string& name) const {
    for (std::size_t i = 0; i < columns_.size(); ++i) {
        if (columns_[i] == name) return i;
    }
    throw CsvError("no column named '" + name + "'");
}

std::vector<double> ResultTable::column(const std::string& name) const {
    const std::size_t i = column_index(name);
    std::vector<double> out;
    out.reserve(rows_.size());
    for (const auto& r : rows_) out.push_back(r[i]);
    return out;
}

std::string ResultTable::to_csv() const {
    std::string out;
    for (const auto& [k, v] : meta_) out += "# " + k + " = " + v + "\n";
    for (std::size_t i = 0; i < columns_.size(); ++i) {
        if (i) out += ',';
        out += columns_[i];
    }
    out += '\n';
    for (const auto& r : rows_) {
        for (std::size_t i = 0; i < r.size(); ++i) {
            if (i) out += ',';
            out += format_number(r[i]);
        }
        out += '\n';
    }
    return out;
}

void ResultTable::write(const std::filesystem::path& path) const {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    const std::string text = to_csv();
    out.write(text.data(), static_cast<std::streamsize>(text.size()));
    if (!out) throw std::runtime_error("write failed for " + path.string());
}

namespace {

double parse_cell(std::string_view s, std::size_t line) {
    if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
    if (s == "inf") return std::numeric_limits<double>::infinity();
    if (s == "-inf") return -std::numeric_limits<double>::infinity();
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (s.empty() || ec != std::errc{} || ptr != s.data() + s.size()) {
        throw CsvError("line " + std::to_string(line) + ": not a number: '" + std::string(s) + "'");
    }
    return v;
}

}  // namespace

ResultTable ResultTable::parse_csv(std::string_view text) {
    ResultTable table;
    bool have_header = false;
    std::size_t line_no = 0;
    while (!text.empty()) {
        ++line_no;
        const auto eol = text.find('\n');
        std::string_view line = text.substr(0, eol);
        text.remove_prefix(eol == std::string_view::npos ? text.size() : eol + 1);
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        if (line.empty()) continue;
        if (line.front() == '#') {
            if (have_header) throw CsvError("line " + std::to_string(line_no) + ": metadata after header");
            line.remove_prefix(1);
            if (!line.empty() && line.front() == ' ') line.remove_prefix(1);
            const auto eq = line.find(" = ");
            if (eq == std::string_view::npos) {
                throw CsvError("line " + std::to_string(line_no) + ": metadata without ' = '");
            }
            table.meta_.emplace_back(std::string(line.substr(0, eq)), std::string(line.substr(eq + 3)));
            continue;
        }
        std::vector<std::string_view> cells;
        for (;;) {
            const auto comma = line.find(',');
            cells.push_back(line.substr(0, comma));
            if (comma == std::string_view::npos) break;
            line.remove_prefix(comma + 1);
        }
        if (!have_header) {
            std::vector<std::string> names(cells.begin(), cells.end());
            try {
                ResultTable shaped(std::move(names));
                table.columns_ = shaped.columns_;
            } catch (const std::invalid_argument& e) {
                throw CsvError("line " + std::to_string(line_no) + ": " + e.what());
            }
            have_header = true;
            continue;
        }
        if (cells.size() != table.columns_.size()) {
            throw CsvError("line " + std::to_string(line_no) + ": expected " + std::to_string(table.columns_.size()) +
                           " cells, got " + std::to_string(cells.size()));
        }
        std::vector<double> row;
        for (auto c : cells) row.push_back(parse_cell(c, line_no));
        table.rows_.push_back(std::move(row));
    }
    if (!have_header) throw CsvError("no header line");
    return table;
}

ResultTable ResultTable::read(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw CsvError("cannot open " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_csv(buf.str());
}

bool replay_check(const std::filesystem::path& a, const std::filesystem::path& b) {
    auto slurp = [](const std::filesystem::path& p) {
        std::ifstream in(p, std::ios::binary);
        if (!in) throw std::runtime_error("cannot open " + p.string());
        std::ostringstream buf;
        buf << in.rdbuf();
        return buf.str();
    };
    return slurp(a) == slurp(b);
}

std::vector<FitSummary> summarize(const ResultTable& table, double confidence) {
    if (table.rows().empty()) throw CsvError("empty table: nothing to summarize");

    std::vector<std::pair<std::string, std::pair<std::string, std::string>>> requests;
    for (const auto& [k, v] : table.metadata()) {
        if (k.rfind("fit.", 0) != 0) continue;
        std::istringstream in(v);
        std::string x, y;
        if (!(in >> x >> y)) throw CsvError("malformed fit request '" + k + " = " + v + "'");
        requests.push_back({k.substr(4), {x, y}});
    }
    if (requests.empty()) {
        if (table.columns().size() < 2) throw CsvError("need two columns to fit");
        requests.push_back({"default", {table.columns().front(), table.columns().back()}});
    }

    const double z = normal_quantile(0.5 + confidence / 2.0);
    std::vector<FitSummary> out;
    for (const auto& [name, cols] : requests) {
        const auto xs = table.column(cols.first);
        const auto ys = table.column(cols.second);
        std::vector<double> fx, fy;
        for (std::size_t i = 0; i < xs.size(); ++i) {
            if (std::isfinite(xs[i]) && std::isfinite(ys[i])) {
                fx.push_back(xs[i]);
                fy.push_back(ys[i]);
            }
        }
        if (fx.size() < 2) throw CsvError("fit '" + name + "' has fewer than two finite points");
        FitSummary s;
        s.name = name;
        s.x_column = cols.first;
        s.y_column = cols.second;
        s.fit = fit_line(fx, fy);
        s.ci_low = s.fit.slope - z * s.fit.slope_se;
        s.ci_high = s.fit.slope + z * s.fit.slope_se;
        out.push_back(std::move(s));
    }
    return out;
}

}  // namespace rwre
