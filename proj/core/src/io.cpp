#include "tempdisagg/io.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <optional>
#include <regex>
#include <sstream>

#include "tempdisagg/errors.hpp"

namespace tempdisagg {
namespace {

struct Line {
    std::size_t number = 0;
    std::vector<std::string> fields;
};

std::string trim(std::string_view s) {
    std::size_t b = 0;
    std::size_t e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    std::string out(s.substr(b, e - b));
    if (out.size() >= 2 && out.front() == '"' && out.back() == '"') out = out.substr(1, out.size() - 2);
    return out;
}

std::vector<std::string> split(const std::string& line, char delimiter) {
    std::vector<std::string> fields;
    std::size_t start = 0;
    while (true) {
        const std::size_t pos = line.find(delimiter, start);
        fields.push_back(trim(std::string_view(line).substr(start, pos - start)));
        if (pos == std::string::npos) break;
        start = pos + 1;
    }
    return fields;
}

std::optional<double> parse_double(const std::string& text) {
    std::string_view view(text);
    if (!view.empty() && view.front() == '+') view.remove_prefix(1);
    if (view.empty()) return std::nullopt;
    double value = 0.0;
    const auto [ptr, ec] = std::from_chars(view.data(), view.data() + view.size(), value);
    if (ec != std::errc() || ptr != view.data() + view.size() || !std::isfinite(value)) return std::nullopt;
    return value;
}

bool looks_like_date(const std::string& field) {
    static const std::regex pattern(R"(^\d{4}-(\d{2}(-\d{2})?|Q[1-4])([T ][0-9:.]+Z?)?$)");
    return std::regex_match(field, pattern);
}

bool is_date_header(const std::string& field) {
    std::string lower = field;
    std::transform(lower.begin(), lower.end(), lower.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return lower.empty() || lower == "date" || lower == "period" || lower == "time";
}

std::vector<Line> content_lines(const std::string& text) {
    std::vector<Line> lines;
    std::istringstream stream(text);
    std::string raw;
    std::size_t number = 0;
    std::optional<char> delimiter;
    while (std::getline(stream, raw)) {
        ++number;
        if (!raw.empty() && raw.back() == '\r') raw.pop_back();
        const std::string stripped = trim(raw);
        if (stripped.empty() || stripped.front() == '#') continue;
        if (!delimiter) {
            if (raw.find(',') != std::string::npos) delimiter = ',';
            else if (raw.find('\t') != std::string::npos) delimiter = '\t';
            else if (raw.find(';') != std::string::npos) delimiter = ';';
            else delimiter = ',';
        }
        lines.push_back(Line{number, split(raw, *delimiter)});
    }
    return lines;
}

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path.string());
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

}  // namespace

IndicatorPanel parse_panel(const std::string& text, const std::string& origin) {
    const std::vector<Line> lines = content_lines(text);
    if (lines.empty()) throw ParseError(origin, 1, 1, "no data rows");

    const Line& first = lines.front();
    bool has_header = false;
    for (std::size_t k = 0; k < first.fields.size(); ++k) {
        if (k == 0 && looks_like_date(first.fields[k])) continue;
        if (!parse_double(first.fields[k])) {
            has_header = true;
            break;
        }
    }

    const std::size_t data_begin = has_header ? 1 : 0;
    if (data_begin >= lines.size()) throw ParseError(origin, first.number, 1, "header without data rows");
    const std::size_t width = first.fields.size();

    bool has_dates = false;
    if (has_header && is_date_header(first.fields[0]) && width > 1) has_dates = true;
    if (looks_like_date(lines[data_begin].fields[0])) has_dates = true;
    const std::size_t offset = has_dates ? 1 : 0;
    if (width <= offset) throw ParseError(origin, first.number, 1, "no value columns");

    IndicatorPanel panel;
    const std::size_t value_cols = width - offset;
    for (std::size_t k = 0; k < value_cols; ++k)
        panel.names.push_back(has_header ? first.fields[k + offset] : "x" + std::to_string(k + 1));

    const std::size_t rows = lines.size() - data_begin;
    panel.values.resize(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(value_cols));
    for (std::size_t r = 0; r < rows; ++r) {
        const Line& line = lines[data_begin + r];
        if (line.fields.size() != width)
            throw ParseError(origin, line.number, std::min(line.fields.size(), width) + 1,
                             "expected " + std::to_string(width) + " fields, found " +
                                 std::to_string(line.fields.size()));
        if (has_dates) panel.dates.push_back(line.fields[0]);
        for (std::size_t k = 0; k < value_cols; ++k) {
            const auto value = parse_double(line.fields[k + offset]);
            if (!value)
                throw ParseError(origin, line.number, k + offset + 1,
                                 "cannot parse '" + line.fields[k + offset] + "' as a finite number");
            panel.values(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(k)) = *value;
        }
    }
    return panel;
}

IndicatorPanel load_panel(const std::filesystem::path& path) {
    return parse_panel(read_file(path), path.string());
}

LowFrequencySeries load_series(const std::filesystem::path& path) {
    IndicatorPanel panel = load_panel(path);
    if (panel.values.cols() != 1)
        throw ShapeError("value columns in series file " + path.string(), 1,
                         static_cast<std::size_t>(panel.values.cols()));
    LowFrequencySeries series;
    series.name = panel.names.front();
    series.values = panel.values.col(0);
    series.dates = std::move(panel.dates);
    return series;
}

CorrelationFilterResult correlation_filter(const Eigen::Ref<const Eigen::MatrixXd>& x, double threshold) {
    if (!(threshold > 0.0 && threshold <= 1.0)) throw DomainError("correlation threshold must lie in (0, 1]");
    if (x.rows() < 3) throw DomainError("correlation filter needs at least 3 rows");

    const Eigen::MatrixXd centered = x.rowwise() - x.colwise().mean();
    const Eigen::VectorXd norms = centered.colwise().norm().transpose();
    const Eigen::VectorXd raw_norms = x.colwise().norm().transpose();

    CorrelationFilterResult result;
    for (Eigen::Index j = 0; j < x.cols(); ++j) {
        if (!(norms(j) > 1e-12 * raw_norms(j)) || norms(j) == 0.0) {
            result.dropped.push_back(DroppedColumn{j, -1, 0.0, true});
            continue;
        }
        bool keep = true;
        for (Eigen::Index i : result.kept_columns) {
            const double corr = centered.col(i).dot(centered.col(j)) / (norms(i) * norms(j));
            if (std::abs(corr) > threshold) {
                result.dropped.push_back(DroppedColumn{j, i, corr, false});
                keep = false;
                break;
            }
        }
        if (keep) result.kept_columns.push_back(j);
    }
    result.filtered.resize(x.rows(), static_cast<Eigen::Index>(result.kept_columns.size()));
    for (std::size_t k = 0; k < result.kept_columns.size(); ++k)
        result.filtered.col(static_cast<Eigen::Index>(k)) = x.col(result.kept_columns[k]);
    return result;
}

IndicatorPanel select_columns(const IndicatorPanel& panel, const std::vector<Eigen::Index>& columns) {
    IndicatorPanel out;
    out.dates = panel.dates;
    out.values.resize(panel.values.rows(), static_cast<Eigen::Index>(columns.size()));
    for (std::size_t k = 0; k < columns.size(); ++k) {
        out.values.col(static_cast<Eigen::Index>(k)) = panel.values.col(columns[k]);
        out.names.push_back(panel.names.at(static_cast<std::size_t>(columns[k])));
    }
    return out;
}

std::string format_number(double value) {
    if (std::isnan(value)) return "nan";
    if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
    if (value == 0.0) return "0";
    char buffer[32];
    std::snprintf(buffer, sizeof buffer, "%.12g", value);
    return buffer;
}

void write_table(const std::filesystem::path& path, const std::vector<std::string>& header,
                 const std::vector<std::vector<std::string>>& rows) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write " + path.string());
    auto emit = [&out](const std::vector<std::string>& cells) {
        for (std::size_t k = 0; k < cells.size(); ++k) {
            if (k) out << ',';
            out << cells[k];
        }
        out << '\n';
    };
    if (!header.empty()) emit(header);
    for (const auto& row : rows) emit(row);
    if (!out) throw IoError("failed while writing " + path.string());
}

void write_series(const std::filesystem::path& path, const std::string& name, const Eigen::Ref<const Eigen::VectorXd>& values) {
    std::vector<std::vector<std::string>> rows;
    rows.reserve(static_cast<std::size_t>(values.size()));
    for (Eigen::Index t = 0; t < values.size(); ++t) rows.push_back({format_number(values(t))});
    write_table(path, {name}, rows);
}

void write_panel(const std::filesystem::path& path, const std::vector<std::string>& names,
                 const Eigen::Ref<const Eigen::MatrixXd>& values) {
    if (names.size() != static_cast<std::size_t>(values.cols()))
        throw ShapeError("column names", static_cast<std::size_t>(values.cols()), names.size());
    std::vector<std::vector<std::string>> rows;
    rows.reserve(static_cast<std::size_t>(values.rows()));
    for (Eigen::Index t = 0; t < values.rows(); ++t) {
        std::vector<std::string> row;
        row.reserve(names.size());
        for (Eigen::Index j = 0; j < values.cols(); ++j) row.push_back(format_number(values(t, j)));
        rows.push_back(std::move(row));
    }
    write_table(path, names, rows);
}

}  // namespace tempdisagg
