#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace tempdisagg {

// Delimited text tables: comma, semicolon or tab separated; optional header
// row; optional leading ISO-8601 date column (YYYY-MM-DD, YYYY-MM, YYYY-Qn);
// blank lines and lines starting with '#' are ignored.

struct LowFrequencySeries {
    std::string name = "y";
    Eigen::VectorXd values;
    std::vector<std::string> dates;  // empty if the file had no date column
};

struct IndicatorPanel {
    std::vector<std::string> names;
    Eigen::MatrixXd values;  // one row per high-frequency period
    std::vector<std::string> dates;
};

/// Throws ParseError (with line and column) or ShapeError if the file has
/// more than one value column.
[[nodiscard]] LowFrequencySeries load_series(const std::filesystem::path& path);
[[nodiscard]] IndicatorPanel load_panel(const std::filesystem::path& path);

/// Parses the same format from memory; `origin` names the source in errors.
[[nodiscard]] IndicatorPanel parse_panel(const std::string& text, const std::string& origin);

struct DroppedColumn {
    Eigen::Index dropped = 0;
    /// Kept column it duplicated; -1 for a zero-variance column.
    Eigen::Index kept = -1;
    double correlation = 0.0;
    bool degenerate = false;
};

struct CorrelationFilterResult {
    Eigen::MatrixXd filtered;
    std::vector<Eigen::Index> kept_columns;
    std::vector<DroppedColumn> dropped;
};

/// Greedy keep-first filter: column j is dropped when |corr(x_i, x_j)| >
/// threshold for some already-kept i < j. Zero-variance columns are dropped
/// and flagged `degenerate`. Requires threshold in (0, 1] and n >= 3.
[[nodiscard]] CorrelationFilterResult correlation_filter(const Eigen::Ref<const Eigen::MatrixXd>& x, double threshold);

/// Applies a filter result to a named panel.
[[nodiscard]] IndicatorPanel select_columns(const IndicatorPanel& panel, const std::vector<Eigen::Index>& columns);

/// 12 significant digits, shortest "%g" form.
[[nodiscard]] std::string format_number(double value);

/// Writes rows of already-formatted cells, comma separated, '\n' line ends.
void write_table(const std::filesystem::path& path, const std::vector<std::string>& header,
                 const std::vector<std::vector<std::string>>& rows);

void write_series(const std::filesystem::path& path, const std::string& name, const Eigen::Ref<const Eigen::VectorXd>& values);
void write_panel(const std::filesystem::path& path, const std::vector<std::string>& names,
                 const Eigen::Ref<const Eigen::MatrixXd>& values);

}  // namespace tempdisagg
