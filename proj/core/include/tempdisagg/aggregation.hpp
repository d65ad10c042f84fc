#pragma once

#include <string>
#include <string_view>

#include <Eigen/Dense>

namespace tempdisagg {

/// How high-frequency periods combine into one low-frequency period.
/// Sum/Average suit flows; First/Last suit stocks.
enum class AggregationMode { Sum, Average, First, Last };

[[nodiscard]] std::string_view to_string(AggregationMode mode) noexcept;
/// Accepts "sum", "average", "first", "last" (case-insensitive).
[[nodiscard]] AggregationMode parse_aggregation_mode(std::string_view text);

struct AggregationSpec {
    AggregationMode mode = AggregationMode::Sum;
    Eigen::Index ratio = 4;
    Eigen::Index n_low = 1;
    Eigen::Index n_high = 4;

    /// High-frequency periods covered by an observation.
    [[nodiscard]] Eigen::Index observed_high() const noexcept { return n_low * ratio; }
    /// Trailing high-frequency periods with no benchmark (extrapolation).
    [[nodiscard]] Eigen::Index extrapolated() const noexcept { return n_high - observed_high(); }

    /// Throws DomainError unless ratio >= 1, n_low >= 1, n_high >= n_low * ratio.
    void validate() const;
};

/// n_low x n_high matrix I (x) w, with zero columns past n_low * ratio.
[[nodiscard]] Eigen::MatrixXd build_aggregation_matrix(const AggregationSpec& spec);

/// C * series. Throws ShapeError if series.size() != spec.n_high.
[[nodiscard]] Eigen::VectorXd aggregate(const Eigen::Ref<const Eigen::VectorXd>& series,
                                        const AggregationSpec& spec);

/// C * panel, column by column.
[[nodiscard]] Eigen::MatrixXd aggregate_columns(const Eigen::Ref<const Eigen::MatrixXd>& panel,
                                                const AggregationSpec& spec);

/// C * S * C' without materialising C.
[[nodiscard]] Eigen::MatrixXd aggregate_covariance(const Eigen::Ref<const Eigen::MatrixXd>& shape,
                                                   const AggregationSpec& spec);

/// S * C' (n_high x n_low), the distribution kernel of the smoother.
[[nodiscard]] Eigen::MatrixXd right_multiply_transpose(
    const Eigen::Ref<const Eigen::MatrixXd>& shape, const AggregationSpec& spec);

/// Step-function baseline: each block gets its benchmark spread flat
/// (divided by ratio under Sum); the extrapolation tail repeats the last block.
[[nodiscard]] Eigen::VectorXd flat_interpolation(const Eigen::Ref<const Eigen::VectorXd>& y_low,
                                                 const AggregationSpec& spec);

}  // namespace tempdisagg
