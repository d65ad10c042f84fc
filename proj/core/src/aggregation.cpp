#include "tempdisagg/aggregation.hpp"

#include <algorithm>
#include <cctype>
#include <string>

#include "tempdisagg/errors.hpp"

namespace tempdisagg {
namespace {

// The 1 x ratio weight row of each block.
Eigen::RowVectorXd block_weights(const AggregationSpec& spec) {
    const Eigen::Index r = spec.ratio;
    Eigen::RowVectorXd w = Eigen::RowVectorXd::Zero(r);
    switch (spec.mode) {
        case AggregationMode::Sum:
            w.setOnes();
            break;
        case AggregationMode::Average:
            w.setConstant(1.0 / static_cast<double>(r));
            break;
        case AggregationMode::First:
            w(0) = 1.0;
            break;
        case AggregationMode::Last:
            w(r - 1) = 1.0;
            break;
    }
    return w;
}

}  // namespace

std::string_view to_string(AggregationMode mode) noexcept {
    switch (mode) {
        case AggregationMode::Sum: return "sum";
        case AggregationMode::Average: return "average";
        case AggregationMode::First: return "first";
        case AggregationMode::Last: return "last";
    }
    return "sum";
}

AggregationMode parse_aggregation_mode(std::string_view text) {
    std::string lower(text);
    std::transform(lower.begin(), lower.end(), lower.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    if (lower == "sum") return AggregationMode::Sum;
    if (lower == "average" || lower == "avg" || lower == "mean") return AggregationMode::Average;
    if (lower == "first") return AggregationMode::First;
    if (lower == "last") return AggregationMode::Last;
    throw DomainError("unknown aggregation mode '" + std::string(text) +
                      "' (expected sum, average, first or last)");
}

void AggregationSpec::validate() const {
    if (ratio < 1) throw DomainError("aggregation ratio must be >= 1");
    if (n_low < 1) throw DomainError("n_low must be >= 1");
    if (n_high < n_low * ratio)
        throw DomainError("n_high (" + std::to_string(n_high) + ") must be at least n_low * ratio (" +
                          std::to_string(n_low * ratio) + ")");
}

Eigen::MatrixXd build_aggregation_matrix(const AggregationSpec& spec) {
    spec.validate();
    const Eigen::RowVectorXd w = block_weights(spec);
    Eigen::MatrixXd c = Eigen::MatrixXd::Zero(spec.n_low, spec.n_high);
    for (Eigen::Index i = 0; i < spec.n_low; ++i) c.block(i, i * spec.ratio, 1, spec.ratio) = w;
    return c;
}

Eigen::MatrixXd aggregate_columns(const Eigen::Ref<const Eigen::MatrixXd>& panel, const AggregationSpec& spec) {
    spec.validate();
    if (panel.rows() != spec.n_high)
        throw ShapeError("rows of high-frequency input", static_cast<std::size_t>(spec.n_high),
                         static_cast<std::size_t>(panel.rows()));
    return build_aggregation_matrix(spec) * panel;
}

Eigen::VectorXd aggregate(const Eigen::Ref<const Eigen::VectorXd>& series, const AggregationSpec& spec) {
    spec.validate();
    if (series.size() != spec.n_high)
        throw ShapeError("length of high-frequency series", static_cast<std::size_t>(spec.n_high),
                         static_cast<std::size_t>(series.size()));
    return build_aggregation_matrix(spec) * series;
}

Eigen::MatrixXd right_multiply_transpose(const Eigen::Ref<const Eigen::MatrixXd>& shape,
                                         const AggregationSpec& spec) {
    spec.validate();
    if (shape.rows() != spec.n_high || shape.cols() != spec.n_high)
        throw ShapeError("covariance size", static_cast<std::size_t>(spec.n_high),
                         static_cast<std::size_t>(shape.rows()));
    const Eigen::RowVectorXd w = block_weights(spec);
    Eigen::MatrixXd out(spec.n_high, spec.n_low);
    for (Eigen::Index i = 0; i < spec.n_low; ++i)
        out.col(i) = shape.middleCols(i * spec.ratio, spec.ratio) * w.transpose();
    return out;
}

Eigen::MatrixXd aggregate_covariance(const Eigen::Ref<const Eigen::MatrixXd>& shape,
                                     const AggregationSpec& spec) {
    Eigen::MatrixXd sct = right_multiply_transpose(shape, spec);
    const Eigen::RowVectorXd w = block_weights(spec);
    Eigen::MatrixXd out(spec.n_low, spec.n_low);
    for (Eigen::Index i = 0; i < spec.n_low; ++i)
        out.row(i) = w * sct.middleRows(i * spec.ratio, spec.ratio);
    return 0.5 * (out + out.transpose());
}

Eigen::VectorXd flat_interpolation(const Eigen::Ref<const Eigen::VectorXd>& y_low,
                                   const AggregationSpec& spec) {
    spec.validate();
    if (y_low.size() != spec.n_low)
        throw ShapeError("low-frequency length", static_cast<std::size_t>(spec.n_low),
                         static_cast<std::size_t>(y_low.size()));
    const double divisor = spec.mode == AggregationMode::Sum ? static_cast<double>(spec.ratio) : 1.0;
    Eigen::VectorXd out(spec.n_high);
    for (Eigen::Index t = 0; t < spec.n_high; ++t) {
        const Eigen::Index block = std::min(t / spec.ratio, spec.n_low - 1);
        out(t) = y_low(block) / divisor;
    }
    return out;
}

}  // namespace tempdisagg
