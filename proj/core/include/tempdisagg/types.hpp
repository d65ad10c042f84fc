#pragma once

#include <cstddef>
#include <limits>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "tempdisagg/aggregation.hpp"

namespace tempdisagg {

enum class Method { ChowLin, Fernandez, Litterman, SpTD, AdaptiveSpTD };

[[nodiscard]] std::string_view to_string(Method method) noexcept;
/// Accepts "chow-lin", "fernandez", "litterman", "spTD", "adaptive-spTD"
/// (case-insensitive, '-' and '_' optional).
[[nodiscard]] Method parse_method(std::string_view text);
[[nodiscard]] bool is_sparse(Method method) noexcept;

/// Profiled GLS fit on the low-frequency problem.
struct GlsFit {
    Eigen::VectorXd beta;
    double rho = 0.0;
    double sigma2 = 0.0;
    /// +infinity when the fit is exact (sigma2 == 0).
    double loglik = 0.0;
    Eigen::VectorXd residuals_low;
};

/// Selected sparse fit. beta is the debiased (refitted) coefficient vector
/// over the d indicators; the unpenalized intercept is kept separately.
struct SparseFit {
    Eigen::VectorXd beta;
    double intercept = 0.0;
    std::vector<Eigen::Index> support;
    double lambda = 0.0;
    double rho = 0.0;
    double bic = 0.0;
    double sigma2 = 0.0;
    double loglik = 0.0;
    Eigen::VectorXd residuals_low;
};

/// One scored candidate of a model-selection search.
/// Classical methods record one row per rho; sparse methods one per (rho, knot).
struct SelectionTraceEntry {
    double rho = 0.0;
    std::ptrdiff_t knot = -1;  // -1 for classical fits
    double lambda = std::numeric_limits<double>::quiet_NaN();
    std::size_t df = 0;
    double loglik = std::numeric_limits<double>::quiet_NaN();
    double bic = std::numeric_limits<double>::quiet_NaN();
    bool skipped = false;
};

struct DisaggregationResult {
    Eigen::VectorXd y_high;
    Method method = Method::ChowLin;
    AggregationSpec spec;
    std::variant<GlsFit, SparseFit> fit;
    /// Indicator columns with nonzero coefficients, in index order.
    std::vector<Eigen::Index> selected_columns;
    std::vector<SelectionTraceEntry> trace;
    /// Non-fatal conditions, e.g. the adaptive fallback.
    std::vector<std::string> notices;

    [[nodiscard]] const Eigen::VectorXd& beta() const;
    [[nodiscard]] double rho() const;
    /// Intercept for sparse fits, 0 for classical fits.
    [[nodiscard]] double intercept() const;
};

}  // namespace tempdisagg
