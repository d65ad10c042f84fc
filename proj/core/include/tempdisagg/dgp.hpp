#pragma once

#include <cstdint>
#include <optional>
#include <random>

#include <Eigen/Dense>

#include "tempdisagg/aggregation.hpp"

namespace tempdisagg {

/// Residual process of the simulated high-frequency regression.
enum class ErrorProcess { ChowLin, Fernandez, Litterman };

[[nodiscard]] ErrorProcess parse_error_process(std::string_view text);
[[nodiscard]] std::string_view to_string(ErrorProcess process) noexcept;

struct DgpConfig {
    Eigen::Index n_low = 17;
    Eigen::Index n_high = 68;
    Eigen::Index ratio = 4;
    Eigen::Index d = 1;
    /// Nonzero coefficients are +/- beta_magnitude with fair random signs.
    double beta_magnitude = 1.0;
    /// Fraction of exactly-zero coefficients; round-half-up of sparsity * d.
    double sparsity = 0.5;
    ErrorProcess error_process = ErrorProcess::ChowLin;
    double rho = 0.0;
    AggregationMode agg_mode = AggregationMode::Sum;
    double design_mean = 0.0;
    double design_sd = 1.0;
    std::optional<std::uint64_t> seed;

    [[nodiscard]] AggregationSpec aggregation_spec() const;
    /// Throws DomainError on any invariant violation.
    void validate() const;
};

struct DgpOutput {
    Eigen::VectorXd y_low;
    Eigen::VectorXd y_high;
    Eigen::MatrixXd x;
    Eigen::VectorXd beta_true;
    Eigen::VectorXd errors;
    AggregationSpec spec;
};

/// Number of zero coefficients for a given sparsity: floor(sparsity * d + 0.5).
[[nodiscard]] Eigen::Index zero_count(double sparsity, Eigen::Index d);

/// Unit-innovation error path. ChowLin starts from the stationary
/// distribution; Fernandez and Litterman start from zero.
[[nodiscard]] Eigen::VectorXd generate_errors(ErrorProcess process, double rho, Eigen::Index n, std::mt19937_64& rng);
[[nodiscard]] Eigen::VectorXd generate_errors(ErrorProcess process, double rho, Eigen::Index n, std::uint64_t seed);

/// Draw order: X (column-major), zero positions, signs, errors.
[[nodiscard]] DgpOutput generate(const DgpConfig& config);

}  // namespace tempdisagg
