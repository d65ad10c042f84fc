#pragma once

#include <Eigen/Dense>

namespace tempdisagg {

/// Residual process assumed for the high-frequency regression errors.
enum class CovarianceKind { AR1, Fernandez, Litterman };

/// Unit-variance shape S of the residual covariance V = sigma^2 * S,
/// together with its lower Cholesky factor.
struct CovarianceFactor {
    Eigen::MatrixXd matrix;
    Eigen::MatrixXd lower_cholesky;
    double log_det = 0.0;

    [[nodiscard]] Eigen::Index size() const noexcept { return matrix.rows(); }
};

/// Cholesky pivots at or below this value are treated as a failure.
inline constexpr double kMinCholeskyPivot = 1e-12;

/// Stationary AR(1): S(i,j) = rho^|i-j| / (1 - rho^2).
[[nodiscard]] CovarianceFactor build_ar1_shape(double rho, Eigen::Index p);

/// Random walk: S = (D'D)^-1 with D the first-difference operator.
[[nodiscard]] CovarianceFactor build_fernandez_shape(Eigen::Index p);

/// Random walk with AR(1) increments: S = (D'H'HD)^-1, H = I - rho * shift.
[[nodiscard]] CovarianceFactor build_litterman_shape(double rho, Eigen::Index p);

/// Dispatch on kind; rho is ignored for Fernandez.
[[nodiscard]] CovarianceFactor build_shape(CovarianceKind kind, double rho, Eigen::Index p);

/// Cholesky-factor an arbitrary SPD matrix. Throws NumericalError when a
/// pivot falls to kMinCholeskyPivot or below.
[[nodiscard]] CovarianceFactor factor_spd(Eigen::MatrixXd matrix);

}  // namespace tempdisagg
