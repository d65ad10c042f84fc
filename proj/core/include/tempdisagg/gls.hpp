#pragma once

#include <functional>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "tempdisagg/aggregation.hpp"
#include "tempdisagg/covariance.hpp"
#include "tempdisagg/types.hpp"

namespace tempdisagg {

/// Relative pivot of the whitened QR below which a design is rank deficient.
inline constexpr double kRankTolerance = 1e-10;
/// Whitened residual norm, relative to the whitened response, treated as an exact fit.
inline constexpr double kExactFitTolerance = 1e-10;

/// Gaussian log-likelihood with covariance sigma2 * S_q and the whitened
/// quadratic form r' S_q^-1 r. Throws DomainError if sigma2 <= 0.
[[nodiscard]] double gaussian_loglik(const Eigen::Ref<const Eigen::VectorXd>& residuals,
                                     const CovarianceFactor& s_q, double sigma2);
[[nodiscard]] double gaussian_loglik(const Eigen::Ref<const Eigen::VectorXd>& residuals,
                                     const Eigen::Ref<const Eigen::MatrixXd>& s_q, double sigma2);

/// GLS fit with concentrated sigma2 = r' S^-1 r / n. An exact fit reports
/// sigma2 = 0 and loglik = +inf.
[[nodiscard]] GlsFit gls_estimate(const Eigen::Ref<const Eigen::VectorXd>& y_q,
                                  const Eigen::Ref<const Eigen::MatrixXd>& x_q,
                                  const CovarianceFactor& s_q);
[[nodiscard]] GlsFit gls_estimate(const Eigen::Ref<const Eigen::VectorXd>& y_q,
                                  const Eigen::Ref<const Eigen::MatrixXd>& x_q,
                                  const Eigen::Ref<const Eigen::MatrixXd>& s_q);

/// 199 points from -0.99 to 0.99 in steps of 0.01.
[[nodiscard]] std::vector<double> default_rho_grid();

/// Throws InvalidGrid if empty or any |rho| >= 1.
void validate_rho_grid(std::span<const double> grid);

struct RhoProblem {
    Eigen::MatrixXd x_q;
    CovarianceFactor s_q;
};
using RhoProblemBuilder = std::function<RhoProblem(double rho)>;

struct RhoSearchResult {
    double rho_hat = 0.0;
    GlsFit fit;
    /// Profiled log-likelihood at each grid point, in grid order.
    std::vector<double> logliks;
};

/// Grid argmax of the profiled likelihood; ties go to the smaller |rho|,
/// then to the earlier grid point.
[[nodiscard]] RhoSearchResult profile_rho_search(const Eigen::Ref<const Eigen::VectorXd>& y_q,
                                                 const RhoProblemBuilder& builder,
                                                 std::span<const double> grid);

/// X_m beta + S_m C' S_q^-1 residual_low. `offset` is added to every
/// high-frequency period (the intercept of sparse fits).
[[nodiscard]] Eigen::VectorXd distribute_residuals(const Eigen::Ref<const Eigen::MatrixXd>& x_m,
                                                   const Eigen::Ref<const Eigen::VectorXd>& beta,
                                                   double offset,
                                                   const Eigen::Ref<const Eigen::MatrixXd>& s_m,
                                                   const CovarianceFactor& s_q,
                                                   const Eigen::Ref<const Eigen::VectorXd>& residual_low,
                                                   const AggregationSpec& spec);

/// Maps a classical method to its residual covariance kind.
[[nodiscard]] CovarianceKind covariance_kind(Method method);

/// Chow-Lin, Fernandez or Litterman disaggregation. rho is profiled over
/// `grid` for Chow-Lin and Litterman; Fernandez ignores it.
/// Throws DimensionRegimeError if d >= n_low.
[[nodiscard]] DisaggregationResult disaggregate_classical(
    const Eigen::Ref<const Eigen::VectorXd>& y_q, const Eigen::Ref<const Eigen::MatrixXd>& x_m,
    const AggregationSpec& spec, Method method, std::span<const double> grid);
[[nodiscard]] DisaggregationResult disaggregate_classical(
    const Eigen::Ref<const Eigen::VectorXd>& y_q, const Eigen::Ref<const Eigen::MatrixXd>& x_m,
    const AggregationSpec& spec, Method method);

/// max_i |(C y_high)_i - y_q_i| / max(|y_q|_inf, 1e-300).
[[nodiscard]] double max_consistency_residual(const Eigen::Ref<const Eigen::VectorXd>& y_high,
                                              const Eigen::Ref<const Eigen::VectorXd>& y_q,
                                              const AggregationSpec& spec);

}  // namespace tempdisagg
