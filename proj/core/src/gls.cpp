#include "tempdisagg/gls.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "tempdisagg/errors.hpp"

namespace tempdisagg {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void require_rows(Eigen::Index expected, Eigen::Index found, const char* what) {
    if (expected != found)
        throw ShapeError(what, static_cast<std::size_t>(expected), static_cast<std::size_t>(found));
}

// Better candidate under: higher loglik, then smaller |rho|, then earlier index.
bool improves(double loglik, double rho, double best_loglik, double best_rho) {
    if (loglik > best_loglik) return true;
    if (loglik < best_loglik) return false;
    return std::abs(rho) < std::abs(best_rho);
}

}  // namespace

double gaussian_loglik(const Eigen::Ref<const Eigen::VectorXd>& residuals, const CovarianceFactor& s_q,
                       double sigma2) {
    if (!(sigma2 > 0.0)) throw DomainError("sigma2 must be positive, got " + std::to_string(sigma2));
    require_rows(s_q.size(), residuals.size(), "residual length");
    const double n = static_cast<double>(residuals.size());
    const Eigen::VectorXd whitened = s_q.lower_cholesky.triangularView<Eigen::Lower>().solve(residuals);
    return -0.5 * n * std::log(2.0 * std::numbers::pi) - 0.5 * n * std::log(sigma2) - 0.5 * s_q.log_det -
           0.5 * whitened.squaredNorm() / sigma2;
}

double gaussian_loglik(const Eigen::Ref<const Eigen::VectorXd>& residuals,
                       const Eigen::Ref<const Eigen::MatrixXd>& s_q, double sigma2) {
    return gaussian_loglik(residuals, factor_spd(s_q), sigma2);
}

GlsFit gls_estimate(const Eigen::Ref<const Eigen::VectorXd>& y_q, const Eigen::Ref<const Eigen::MatrixXd>& x_q,
                    const CovarianceFactor& s_q) {
    const Eigen::Index n = y_q.size();
    const Eigen::Index d = x_q.cols();
    require_rows(n, x_q.rows(), "rows of X_q");
    require_rows(n, s_q.size(), "size of S_q");
    if (d >= n)
        throw RankError("GLS needs more observations than regressors (n=" + std::to_string(n) +
                        ", d=" + std::to_string(d) + ")");

    const auto lower = s_q.lower_cholesky.triangularView<Eigen::Lower>();
    const Eigen::VectorXd y_w = lower.solve(y_q);
    const Eigen::MatrixXd x_w = lower.solve(x_q);

    GlsFit fit;
    if (d == 0) {
        fit.beta = Eigen::VectorXd::Zero(0);
    } else {
        Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(x_w);
        const auto r_diag = qr.matrixR().diagonal().cwiseAbs();
        const double largest = r_diag(0);
        if (!(largest > 0.0) || r_diag(d - 1) < kRankTolerance * largest)
            throw RankError("whitened design is column-rank deficient (relative pivot " +
                            std::to_string(largest > 0.0 ? r_diag(d - 1) / largest : 0.0) + ")");
        fit.beta = qr.solve(y_w);
    }

    fit.residuals_low = y_q - x_q * fit.beta;
    const Eigen::VectorXd r_w = y_w - x_w * fit.beta;
    const double rss = r_w.squaredNorm();
    if (std::sqrt(rss) <= kExactFitTolerance * y_w.norm() || rss == 0.0) {
        fit.sigma2 = 0.0;
        fit.loglik = kInf;
    } else {
        fit.sigma2 = rss / static_cast<double>(n);
        fit.loglik = gaussian_loglik(fit.residuals_low, s_q, fit.sigma2);
    }
    return fit;
}

GlsFit gls_estimate(const Eigen::Ref<const Eigen::VectorXd>& y_q, const Eigen::Ref<const Eigen::MatrixXd>& x_q,
                    const Eigen::Ref<const Eigen::MatrixXd>& s_q) {
    return gls_estimate(y_q, x_q, factor_spd(s_q));
}

std::vector<double> default_rho_grid() {
    std::vector<double> grid;
    grid.reserve(199);
    for (int k = -99; k <= 99; ++k) grid.push_back(static_cast<double>(k) / 100.0);
    return grid;
}

void validate_rho_grid(std::span<const double> grid) {
    if (grid.empty()) throw InvalidGrid("rho grid is empty");
    for (double rho : grid)
        if (!std::isfinite(rho) || std::abs(rho) >= 1.0)
            throw InvalidGrid("rho grid value " + std::to_string(rho) + " is outside (-1, 1)");
}

RhoSearchResult profile_rho_search(const Eigen::Ref<const Eigen::VectorXd>& y_q, const RhoProblemBuilder& builder,
                                   std::span<const double> grid) {
    validate_rho_grid(grid);
    RhoSearchResult result;
    result.logliks.reserve(grid.size());
    bool have_best = false;
    for (double rho : grid) {
        const RhoProblem problem = builder(rho);
        GlsFit fit = gls_estimate(y_q, problem.x_q, problem.s_q);
        fit.rho = rho;
        result.logliks.push_back(fit.loglik);
        if (!have_best || improves(fit.loglik, rho, result.fit.loglik, result.rho_hat)) {
            result.rho_hat = rho;
            result.fit = std::move(fit);
            have_best = true;
        }
    }
    return result;
}

Eigen::VectorXd distribute_residuals(const Eigen::Ref<const Eigen::MatrixXd>& x_m,
                                     const Eigen::Ref<const Eigen::VectorXd>& beta, double offset,
                                     const Eigen::Ref<const Eigen::MatrixXd>& s_m, const CovarianceFactor& s_q,
                                     const Eigen::Ref<const Eigen::VectorXd>& residual_low,
                                     const AggregationSpec& spec) {
    require_rows(spec.n_high, x_m.rows(), "rows of X_m");
    require_rows(x_m.cols(), beta.size(), "length of beta");
    require_rows(spec.n_low, residual_low.size(), "length of low-frequency residual");
    const Eigen::VectorXd weights = s_q.lower_cholesky.triangularView<Eigen::Lower>().transpose().solve(
        s_q.lower_cholesky.triangularView<Eigen::Lower>().solve(residual_low));
    Eigen::VectorXd y_high = x_m * beta;
    y_high.array() += offset;
    y_high += right_multiply_transpose(s_m, spec) * weights;
    return y_high;
}

CovarianceKind covariance_kind(Method method) {
    switch (method) {
        case Method::ChowLin:
        case Method::SpTD:
        case Method::AdaptiveSpTD:
            return CovarianceKind::AR1;
        case Method::Fernandez:
            return CovarianceKind::Fernandez;
        case Method::Litterman:
            return CovarianceKind::Litterman;
    }
    return CovarianceKind::AR1;
}

DisaggregationResult disaggregate_classical(const Eigen::Ref<const Eigen::VectorXd>& y_q,
                                            const Eigen::Ref<const Eigen::MatrixXd>& x_m,
                                            const AggregationSpec& spec, Method method,
                                            std::span<const double> grid) {
    if (is_sparse(method)) throw DomainError("disaggregate_classical does not handle sparse methods");
    spec.validate();
    require_rows(spec.n_low, y_q.size(), "length of y_q");
    require_rows(spec.n_high, x_m.rows(), "rows of X_m");
    if (x_m.cols() < 1) throw DomainError("indicator panel has no columns");
    if (x_m.cols() >= y_q.size())
        throw DimensionRegimeError(static_cast<std::size_t>(y_q.size()), static_cast<std::size_t>(x_m.cols()));

    const CovarianceKind kind = covariance_kind(method);
    const Eigen::MatrixXd x_q = aggregate_columns(x_m, spec);
    auto builder = [&](double rho) {
        const CovarianceFactor s_m = build_shape(kind, rho, spec.n_high);
        return RhoProblem{x_q, factor_spd(aggregate_covariance(s_m.matrix, spec))};
    };

    const std::vector<double> fernandez_grid{0.0};
    const std::span<const double> search_grid = kind == CovarianceKind::Fernandez ? std::span<const double>(fernandez_grid) : grid;
    RhoSearchResult search = profile_rho_search(y_q, builder, search_grid);

    DisaggregationResult result;
    result.method = method;
    result.spec = spec;
    const double n_low = static_cast<double>(spec.n_low);
    for (std::size_t i = 0; i < search_grid.size(); ++i) {
        SelectionTraceEntry entry;
        entry.rho = search_grid[i];
        entry.df = static_cast<std::size_t>(x_m.cols());
        entry.loglik = search.logliks[i];
        entry.bic = -2.0 * entry.loglik + std::log(n_low) * static_cast<double>(entry.df);
        result.trace.push_back(entry);
    }

    const CovarianceFactor s_m = build_shape(kind, search.rho_hat, spec.n_high);
    const CovarianceFactor s_q = factor_spd(aggregate_covariance(s_m.matrix, spec));
    result.y_high = distribute_residuals(x_m, search.fit.beta, 0.0, s_m.matrix, s_q, search.fit.residuals_low, spec);
    for (Eigen::Index j = 0; j < search.fit.beta.size(); ++j)
        if (search.fit.beta(j) != 0.0) result.selected_columns.push_back(j);
    result.fit = std::move(search.fit);
    return result;
}

DisaggregationResult disaggregate_classical(const Eigen::Ref<const Eigen::VectorXd>& y_q,
                                            const Eigen::Ref<const Eigen::MatrixXd>& x_m,
                                            const AggregationSpec& spec, Method method) {
    const std::vector<double> grid = default_rho_grid();
    return disaggregate_classical(y_q, x_m, spec, method, grid);
}

double max_consistency_residual(const Eigen::Ref<const Eigen::VectorXd>& y_high,
                                const Eigen::Ref<const Eigen::VectorXd>& y_q, const AggregationSpec& spec) {
    const Eigen::VectorXd aggregated = aggregate(y_high, spec);
    require_rows(spec.n_low, y_q.size(), "length of y_q");
    const double scale = std::max(y_q.cwiseAbs().maxCoeff(), 1e-300);
    return (aggregated - y_q).cwiseAbs().maxCoeff() / scale;
}

}  // namespace tempdisagg
