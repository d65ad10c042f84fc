#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "tempdisagg/aggregation.hpp"
#include "tempdisagg/covariance.hpp"
#include "tempdisagg/types.hpp"

namespace tempdisagg {

// LASSO convention used throughout: minimise ||y - X b||^2 + lambda * ||b||_1.
// At a solution, |x_j'(y - X b)| = lambda / 2 on the active set and
// <= lambda / 2 elsewhere.

struct WhitenedProblem {
    Eigen::VectorXd y;
    Eigen::MatrixXd x;
};

/// (L^-1 y_q, L^-1 X_q) with L the lower Cholesky factor of S_q.
[[nodiscard]] WhitenedProblem whiten_problem(const Eigen::Ref<const Eigen::VectorXd>& y_q,
                                             const Eigen::Ref<const Eigen::MatrixXd>& x_q,
                                             const CovarianceFactor& s_q);
[[nodiscard]] WhitenedProblem whiten_problem(const Eigen::Ref<const Eigen::VectorXd>& y_q,
                                             const Eigen::Ref<const Eigen::MatrixXd>& x_q,
                                             const Eigen::Ref<const Eigen::MatrixXd>& s_q);

struct LarsAction {
    enum class Type { Enter, Drop };
    Type type = Type::Enter;
    Eigen::Index variable = 0;
    /// Index of the knot below which the action takes effect.
    std::size_t knot = 0;
};

/// Piecewise-linear LASSO path. knots[k] is the lambda at which betas[k]
/// is the solution; knots are strictly decreasing and betas[0] is zero.
struct LarsPath {
    std::vector<double> knots;
    std::vector<Eigen::VectorXd> betas;
    std::vector<LarsAction> actions;

    [[nodiscard]] std::size_t size() const noexcept { return knots.size(); }
};

/// Default number of LARS steps: min(n - 1, d), at least 1.
[[nodiscard]] std::size_t default_max_steps(Eigen::Index n, Eigen::Index d) noexcept;

/// LARS with the LASSO modification (variables leave the active set when
/// their coefficient crosses zero). Stops after max_steps knots past the
/// first, or when lambda reaches 0.
/// Throws DegenerateDesignError if an entering column lies in the span of
/// the active columns.
[[nodiscard]] LarsPath lars_path(const Eigen::Ref<const Eigen::VectorXd>& y,
                                 const Eigen::Ref<const Eigen::MatrixXd>& x,
                                 std::optional<std::size_t> max_steps = std::nullopt);

/// Weighted-penalty path: minimise ||y - X b||^2 + lambda * sum |b_j| / w_j
/// by running LARS on X diag(w). Betas are returned on the original scale.
/// Every weight must be positive.
[[nodiscard]] LarsPath lars_path_weighted(const Eigen::Ref<const Eigen::VectorXd>& y,
                                          const Eigen::Ref<const Eigen::MatrixXd>& x,
                                          const Eigen::Ref<const Eigen::VectorXd>& weights,
                                          std::optional<std::size_t> max_steps = std::nullopt);

/// Least-squares re-estimation on the support of one knot.
struct Refit {
    Eigen::VectorXd beta;  // d-length, zero off the support
    double intercept = 0.0;
    GlsFit fit;  // fit over [support columns, intercept]
    std::size_t df = 0;  // support size, intercept excluded
    bool skipped = false;  // support too large for n_low
};

/// GLS refit of every knot restricted to its support. When `intercept` is
/// set, an unpenalized column C * 1 joins each refit. Knots whose refit
/// would not leave a residual degree of freedom are flagged `skipped`.
[[nodiscard]] std::vector<Refit> debias_refit(const Eigen::Ref<const Eigen::VectorXd>& y_q,
                                              const Eigen::Ref<const Eigen::MatrixXd>& x_q,
                                              const CovarianceFactor& s_q, const LarsPath& path,
                                              const std::optional<Eigen::VectorXd>& intercept_column = std::nullopt);

struct BicSelection {
    std::size_t best_index = 0;
    std::vector<double> bic_values;
};

/// -2 loglik + log(n_low) * df for each refit; argmin with ties going to
/// the smaller df, then the larger lambda. Skipped refits score +inf.
[[nodiscard]] BicSelection bic_select(std::span<const Refit> refits, std::span<const double> knots,
                                      Eigen::Index n_low);

/// Score of one refit.
[[nodiscard]] double bic_value(const Refit& refit, Eigen::Index n_low);

struct SparseOptions {
    bool intercept = true;
    std::optional<std::size_t> max_steps;
};

/// Sparse temporal disaggregation: per rho, whiten, LARS, refit, BIC;
/// the (rho, lambda) pair with the smallest BIC wins.
[[nodiscard]] DisaggregationResult sp_td(const Eigen::Ref<const Eigen::VectorXd>& y_q,
                                         const Eigen::Ref<const Eigen::MatrixXd>& x_m,
                                         const AggregationSpec& spec, std::span<const double> grid,
                                         const SparseOptions& options = {});

/// Two-stage adaptive variant. Stage-2 penalty weights are 1/|beta_init|
/// from the stage-1 winner; variables with beta_init = 0 are excluded.
/// If stage 1 selects nothing, the stage-1 result is returned with a notice.
[[nodiscard]] DisaggregationResult adaptive_sp_td(const Eigen::Ref<const Eigen::VectorXd>& y_q,
                                                  const Eigen::Ref<const Eigen::MatrixXd>& x_m,
                                                  const AggregationSpec& spec, std::span<const double> grid,
                                                  const SparseOptions& options = {});

/// Dispatches to disaggregate_classical, sp_td or adaptive_sp_td.
[[nodiscard]] DisaggregationResult disaggregate(const Eigen::Ref<const Eigen::VectorXd>& y_q,
                                                const Eigen::Ref<const Eigen::MatrixXd>& x_m,
                                                const AggregationSpec& spec, Method method,
                                                std::span<const double> grid);

}  // namespace tempdisagg
