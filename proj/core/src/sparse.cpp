#include "tempdisagg/sparse.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "tempdisagg/errors.hpp"
#include "tempdisagg/gls.hpp"

namespace tempdisagg {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
// Whitened columns shorter than this (relative to the longest) carry no
// information once the intercept is projected out and are left at zero.
constexpr double kNullColumnTolerance = 1e-12;

// Everything one rho contributes to the joint (rho, lambda) search.
struct RhoPipeline {
    double rho = 0.0;
    LarsPath path;
    std::vector<Refit> refits;
    BicSelection selection;
};

// Candidate ordering: smaller BIC, then sparser, then larger lambda, then smaller |rho|.
bool better_candidate(double bic, std::size_t df, double lambda, double rho, double best_bic, std::size_t best_df,
                      double best_lambda, double best_rho) {
    if (bic != best_bic) return bic < best_bic;
    if (df != best_df) return df < best_df;
    if (lambda != best_lambda) return lambda > best_lambda;
    return std::abs(rho) < std::abs(best_rho);
}

// Removes the component along `direction` from y and from every column of x.
void project_out(Eigen::VectorXd& y, Eigen::MatrixXd& x, const Eigen::VectorXd& direction) {
    const double norm2 = direction.squaredNorm();
    if (!(norm2 > 0.0)) return;
    y -= direction * (direction.dot(y) / norm2);
    const Eigen::RowVectorXd coef = (direction.transpose() * x) / norm2;
    x -= direction * coef;
}

Eigen::VectorXd embed(const Eigen::VectorXd& sub, const std::vector<Eigen::Index>& columns, Eigen::Index d) {
    Eigen::VectorXd full = Eigen::VectorXd::Zero(d);
    for (std::size_t k = 0; k < columns.size(); ++k) full(columns[k]) = sub(static_cast<Eigen::Index>(k));
    return full;
}

// Penalty weights: empty for plain spTD (columns are unit-normed instead),
// otherwise one positive weight per entry of `columns`.
RhoPipeline run_pipeline(double rho, const Eigen::Ref<const Eigen::VectorXd>& y_q,
                         const Eigen::Ref<const Eigen::MatrixXd>& x_q, const AggregationSpec& spec,
                         const SparseOptions& options, const std::vector<Eigen::Index>& candidate_columns,
                         const Eigen::VectorXd& weights) {
    const Eigen::Index d = x_q.cols();
    const CovarianceFactor s_m = build_ar1_shape(rho, spec.n_high);
    const CovarianceFactor s_q = factor_spd(aggregate_covariance(s_m.matrix, spec));
    WhitenedProblem whitened = whiten_problem(y_q, x_q, s_q);

    std::optional<Eigen::VectorXd> intercept_column;
    if (options.intercept) {
        intercept_column = aggregate(Eigen::VectorXd::Ones(spec.n_high).eval(), spec);
        const Eigen::VectorXd w = s_q.lower_cholesky.triangularView<Eigen::Lower>().solve(*intercept_column);
        project_out(whitened.y, whitened.x, w);
    }

    std::vector<Eigen::Index> columns;
    Eigen::VectorXd scale;
    const bool weighted = weights.size() > 0;
    if (weighted) {
        columns = candidate_columns;
        scale = weights;
    } else {
        Eigen::VectorXd norms(static_cast<Eigen::Index>(candidate_columns.size()));
        for (std::size_t k = 0; k < candidate_columns.size(); ++k)
            norms(static_cast<Eigen::Index>(k)) = whitened.x.col(candidate_columns[k]).norm();
        const double longest = norms.size() > 0 ? norms.maxCoeff() : 0.0;
        std::vector<double> kept_scale;
        for (std::size_t k = 0; k < candidate_columns.size(); ++k) {
            const double nk = norms(static_cast<Eigen::Index>(k));
            if (nk > kNullColumnTolerance * longest && nk > 0.0) {
                columns.push_back(candidate_columns[k]);
                kept_scale.push_back(1.0 / nk);
            }
        }
        scale = Eigen::Map<const Eigen::VectorXd>(kept_scale.data(), static_cast<Eigen::Index>(kept_scale.size()));
    }

    RhoPipeline out;
    out.rho = rho;
    Eigen::MatrixXd x_sub(whitened.x.rows(), static_cast<Eigen::Index>(columns.size()));
    for (std::size_t k = 0; k < columns.size(); ++k) x_sub.col(static_cast<Eigen::Index>(k)) = whitened.x.col(columns[k]);

    const Eigen::Index rank_cap = spec.n_low - (options.intercept ? 1 : 0);
    const std::size_t steps = options.max_steps.value_or(
        static_cast<std::size_t>(std::max<Eigen::Index>(1, std::min<Eigen::Index>(rank_cap, x_sub.cols()))));
    LarsPath sub_path = lars_path_weighted(whitened.y, x_sub, scale, steps);
    out.path.knots = std::move(sub_path.knots);
    out.path.betas.reserve(sub_path.betas.size());
    for (const auto& b : sub_path.betas) out.path.betas.push_back(embed(b, columns, d));
    for (auto action : sub_path.actions) {
        action.variable = columns[static_cast<std::size_t>(action.variable)];
        out.path.actions.push_back(action);
    }

    out.refits = debias_refit(y_q, x_q, s_q, out.path, intercept_column);
    out.selection = bic_select(out.refits, out.path.knots, spec.n_low);
    return out;
}

DisaggregationResult select_and_distribute(std::vector<RhoPipeline>& pipelines,
                                           const Eigen::Ref<const Eigen::MatrixXd>& x_m, const AggregationSpec& spec,
                                           Method method) {
    std::size_t best_p = 0;
    for (std::size_t p = 1; p < pipelines.size(); ++p) {
        const auto& cand = pipelines[p];
        const auto& best = pipelines[best_p];
        const std::size_t ci = cand.selection.best_index;
        const std::size_t bi = best.selection.best_index;
        if (better_candidate(cand.selection.bic_values[ci], cand.refits[ci].df, cand.path.knots[ci], cand.rho,
                             best.selection.bic_values[bi], best.refits[bi].df, best.path.knots[bi], best.rho))
            best_p = p;
    }

    DisaggregationResult result;
    result.method = method;
    result.spec = spec;
    for (const auto& pipe : pipelines) {
        for (std::size_t k = 0; k < pipe.refits.size(); ++k) {
            SelectionTraceEntry entry;
            entry.rho = pipe.rho;
            entry.knot = static_cast<std::ptrdiff_t>(k);
            entry.lambda = pipe.path.knots[k];
            entry.df = pipe.refits[k].df;
            entry.skipped = pipe.refits[k].skipped;
            entry.loglik = entry.skipped ? std::numeric_limits<double>::quiet_NaN() : pipe.refits[k].fit.loglik;
            entry.bic = pipe.selection.bic_values[k];
            result.trace.push_back(entry);
        }
    }

    const RhoPipeline& winner = pipelines[best_p];
    const std::size_t idx = winner.selection.best_index;
    const Refit& refit = winner.refits[idx];
    if (refit.skipped) throw NumericalError("no knot admits a least-squares refit");

    SparseFit fit;
    fit.beta = refit.beta;
    fit.intercept = refit.intercept;
    fit.lambda = winner.path.knots[idx];
    fit.rho = winner.rho;
    fit.bic = winner.selection.bic_values[idx];
    fit.sigma2 = refit.fit.sigma2;
    fit.loglik = refit.fit.loglik;
    fit.residuals_low = refit.fit.residuals_low;
    for (Eigen::Index j = 0; j < fit.beta.size(); ++j)
        if (fit.beta(j) != 0.0) fit.support.push_back(j);

    const CovarianceFactor s_m = build_ar1_shape(fit.rho, spec.n_high);
    const CovarianceFactor s_q = factor_spd(aggregate_covariance(s_m.matrix, spec));
    result.y_high = distribute_residuals(x_m, fit.beta, fit.intercept, s_m.matrix, s_q, fit.residuals_low, spec);
    result.selected_columns = fit.support;
    result.fit = std::move(fit);
    return result;
}

void check_inputs(const Eigen::Ref<const Eigen::VectorXd>& y_q, const Eigen::Ref<const Eigen::MatrixXd>& x_m,
                  const AggregationSpec& spec, std::span<const double> grid) {
    spec.validate();
    validate_rho_grid(grid);
    if (y_q.size() != spec.n_low)
        throw ShapeError("length of y_q", static_cast<std::size_t>(spec.n_low), static_cast<std::size_t>(y_q.size()));
    if (x_m.rows() != spec.n_high)
        throw ShapeError("rows of X_m", static_cast<std::size_t>(spec.n_high), static_cast<std::size_t>(x_m.rows()));
    if (x_m.cols() < 1) throw DomainError("indicator panel has no columns");
    if (spec.n_low < 3) throw DomainError("sparse disaggregation needs at least 3 low-frequency observations");
}

}  // namespace

WhitenedProblem whiten_problem(const Eigen::Ref<const Eigen::VectorXd>& y_q, const Eigen::Ref<const Eigen::MatrixXd>& x_q,
                               const CovarianceFactor& s_q) {
    if (y_q.size() != s_q.size() || x_q.rows() != s_q.size())
        throw ShapeError("rows of whitened problem", static_cast<std::size_t>(s_q.size()),
                         static_cast<std::size_t>(y_q.size() != s_q.size() ? y_q.size() : x_q.rows()));
    const auto lower = s_q.lower_cholesky.triangularView<Eigen::Lower>();
    return WhitenedProblem{lower.solve(y_q), lower.solve(x_q)};
}

WhitenedProblem whiten_problem(const Eigen::Ref<const Eigen::VectorXd>& y_q, const Eigen::Ref<const Eigen::MatrixXd>& x_q,
                               const Eigen::Ref<const Eigen::MatrixXd>& s_q) {
    return whiten_problem(y_q, x_q, factor_spd(s_q));
}

std::vector<Refit> debias_refit(const Eigen::Ref<const Eigen::VectorXd>& y_q, const Eigen::Ref<const Eigen::MatrixXd>& x_q,
                                const CovarianceFactor& s_q, const LarsPath& path,
                                const std::optional<Eigen::VectorXd>& intercept_column) {
    const Eigen::Index n = y_q.size();
    const Eigen::Index d = x_q.cols();
    const Eigen::Index extra = intercept_column ? 1 : 0;
    std::vector<Refit> refits;
    refits.reserve(path.size());
    for (const auto& b : path.betas) {
        if (b.size() != d)
            throw ShapeError("path coefficient length", static_cast<std::size_t>(d), static_cast<std::size_t>(b.size()));
        std::vector<Eigen::Index> support;
        for (Eigen::Index j = 0; j < d; ++j)
            if (b(j) != 0.0) support.push_back(j);

        Refit refit;
        refit.df = support.size();
        refit.beta = Eigen::VectorXd::Zero(d);
        const Eigen::Index cols = static_cast<Eigen::Index>(support.size()) + extra;
        if (cols >= n) {
            refit.skipped = true;
            refits.push_back(std::move(refit));
            continue;
        }
        Eigen::MatrixXd design(n, cols);
        for (std::size_t k = 0; k < support.size(); ++k) design.col(static_cast<Eigen::Index>(k)) = x_q.col(support[k]);
        if (intercept_column) design.col(cols - 1) = *intercept_column;

        refit.fit = gls_estimate(y_q, design, s_q);
        for (std::size_t k = 0; k < support.size(); ++k)
            refit.beta(support[k]) = refit.fit.beta(static_cast<Eigen::Index>(k));
        if (intercept_column) refit.intercept = refit.fit.beta(cols - 1);
        refits.push_back(std::move(refit));
    }
    return refits;
}

double bic_value(const Refit& refit, Eigen::Index n_low) {
    if (refit.skipped) return kInf;
    return -2.0 * refit.fit.loglik + std::log(static_cast<double>(n_low)) * static_cast<double>(refit.df);
}

BicSelection bic_select(std::span<const Refit> refits, std::span<const double> knots, Eigen::Index n_low) {
    if (refits.size() != knots.size())
        throw ShapeError("refits vs knots", knots.size(), refits.size());
    if (refits.empty()) throw DomainError("no refits to select from");
    BicSelection sel;
    sel.bic_values.reserve(refits.size());
    for (const auto& r : refits) sel.bic_values.push_back(bic_value(r, n_low));
    for (std::size_t l = 1; l < refits.size(); ++l) {
        const std::size_t b = sel.best_index;
        if (better_candidate(sel.bic_values[l], refits[l].df, knots[l], 0.0, sel.bic_values[b], refits[b].df, knots[b],
                             0.0))
            sel.best_index = l;
    }
    return sel;
}

DisaggregationResult sp_td(const Eigen::Ref<const Eigen::VectorXd>& y_q, const Eigen::Ref<const Eigen::MatrixXd>& x_m,
                           const AggregationSpec& spec, std::span<const double> grid, const SparseOptions& options) {
    check_inputs(y_q, x_m, spec, grid);
    const Eigen::MatrixXd x_q = aggregate_columns(x_m, spec);
    std::vector<Eigen::Index> all(static_cast<std::size_t>(x_m.cols()));
    for (Eigen::Index j = 0; j < x_m.cols(); ++j) all[static_cast<std::size_t>(j)] = j;

    std::vector<RhoPipeline> pipelines;
    pipelines.reserve(grid.size());
    for (double rho : grid) pipelines.push_back(run_pipeline(rho, y_q, x_q, spec, options, all, Eigen::VectorXd()));
    return select_and_distribute(pipelines, x_m, spec, Method::SpTD);
}

DisaggregationResult adaptive_sp_td(const Eigen::Ref<const Eigen::VectorXd>& y_q,
                                    const Eigen::Ref<const Eigen::MatrixXd>& x_m, const AggregationSpec& spec,
                                    std::span<const double> grid, const SparseOptions& options) {
    DisaggregationResult stage1 = sp_td(y_q, x_m, spec, grid, options);
    stage1.method = Method::AdaptiveSpTD;
    const auto& init = std::get<SparseFit>(stage1.fit);
    if (init.support.empty()) {
        stage1.notices.push_back(
            "FallbackNotice: the initial sparse fit selected no indicators; returning the intercept-only fit");
        return stage1;
    }

    const Eigen::MatrixXd x_q = aggregate_columns(x_m, spec);
    Eigen::VectorXd weights(static_cast<Eigen::Index>(init.support.size()));
    for (std::size_t k = 0; k < init.support.size(); ++k)
        weights(static_cast<Eigen::Index>(k)) = std::abs(init.beta(init.support[k]));

    std::vector<RhoPipeline> pipelines;
    pipelines.reserve(grid.size());
    for (double rho : grid) pipelines.push_back(run_pipeline(rho, y_q, x_q, spec, options, init.support, weights));
    return select_and_distribute(pipelines, x_m, spec, Method::AdaptiveSpTD);
}

DisaggregationResult disaggregate(const Eigen::Ref<const Eigen::VectorXd>& y_q, const Eigen::Ref<const Eigen::MatrixXd>& x_m,
                                  const AggregationSpec& spec, Method method, std::span<const double> grid) {
    switch (method) {
        case Method::SpTD:
            return sp_td(y_q, x_m, spec, grid);
        case Method::AdaptiveSpTD:
            return adaptive_sp_td(y_q, x_m, spec, grid);
        default:
            return disaggregate_classical(y_q, x_m, spec, method, grid);
    }
}

}  // namespace tempdisagg
