#include <algorithm>
#include <cmath>
#include <string>

#include "tempdisagg/errors.hpp"
#include "tempdisagg/sparse.hpp"

namespace tempdisagg {
namespace {

// Steps shorter than this fraction of the initial correlation are merged
// into the previous knot so knots stay strictly decreasing.
constexpr double kMergeTolerance = 1e-12;
// Smallest step after which a dropped column may re-enter.
constexpr double kReentryTolerance = 1e-9;
// Entering column must make at least this angle with the active span.
constexpr double kCollinearTolerance = 1e-12;

class ActiveSet {
public:
    explicit ActiveSet(Eigen::Index d) : member_(static_cast<std::size_t>(d), false) {}

    void add(Eigen::Index j, double sign) {
        indices_.push_back(j);
        signs_.push_back(sign);
        member_[static_cast<std::size_t>(j)] = true;
    }

    void remove_at(std::size_t k) {
        member_[static_cast<std::size_t>(indices_[k])] = false;
        indices_.erase(indices_.begin() + static_cast<std::ptrdiff_t>(k));
        signs_.erase(signs_.begin() + static_cast<std::ptrdiff_t>(k));
    }

    [[nodiscard]] bool contains(Eigen::Index j) const { return member_[static_cast<std::size_t>(j)]; }
    [[nodiscard]] std::size_t size() const noexcept { return indices_.size(); }
    [[nodiscard]] Eigen::Index index(std::size_t k) const { return indices_[k]; }
    [[nodiscard]] double sign(std::size_t k) const { return signs_[k]; }

private:
    std::vector<Eigen::Index> indices_;
    std::vector<double> signs_;
    std::vector<bool> member_;
};

Eigen::MatrixXd gather_columns(const Eigen::Ref<const Eigen::MatrixXd>& x, const ActiveSet& active) {
    Eigen::MatrixXd out(x.rows(), static_cast<Eigen::Index>(active.size()));
    for (std::size_t k = 0; k < active.size(); ++k) out.col(static_cast<Eigen::Index>(k)) = x.col(active.index(k));
    return out;
}

void check_entering_column(const Eigen::Ref<const Eigen::MatrixXd>& x, const ActiveSet& active, Eigen::Index j) {
    const Eigen::VectorXd column = x.col(j);
    const double norm = column.norm();
    if (!(norm > 0.0)) throw DegenerateDesignError("column " + std::to_string(j) + " is identically zero");
    if (active.size() == 0) return;
    const Eigen::MatrixXd xa = gather_columns(x, active);
    const Eigen::VectorXd coef = xa.colPivHouseholderQr().solve(column);
    const double sine = (column - xa * coef).norm() / norm;
    if (sine < kCollinearTolerance)
        throw DegenerateDesignError("column " + std::to_string(j) +
                                    " is collinear with the active set (sin angle " + std::to_string(sine) + ")");
}

}  // namespace

std::size_t default_max_steps(Eigen::Index n, Eigen::Index d) noexcept {
    const Eigen::Index steps = std::min(n - 1, d);
    return static_cast<std::size_t>(std::max<Eigen::Index>(steps, 1));
}

LarsPath lars_path(const Eigen::Ref<const Eigen::VectorXd>& y, const Eigen::Ref<const Eigen::MatrixXd>& x,
                   std::optional<std::size_t> max_steps) {
    const Eigen::Index n = x.rows();
    const Eigen::Index d = x.cols();
    if (y.size() != n)
        throw ShapeError("length of response", static_cast<std::size_t>(n), static_cast<std::size_t>(y.size()));
    const std::size_t steps = max_steps.value_or(default_max_steps(n, d));
    if (steps == 0) throw DomainError("max_steps must be positive");

    LarsPath path;
    Eigen::VectorXd beta = Eigen::VectorXd::Zero(d);
    if (d == 0) {
        path.knots.push_back(0.0);
        path.betas.push_back(beta);
        return path;
    }

    Eigen::VectorXd corr = x.transpose() * y;
    Eigen::Index first = 0;
    double c_max = corr.cwiseAbs().maxCoeff(&first);
    path.knots.push_back(2.0 * c_max);
    path.betas.push_back(beta);
    if (!(c_max > 0.0)) return path;

    const double merge_tol = kMergeTolerance * c_max;
    const double reentry_tol = kReentryTolerance * c_max;
    // Once the active set spans the column space only the final step to lambda = 0 remains.
    const auto saturated = static_cast<std::size_t>(x.colPivHouseholderQr().rank());
    ActiveSet active(d);
    check_entering_column(x, active, first);
    active.add(first, corr(first) > 0.0 ? 1.0 : -1.0);
    path.actions.push_back({LarsAction::Type::Enter, first, 0});

    Eigen::Index blocked = -1;  // just dropped; may not re-enter at the same knot
    std::size_t produced = 0;
    // merged zero-length steps do not count towards max_steps; bound them anyway
    std::size_t iterations_left = 4 * (steps + static_cast<std::size_t>(d)) + 16;
    while (produced < steps && iterations_left-- > 0) {
        const std::size_t m = active.size();
        const Eigen::MatrixXd xa = gather_columns(x, active);
        Eigen::LLT<Eigen::MatrixXd> gram(xa.transpose() * xa);
        if (gram.info() != Eigen::Success) throw DegenerateDesignError("active Gram matrix is singular");
        Eigen::VectorXd signs(static_cast<Eigen::Index>(m));
        for (std::size_t k = 0; k < m; ++k) signs(static_cast<Eigen::Index>(k)) = active.sign(k);
        // Coefficient direction per unit decrease of the common correlation.
        const Eigen::VectorXd direction = gram.solve(signs);
        const Eigen::VectorXd along = x.transpose() * (xa * direction);

        enum class Event { Finish, Enter, Drop } event = Event::Finish;
        double gamma = c_max;
        Eigen::Index who = -1;
        std::size_t drop_slot = 0;

        for (Eigen::Index j = 0; j < d && m < saturated; ++j) {
            if (active.contains(j)) continue;
            const double cj = corr(j);
            const double aj = along(j);
            for (const double s : {1.0, -1.0}) {
                const double denom = 1.0 - s * aj;
                if (!(denom > 1e-15)) continue;
                double g = (c_max - s * cj) / denom;
                if (g < -merge_tol) continue;
                g = std::max(g, 0.0);
                // a just-dropped column sits exactly at the boundary; only a later crossing counts
                if (j == blocked && g <= reentry_tol) continue;
                if (g < gamma) {
                    gamma = g;
                    event = Event::Enter;
                    who = j;
                }
            }
        }
        for (std::size_t k = 0; k < m; ++k) {
            const double w = direction(static_cast<Eigen::Index>(k));
            if (w == 0.0) continue;
            const double g = -beta(active.index(k)) / w;
            if (g > 0.0 && g < gamma) {
                gamma = g;
                event = Event::Drop;
                who = active.index(k);
                drop_slot = k;
            }
        }

        for (std::size_t k = 0; k < m; ++k)
            beta(active.index(k)) += gamma * direction(static_cast<Eigen::Index>(k));
        c_max -= gamma;

        if (event == Event::Finish || c_max <= merge_tol) {
            // lambda = 0: the active-set least-squares solution
            path.knots.push_back(0.0);
            path.betas.push_back(beta);
            break;
        }

        const bool new_knot = gamma > merge_tol;
        const std::size_t knot_index = new_knot ? path.knots.size() : path.knots.size() - 1;
        if (event == Event::Drop) {
            beta(who) = 0.0;
            active.remove_at(drop_slot);
            blocked = who;
            path.actions.push_back({LarsAction::Type::Drop, who, knot_index});
        } else {
            const double cj = corr(who) - gamma * along(who);
            check_entering_column(x, active, who);
            active.add(who, cj > 0.0 ? 1.0 : -1.0);
            blocked = -1;
            path.actions.push_back({LarsAction::Type::Enter, who, knot_index});
        }

        corr = x.transpose() * (y - x * beta);
        if (new_knot) {
            path.knots.push_back(2.0 * c_max);
            path.betas.push_back(beta);
            ++produced;
        } else {
            path.betas.back() = beta;
        }
    }
    return path;
}

LarsPath lars_path_weighted(const Eigen::Ref<const Eigen::VectorXd>& y, const Eigen::Ref<const Eigen::MatrixXd>& x,
                            const Eigen::Ref<const Eigen::VectorXd>& weights, std::optional<std::size_t> max_steps) {
    if (weights.size() != x.cols())
        throw ShapeError("number of penalty weights", static_cast<std::size_t>(x.cols()),
                         static_cast<std::size_t>(weights.size()));
    if ((weights.array() <= 0.0).any() || !weights.allFinite())
        throw DomainError("penalty weights must be positive and finite");
    const Eigen::MatrixXd scaled = x * weights.asDiagonal();
    LarsPath path = lars_path(y, scaled, max_steps);
    for (auto& b : path.betas) b = b.cwiseProduct(weights);
    return path;
}

}  // namespace tempdisagg
