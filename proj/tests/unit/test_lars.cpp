#include <gtest/gtest.h>

#include "oracles.hpp"
#include "tempdisagg/errors.hpp"
#include "tempdisagg/sparse.hpp"

using namespace tempdisagg;

namespace {

// Random design with correlated columns, which makes drops along the path likely.
Eigen::MatrixXd correlated_design(Eigen::Index n, Eigen::Index d, std::mt19937_64& rng) {
    const Eigen::MatrixXd z = oracle::gaussian_matrix(n, d, rng);
    Eigen::MatrixXd mix = Eigen::MatrixXd::Identity(d, d) + 0.6 * oracle::gaussian_matrix(d, d, rng);
    return z * mix;
}

std::size_t nonzeros(const Eigen::VectorXd& b) { return static_cast<std::size_t>((b.array() != 0.0).count()); }

}  // namespace

TEST(LarsPath, OrthonormalDesignIsSoftThresholding) {
    std::mt19937_64 rng(1);
    const Eigen::MatrixXd q = oracle::gaussian_matrix(10, 4, rng).householderQr().householderQ() *
                              Eigen::MatrixXd::Identity(10, 4);
    const Eigen::VectorXd y = oracle::gaussian_vector(10, rng);
    const Eigen::VectorXd z = q.transpose() * y;
    const LarsPath path = lars_path(y, q);
    ASSERT_EQ(path.size(), 5u);
    for (std::size_t k = 0; k < path.size(); ++k) {
        for (Eigen::Index j = 0; j < 4; ++j)
            EXPECT_NEAR(path.betas[k](j), oracle::soft_threshold(z(j), path.knots[k] / 2.0), 1e-12);
    }
    EXPECT_NEAR(path.knots[0], 2.0 * z.cwiseAbs().maxCoeff(), 1e-12);
    EXPECT_EQ(path.knots.back(), 0.0);
}

TEST(LarsPath, SmallInstanceMatchesCoordinateDescent) {
    std::mt19937_64 rng(2);
    const Eigen::MatrixXd x = oracle::gaussian_matrix(8, 3, rng);
    const Eigen::VectorXd y = oracle::gaussian_vector(8, rng);
    const LarsPath path = lars_path(y, x);
    ASSERT_GE(path.size(), 2u);
    for (std::size_t k = 0; k < path.size(); ++k) {
        const Eigen::VectorXd cd = oracle::lasso_coordinate_descent(y, x, path.knots[k]);
        EXPECT_LT((path.betas[k] - cd).cwiseAbs().maxCoeff(), 1e-6) << "knot " << k;
    }
}

TEST(LarsPath, SingleVariableClosedForm) {
    std::mt19937_64 rng(3);
    const Eigen::VectorXd x = oracle::gaussian_vector(9, rng);
    const Eigen::VectorXd y = oracle::gaussian_vector(9, rng);
    const LarsPath path = lars_path(y, x);
    const double xty = x.dot(y);
    ASSERT_EQ(path.size(), 2u);
    EXPECT_NEAR(path.knots[0], 2.0 * std::abs(xty), 1e-12);
    EXPECT_EQ(path.betas[0](0), 0.0);
    EXPECT_EQ(path.knots[1], 0.0);
    EXPECT_NEAR(path.betas[1](0), xty / x.squaredNorm(), 1e-12);
    // between knots the solution is linear in lambda
    for (double t : {0.1, 0.5, 0.9}) {
        const double lambda = t * path.knots[0];
        const double interpolated = (1.0 - lambda / path.knots[0]) * path.betas[1](0);
        EXPECT_NEAR(oracle::lasso_coordinate_descent(y, x, lambda)(0), interpolated, 1e-9);
    }
}

TEST(LarsPath, KktCertificateAtEveryKnot) {
    std::mt19937_64 rng(4);
    for (int rep = 0; rep < 40; ++rep) {
        const Eigen::Index n = 10 + rep % 7;
        const Eigen::Index d = 3 + rep % 9;
        const Eigen::MatrixXd x = correlated_design(n, d, rng);
        const Eigen::VectorXd y = oracle::gaussian_vector(n, rng);
        const LarsPath path = lars_path(y, x, 3 * d);
        // rank(x) = min(n, d) here; sp_td projects out the intercept first, which gives n - 1
        const auto bound = static_cast<std::size_t>(x.colPivHouseholderQr().rank());
        ASSERT_EQ(path.betas.size(), path.knots.size());
        EXPECT_TRUE(path.betas[0].isZero(0.0));
        for (std::size_t k = 0; k < path.size(); ++k) {
            EXPECT_LT(oracle::kkt_violation(y, x, path.betas[k], path.knots[k]), 1e-6 * (1.0 + path.knots[0]));
            EXPECT_LE(nonzeros(path.betas[k]), bound);
            if (k > 0) {
                EXPECT_LT(path.knots[k], path.knots[k - 1]);
            }
        }
    }
}

TEST(LarsPath, DropsAreRecordedAndNotReenteredAtTheSameKnot) {
    std::mt19937_64 rng(5);
    int drops = 0;
    for (int rep = 0; rep < 300; ++rep) {
        const Eigen::MatrixXd x = correlated_design(12, 6, rng);
        const Eigen::VectorXd y = oracle::gaussian_vector(12, rng);
        // coordinate descent cannot converge in reasonable time on badly conditioned designs
        const Eigen::VectorXd sv = x.jacobiSvd().singularValues();
        if (sv(0) > 100.0 * sv(sv.size() - 1)) continue;
        const LarsPath path = lars_path(y, x, 24);
        for (std::size_t a = 0; a < path.actions.size(); ++a) {
            if (path.actions[a].type != LarsAction::Type::Drop) continue;
            ++drops;
            const auto k = path.actions[a].knot;
            EXPECT_EQ(path.betas[k](path.actions[a].variable), 0.0);
            if (a + 1 < path.actions.size() && path.actions[a + 1].variable == path.actions[a].variable) {
                EXPECT_GT(path.actions[a + 1].knot, k);
            }
            for (std::size_t j = 0; j < path.size(); ++j) {
                const Eigen::VectorXd cd = oracle::lasso_coordinate_descent(y, x, path.knots[j]);
                EXPECT_LT((path.betas[j] - cd).cwiseAbs().maxCoeff(), 1e-6);
            }
        }
    }
    EXPECT_GT(drops, 0) << "fixture never exercised a drop";
}

TEST(LarsPath, MaxStepsTruncates) {
    std::mt19937_64 rng(6);
    const Eigen::MatrixXd x = oracle::gaussian_matrix(30, 10, rng);
    const Eigen::VectorXd y = oracle::gaussian_vector(30, rng);
    const LarsPath path = lars_path(y, x, 3);
    EXPECT_EQ(path.size(), 4u);
    EXPECT_GT(path.knots.back(), 0.0);
    EXPECT_EQ(default_max_steps(17, 100), 16u);
    EXPECT_EQ(default_max_steps(40, 20), 20u);
    EXPECT_THROW((void)lars_path(y, x, 0), DomainError);
    EXPECT_THROW((void)lars_path(y.head(29), x), ShapeError);
}

TEST(LarsPath, WideDesignSaturatesWithoutError) {
    std::mt19937_64 rng(7);
    for (int rep = 0; rep < 20; ++rep) {
        const Eigen::MatrixXd x = oracle::gaussian_matrix(9, 40, rng);
        const Eigen::VectorXd y = oracle::gaussian_vector(9, rng);
        const LarsPath path = lars_path(y, x, 60);
        EXPECT_EQ(path.knots.back(), 0.0);
        EXPECT_LE(nonzeros(path.betas.back()), 9u);
        EXPECT_LT((y - x * path.betas.back()).norm(), 1e-8 * y.norm());
    }
}

TEST(LarsPath, DuplicateColumnsNeverBothActive) {
    std::mt19937_64 rng(8);
    Eigen::MatrixXd x = oracle::gaussian_matrix(15, 4, rng);
    x.col(3) = x.col(1);
    const Eigen::VectorXd y = oracle::gaussian_vector(15, rng);
    const LarsPath path = lars_path(y, x, 10);
    for (const auto& b : path.betas) EXPECT_FALSE(b(1) != 0.0 && b(3) != 0.0);
}

TEST(LarsPath, ZeroResponseGivesSingleKnot) {
    std::mt19937_64 rng(9);
    const LarsPath path = lars_path(Eigen::VectorXd::Zero(6), oracle::gaussian_matrix(6, 3, rng));
    ASSERT_EQ(path.size(), 1u);
    EXPECT_EQ(path.knots[0], 0.0);
}

TEST(LarsPathWeighted, EqualWeightsRescaleLambdaOnly) {
    std::mt19937_64 rng(10);
    const Eigen::MatrixXd x = oracle::gaussian_matrix(14, 5, rng);
    const Eigen::VectorXd y = oracle::gaussian_vector(14, rng);
    const LarsPath plain = lars_path(y, x);
    const LarsPath weighted = lars_path_weighted(y, x, Eigen::VectorXd::Constant(5, 2.5));
    ASSERT_EQ(plain.size(), weighted.size());
    for (std::size_t k = 0; k < plain.size(); ++k) {
        EXPECT_NEAR(weighted.knots[k], 2.5 * plain.knots[k], 1e-10 * (1.0 + plain.knots[0]));
        EXPECT_LT((weighted.betas[k] - plain.betas[k]).cwiseAbs().maxCoeff(), 1e-10);
    }
}

TEST(LarsPathWeighted, SolvesWeightedPenalty) {
    std::mt19937_64 rng(11);
    const Eigen::MatrixXd x = oracle::gaussian_matrix(12, 4, rng);
    const Eigen::VectorXd y = oracle::gaussian_vector(12, rng);
    const Eigen::Vector4d w(0.5, 2.0, 1.0, 3.0);
    const LarsPath path = lars_path_weighted(y, x, w);
    // beta solves ||y - X b||^2 + lambda * sum |b_j| / w_j
    const Eigen::MatrixXd xw = x * w.asDiagonal();
    for (std::size_t k = 0; k < path.size(); ++k) {
        const Eigen::VectorXd theta = oracle::lasso_coordinate_descent(y, xw, path.knots[k]);
        EXPECT_LT((path.betas[k] - theta.cwiseProduct(w)).cwiseAbs().maxCoeff(), 1e-6);
    }
    EXPECT_THROW((void)lars_path_weighted(y, x, Eigen::Vector4d(1, 0, 1, 1)), DomainError);
    EXPECT_THROW((void)lars_path_weighted(y, x, Eigen::Vector3d(1, 1, 1)), ShapeError);
}
