#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <numbers>

#include "oracles.hpp"
#include "tempdisagg/dgp.hpp"
#include "tempdisagg/errors.hpp"
#include "tempdisagg/gls.hpp"

using namespace tempdisagg;

namespace {

constexpr double kLog2Pi = 1.8378770664093453;  // log(2 pi)

DgpOutput classic_instance(std::uint64_t seed, ErrorProcess process = ErrorProcess::ChowLin, double rho = 0.8,
                           AggregationMode mode = AggregationMode::Sum) {
    DgpConfig cfg;
    cfg.n_low = 17;
    cfg.n_high = 68;
    cfg.ratio = 4;
    cfg.d = 5;
    cfg.rho = rho;
    cfg.error_process = process;
    cfg.agg_mode = mode;
    cfg.seed = seed;
    return generate(cfg);
}

}  // namespace

TEST(GaussianLoglik, ConstantOnly) {
    EXPECT_NEAR(gaussian_loglik(Eigen::VectorXd::Zero(4), Eigen::MatrixXd::Identity(4, 4), 1.0), -2.0 * kLog2Pi,
                1e-14);
}

TEST(GaussianLoglik, UnitResiduals) {
    EXPECT_NEAR(gaussian_loglik(Eigen::VectorXd::Ones(2), Eigen::MatrixXd::Identity(2, 2), 1.0), -kLog2Pi - 1.0,
                1e-14);
}

TEST(GaussianLoglik, MatchesDenseMvnDensity) {
    std::mt19937_64 rng(21);
    for (int rep = 0; rep < 10; ++rep) {
        const Eigen::MatrixXd s = oracle::random_spd(9, rng);
        const Eigen::VectorXd r = oracle::gaussian_vector(9, rng);
        const double sigma2 = 0.3 + rep;
        EXPECT_NEAR(gaussian_loglik(r, s, sigma2), oracle::mvn_log_density(r, sigma2 * s), 1e-9);
    }
}

TEST(GaussianLoglik, RejectsNonPositiveVariance) {
    EXPECT_THROW((void)gaussian_loglik(Eigen::VectorXd::Ones(2), Eigen::MatrixXd::Identity(2, 2), 0.0), DomainError);
    EXPECT_THROW((void)gaussian_loglik(Eigen::VectorXd::Ones(2), Eigen::MatrixXd::Identity(2, 2), -1.0), DomainError);
}

TEST(GlsEstimate, IdentityCovarianceIsOls) {
    std::mt19937_64 rng(1);
    const Eigen::MatrixXd x = oracle::gaussian_matrix(15, 4, rng);
    const Eigen::VectorXd y = oracle::gaussian_vector(15, rng);
    const GlsFit fit = gls_estimate(y, x, Eigen::MatrixXd::Identity(15, 15));
    const Eigen::VectorXd ols = (x.transpose() * x).inverse() * x.transpose() * y;
    EXPECT_LT((fit.beta - ols).cwiseAbs().maxCoeff(), 1e-12);
    EXPECT_EQ(fit.residuals_low, y - x * fit.beta);
    EXPECT_NEAR(fit.sigma2, fit.residuals_low.squaredNorm() / 15.0, 1e-12);
}

TEST(GlsEstimate, ExactFitReportsZeroVariance) {
    std::mt19937_64 rng(2);
    const Eigen::MatrixXd x = oracle::gaussian_matrix(12, 3, rng);
    const Eigen::Vector3d beta(1.5, -2.0, 0.25);
    const GlsFit fit = gls_estimate(x * beta, x, oracle::random_spd(12, rng));
    EXPECT_LT((fit.beta - beta).cwiseAbs().maxCoeff(), 1e-10);
    EXPECT_LT(fit.residuals_low.cwiseAbs().maxCoeff(), 1e-10);
    EXPECT_EQ(fit.sigma2, 0.0);
    EXPECT_EQ(fit.loglik, std::numeric_limits<double>::infinity());
}

TEST(GlsEstimate, MatchesNormalEquationsOracle) {
    std::mt19937_64 rng(3);
    const Eigen::MatrixXd x = oracle::gaussian_matrix(20, 3, rng);
    const Eigen::VectorXd y = oracle::gaussian_vector(20, rng);
    const Eigen::MatrixXd s = oracle::random_spd(20, rng);
    const GlsFit fit = gls_estimate(y, x, s);
    EXPECT_LT((fit.beta - oracle::gls_normal_equations(y, x, s)).cwiseAbs().maxCoeff(), 1e-8);
    const Eigen::VectorXd r = y - x * fit.beta;
    EXPECT_NEAR(fit.sigma2, r.dot(s.inverse() * r) / 20.0, 1e-10);
    EXPECT_NEAR(fit.loglik, oracle::mvn_log_density(r, fit.sigma2 * s), 1e-8);
    EXPECT_GT(fit.sigma2, 0.0);
}

TEST(GlsEstimate, InvariantToCovarianceScale) {
    std::mt19937_64 rng(4);
    const Eigen::MatrixXd x = oracle::gaussian_matrix(18, 2, rng);
    const Eigen::VectorXd y = oracle::gaussian_vector(18, rng);
    const Eigen::MatrixXd s = oracle::toeplitz_ar1(0.6, 18);
    const GlsFit a = gls_estimate(y, x, s);
    const GlsFit b = gls_estimate(y, x, 7.5 * s);
    EXPECT_LT((a.beta - b.beta).cwiseAbs().maxCoeff(), 1e-10);
    EXPECT_NEAR(a.loglik, b.loglik, 1e-10);
    EXPECT_NEAR(a.sigma2, 7.5 * b.sigma2, 1e-10);
}

TEST(GlsEstimate, Errors) {
    std::mt19937_64 rng(5);
    Eigen::MatrixXd x = oracle::gaussian_matrix(10, 3, rng);
    x.col(2) = 2.0 * x.col(0);
    const Eigen::VectorXd y = oracle::gaussian_vector(10, rng);
    EXPECT_THROW((void)gls_estimate(y, x, Eigen::MatrixXd::Identity(10, 10)), RankError);
    EXPECT_THROW((void)gls_estimate(y.head(3), oracle::gaussian_matrix(3, 3, rng), Eigen::MatrixXd::Identity(3, 3)),
                 RankError);
    EXPECT_THROW((void)gls_estimate(y.head(9), x, Eigen::MatrixXd::Identity(10, 10)), ShapeError);
    EXPECT_THROW((void)gls_estimate(y, x.leftCols(2), Eigen::MatrixXd::Identity(9, 9)), ShapeError);
}

TEST(RhoGrid, DefaultAndValidation) {
    const auto grid = default_rho_grid();
    ASSERT_EQ(grid.size(), 199u);
    EXPECT_EQ(grid.front(), -0.99);
    EXPECT_EQ(grid.back(), 0.99);
    EXPECT_EQ(grid[99], 0.0);
    EXPECT_THROW(validate_rho_grid(std::vector<double>{}), InvalidGrid);
    EXPECT_THROW(validate_rho_grid(std::vector<double>{0.2, 1.0}), InvalidGrid);
    EXPECT_THROW(validate_rho_grid(std::vector<double>{std::nan("")}), InvalidGrid);
}

class ProfileSearch : public ::testing::Test {
protected:
    void SetUp() override {
        const DgpOutput data = classic_instance(77);
        y_q = data.y_low;
        x_q = aggregate_columns(data.x, data.spec);
        spec = data.spec;
        builder = [this](double rho) {
            const auto s_m = build_ar1_shape(rho, spec.n_high);
            return RhoProblem{x_q, factor_spd(aggregate_covariance(s_m.matrix, spec))};
        };
    }
    Eigen::VectorXd y_q;
    Eigen::MatrixXd x_q;
    AggregationSpec spec;
    RhoProblemBuilder builder;
};

TEST_F(ProfileSearch, SingleCandidate) {
    const std::vector<double> grid{0.5};
    const auto result = profile_rho_search(y_q, builder, grid);
    EXPECT_EQ(result.rho_hat, 0.5);
    EXPECT_EQ(result.fit.rho, 0.5);
    const GlsFit direct = gls_estimate(y_q, x_q, builder(0.5).s_q);
    EXPECT_EQ(result.fit.beta, direct.beta);
}

TEST_F(ProfileSearch, ArgmaxOverWholeGrid) {
    const auto grid = default_rho_grid();
    const auto result = profile_rho_search(y_q, builder, grid);
    ASSERT_EQ(result.logliks.size(), grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) {
        EXPECT_GE(result.fit.loglik, result.logliks[i]);
        EXPECT_EQ(result.logliks[i], gls_estimate(y_q, x_q, builder(grid[i]).s_q).loglik);
    }
}

TEST_F(ProfileSearch, TiesGoToSmallerAbsoluteRho) {
    auto flat = [this](double) { return RhoProblem{x_q, factor_spd(Eigen::MatrixXd::Identity(y_q.size(), y_q.size()))}; };
    const std::vector<double> grid{0.4, -0.3, 0.3, 0.9};
    EXPECT_EQ(profile_rho_search(y_q, flat, grid).rho_hat, -0.3);
    EXPECT_THROW((void)profile_rho_search(y_q, flat, std::vector<double>{}), InvalidGrid);
}

TEST(DisaggregateClassical, ExactFitDesignReproducesSignal) {
    std::mt19937_64 rng(8);
    const AggregationSpec spec{AggregationMode::Sum, 4, 10, 40};
    const Eigen::MatrixXd x_m = oracle::gaussian_matrix(40, 2, rng);
    const Eigen::Vector2d beta(0.7, -1.3);
    const Eigen::VectorXd truth = x_m * beta;
    for (Method method : {Method::ChowLin, Method::Fernandez, Method::Litterman}) {
        const auto result = disaggregate_classical(aggregate(truth, spec), x_m, spec, method);
        EXPECT_LT((result.y_high - truth).cwiseAbs().maxCoeff(), 1e-8) << to_string(method);
        EXPECT_LT((result.beta() - beta).cwiseAbs().maxCoeff(), 1e-9);
    }
}

TEST(DisaggregateClassical, FernandezEqualsLittermanAtZero) {
    const DgpOutput data = classic_instance(5, ErrorProcess::Fernandez, 0.0);
    const std::vector<double> zero{0.0};
    const auto f = disaggregate_classical(data.y_low, data.x, data.spec, Method::Fernandez);
    const auto l = disaggregate_classical(data.y_low, data.x, data.spec, Method::Litterman, zero);
    EXPECT_LT((f.y_high - l.y_high).cwiseAbs().maxCoeff(), 1e-8);
    EXPECT_EQ(f.rho(), 0.0);
}

TEST(DisaggregateClassical, ChowLinAtZeroIsIdentityCovarianceOls) {
    const DgpOutput data = classic_instance(6);
    const std::vector<double> zero{0.0};
    const auto result = disaggregate_classical(data.y_low, data.x, data.spec, Method::ChowLin, zero);
    const Eigen::MatrixXd c = build_aggregation_matrix(data.spec);
    const Eigen::MatrixXd x_q = c * data.x;
    const Eigen::VectorXd beta = (x_q.transpose() * x_q).inverse() * x_q.transpose() * data.y_low;
    const Eigen::VectorXd expected =
        data.x * beta + c.transpose() * (c * c.transpose()).inverse() * (data.y_low - x_q * beta);
    EXPECT_LT((result.y_high - expected).cwiseAbs().maxCoeff(), 1e-8);
}

TEST(DisaggregateClassical, ScaleEquivariance) {
    const DgpOutput data = classic_instance(9);
    for (Method method : {Method::ChowLin, Method::Fernandez, Method::Litterman}) {
        const auto a = disaggregate_classical(data.y_low, data.x, data.spec, method);
        const auto b = disaggregate_classical(-3.0 * data.y_low, data.x, data.spec, method);
        EXPECT_EQ(a.rho(), b.rho());
        EXPECT_LT((-3.0 * a.y_high - b.y_high).cwiseAbs().maxCoeff(), 1e-8 * a.y_high.cwiseAbs().maxCoeff());
    }
}

TEST(DisaggregateClassical, TemporalConsistencyAllModes) {
    for (AggregationMode mode :
         {AggregationMode::Sum, AggregationMode::Average, AggregationMode::First, AggregationMode::Last}) {
        DgpConfig cfg;
        cfg.n_low = 12;
        cfg.ratio = 3;
        cfg.n_high = 40;  // four extrapolated periods
        cfg.d = 3;
        cfg.rho = 0.5;
        cfg.agg_mode = mode;
        cfg.seed = 31;
        const DgpOutput data = generate(cfg);
        for (Method method : {Method::ChowLin, Method::Fernandez, Method::Litterman}) {
            const auto result = disaggregate_classical(data.y_low, data.x, data.spec, method);
            ASSERT_EQ(result.y_high.size(), 40);
            EXPECT_LT(max_consistency_residual(result.y_high, data.y_low, data.spec), 1e-6);
        }
    }
}

TEST(DisaggregateClassical, ClassicSettingBeatsFlatInterpolation) {
    const DgpOutput data = classic_instance(42);
    const auto result = disaggregate_classical(data.y_low, data.x, data.spec, Method::ChowLin);
    EXPECT_LT(max_consistency_residual(result.y_high, data.y_low, data.spec), 1e-6);
    const double fitted = oracle::correlation(result.y_high, data.y_high);
    const double flat = oracle::correlation(flat_interpolation(data.y_low, data.spec), data.y_high);
    EXPECT_GT(fitted, flat);
    EXPECT_EQ(result.trace.size(), 199u);
}

TEST(DisaggregateClassical, RefusesHighDimensionalDesign) {
    std::mt19937_64 rng(10);
    const AggregationSpec spec{AggregationMode::Sum, 4, 17, 68};
    const Eigen::MatrixXd x_m = oracle::gaussian_matrix(68, 17, rng);
    const Eigen::VectorXd y = oracle::gaussian_vector(17, rng);
    try {
        (void)disaggregate_classical(y, x_m, spec, Method::ChowLin);
        FAIL() << "expected DimensionRegimeError";
    } catch (const DimensionRegimeError& e) {
        EXPECT_NE(std::string(e.what()).find("spTD"), std::string::npos);
        EXPECT_EQ(e.category(), ErrorCategory::Validation);
    }
}
