#include "tempdisagg/covariance.hpp"

#include <cmath>
#include <string>

#include "tempdisagg/errors.hpp"

namespace tempdisagg {
namespace {

void require_size(Eigen::Index p) {
    if (p < 1) throw DomainError("covariance size must be >= 1, got " + std::to_string(p));
}

void require_rho(double rho) {
    if (!std::isfinite(rho) || std::abs(rho) >= 1.0)
        throw DomainError("autoregressive parameter must satisfy |rho| < 1, got " +
                          std::to_string(rho));
}

// Tridiagonal precision (HD)'(HD) with D the first-difference matrix and
// H = I - rho * subdiagonal. rho = 0 gives the Fernandez precision.
Eigen::MatrixXd difference_precision(double rho, Eigen::Index p) {
    // HD is lower-triangular with bandwidth 2: diag 1, sub1 -(1+rho), sub2 rho.
    Eigen::MatrixXd hd = Eigen::MatrixXd::Zero(p, p);
    for (Eigen::Index i = 0; i < p; ++i) {
        hd(i, i) = 1.0;
        if (i >= 1) hd(i, i - 1) = -(1.0 + rho);
        if (i >= 2) hd(i, i - 2) = rho;
    }
    return hd.transpose() * hd;
}

CovarianceFactor invert_precision(const Eigen::MatrixXd& precision) {
    const Eigen::Index p = precision.rows();
    Eigen::LLT<Eigen::MatrixXd> llt(precision);
    if (llt.info() != Eigen::Success) throw NumericalError("difference precision is not positive-definite");
    Eigen::MatrixXd shape = llt.solve(Eigen::MatrixXd::Identity(p, p));
    return factor_spd(std::move(shape));
}

}  // namespace

CovarianceFactor factor_spd(Eigen::MatrixXd matrix) {
    if (matrix.rows() != matrix.cols()) throw ShapeError("covariance must be square");
    // symmetrize away round-off from products and solves
    matrix = 0.5 * (matrix + matrix.transpose()).eval();

    Eigen::LLT<Eigen::MatrixXd> llt(matrix);
    if (llt.info() != Eigen::Success) throw NumericalError("Cholesky factorization failed: matrix is not positive-definite");
    Eigen::MatrixXd lower = llt.matrixL();
    double log_det = 0.0;
    for (Eigen::Index j = 0; j < lower.rows(); ++j) {
        const double pivot = lower(j, j) * lower(j, j);
        if (!(pivot > kMinCholeskyPivot))
            throw NumericalError("Cholesky pivot " + std::to_string(pivot) + " at index " +
                                 std::to_string(j) + " is not positive");
        log_det += std::log(pivot);
    }
    return CovarianceFactor{std::move(matrix), std::move(lower), log_det};
}

CovarianceFactor build_ar1_shape(double rho, Eigen::Index p) {
    require_rho(rho);
    require_size(p);
    const double scale = 1.0 / (1.0 - rho * rho);
    Eigen::VectorXd powers(p);
    powers(0) = scale;
    for (Eigen::Index k = 1; k < p; ++k) powers(k) = powers(k - 1) * rho;

    Eigen::MatrixXd shape(p, p);
    for (Eigen::Index i = 0; i < p; ++i)
        for (Eigen::Index j = 0; j < p; ++j) shape(i, j) = powers(std::abs(i - j));
    return factor_spd(std::move(shape));
}

CovarianceFactor build_fernandez_shape(Eigen::Index p) {
    require_size(p);
    return invert_precision(difference_precision(0.0, p));
}

CovarianceFactor build_litterman_shape(double rho, Eigen::Index p) {
    require_rho(rho);
    require_size(p);
    return invert_precision(difference_precision(rho, p));
}

CovarianceFactor build_shape(CovarianceKind kind, double rho, Eigen::Index p) {
    switch (kind) {
        case CovarianceKind::AR1:
            return build_ar1_shape(rho, p);
        case CovarianceKind::Fernandez:
            return build_fernandez_shape(p);
        case CovarianceKind::Litterman:
            return build_litterman_shape(rho, p);
    }
    throw DomainError("unknown covariance kind");
}

}  // namespace tempdisagg
