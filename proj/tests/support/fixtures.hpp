#pragma once

#include <random>

#include <Eigen/Dense>

#include "oracles.hpp"

namespace fixture {

// n x (base + duplicates) panel: independent Gaussian columns followed by
// near-copies (corr > 0.99) of the first `duplicates` of them.
inline Eigen::MatrixXd panel_with_near_duplicates(Eigen::Index n, Eigen::Index base, Eigen::Index duplicates,
                                                  std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    Eigen::MatrixXd x(n, base + duplicates);
    x.leftCols(base) = oracle::gaussian_matrix(n, base, rng);
    x.rightCols(duplicates) = x.leftCols(duplicates) + 0.02 * oracle::gaussian_matrix(n, duplicates, rng);
    return x;
}

// Indicators 0 and 1 share correlation `corr`; only 0 carries signal among
// the pair. Indicators 2.. are independent, with two more true coefficients.
struct CorrelatedDesign {
    Eigen::MatrixXd x;
    Eigen::VectorXd beta;
};

inline CorrelatedDesign correlated_pair_design(Eigen::Index n, Eigen::Index d, double corr, std::mt19937_64& rng) {
    CorrelatedDesign out;
    out.x = oracle::gaussian_matrix(n, d, rng);
    out.x.col(1) = corr * out.x.col(0) + std::sqrt(1.0 - corr * corr) * out.x.col(1);
    out.beta = Eigen::VectorXd::Zero(d);
    out.beta(0) = 1.0;
    out.beta(2) = 1.0;
    out.beta(3) = -1.0;
    return out;
}

}  // namespace fixture
