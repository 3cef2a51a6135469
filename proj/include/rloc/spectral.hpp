#pragma once

#include <Eigen/Dense>

#include "rloc/scenario.hpp"

namespace rloc {

// Congruence R with R^T (A^T A) R = I and R^T D R = diag(delta), delta >= 0.
// Normalized so gamma_i = 1 throughout.
struct Diagonalization {
    Eigen::MatrixXd R;
    Eigen::VectorXd gamma; // all ones under this normalization
    Eigen::VectorXd delta;
};

// R = L^{-T} Q where AtA = L L^T and Q diagonalizes L^{-1} D L^{-T}.
// delta entries within 1e-12 of zero are clamped to zero (D is PSD).
Diagonalization simdiag(const Eigen::MatrixXd& AtA, const Eigen::MatrixXd& D);

// Smallest lambda with AtA + lambda * D PSD, i.e. -1 / theta_max where
// theta_max is the top eigenvalue of L^{-1} D L^{-T}.
double lambda_lower(const Eigen::MatrixXd& AtA, const Eigen::MatrixXd& D);

} // namespace rloc
