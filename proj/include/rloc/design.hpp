#pragma once

#include <Eigen/Dense>
#include <optional>

#include "rloc/scenario.hpp"

namespace rloc {

enum class DesignMode { BiasEli, NoiseEst, Weighted };

// Matrices shared by all linear and GTRS estimators. Row k of A is
// [-2 a_{s(k)}^T, 1]; the right-hand side depends on the mode:
//   bias_eli:  rhs_k = d_k^2 - ||a||^2 - sigma^2
//   noise_est: rhs_k = d_k^2 - ||a||^2
//   weighted:  rhs_k = d_k^2 - ||a||^2 - sigma_{s(k)}^2, plus diagonal weights.
struct DesignSystem {
    DesignMode mode = DesignMode::BiasEli;
    int dim = 0;                   // n
    Eigen::MatrixXd A;             // m x (n+1)
    Eigen::VectorXd rhs;           // m
    Eigen::MatrixXd D;             // diag(I_n, 0)
    Eigen::VectorXd g;             // [0,...,0,-0.5]
    std::optional<Eigen::VectorXd> weights; // diagonal of W, m entries
};

// sigma2_input: required for BiasEli (scalar, broadcast) and Weighted
// (per-sensor list, expanded to per-measurement); must be absent for NoiseEst.
DesignSystem build_design(const Scenario& scenario, const MeasurementSet& meas, DesignMode mode,
                          std::optional<Eigen::VectorXd> sigma2_input = std::nullopt);

// Lift of the true target: [x^o; ||x^o||^2] or [x^o; ||x^o||^2 + sigma^2].
Eigen::VectorXd true_lift(const Scenario& scenario, DesignMode mode);

Eigen::MatrixXd constraint_matrix(int n); // diag(I_n, 0)
Eigen::VectorXd constraint_vector(int n); // [0,...,0,-0.5]

} // namespace rloc
