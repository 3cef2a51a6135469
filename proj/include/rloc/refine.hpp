#pragma once

#include <Eigen/Dense>
#include <optional>

#include "rloc/estimators.hpp"
#include "rloc/scenario.hpp"

namespace rloc {

// One Gauss-Newton step on the range residuals:
// x + (J^T W J)^{-1} J^T W (d - f(x)), J rows (x - a_i)^T / ||x - a_i||.
// weights: optional per-measurement 1/sigma^2 entries (the WLS/AWLS second step).
Eigen::VectorXd gn_step(const Eigen::VectorXd& x0, const Scenario& scenario,
                        const MeasurementSet& meas,
                        const std::optional<Eigen::VectorXd>& weights = std::nullopt);

// Per-measurement weights 1/sigma_i^2 from a per-sensor variance list.
Eigen::VectorXd expand_weights(const std::vector<double>& sigma2_per_sensor,
                               const MeasurementSet& meas);

enum class FirstStep { BiasEli, BiasEliLin, NoiseEst, NoiseEstLin, WBiasEliLin, AWBiasEliLin, SLs };

// Two-step estimator: first-step estimate followed by exactly one GN step
// (weighted in the heterogeneous variants). sigma2: known variance for the
// Bias-Eli family; ignored by the Noise-Est family.
Estimate two_step(FirstStep first, const Scenario& scenario, const MeasurementSet& meas,
                  std::optional<double> sigma2 = std::nullopt);

// First step only, same selector (used by the harness to sweep estimators).
Estimate first_step(FirstStep first, const Scenario& scenario, const MeasurementSet& meas,
                    std::optional<double> sigma2 = std::nullopt);

// Iterated GN to convergence; diagnostics oracle, not claimed globally optimal.
Estimate gn_converge(const Eigen::VectorXd& x0, const Scenario& scenario,
                     const MeasurementSet& meas,
                     const std::optional<Eigen::VectorXd>& weights = std::nullopt,
                     double tol = 1e-10, int max_iter = 100);

} // namespace rloc
