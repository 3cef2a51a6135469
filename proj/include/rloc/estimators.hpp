#pragma once

#include <Eigen/Dense>
#include <optional>
#include <string>

#include "rloc/design.hpp"
#include "rloc/gtrs.hpp"

namespace rloc {

enum class Method {
    LsGn,
    SLs,
    BiasEli,
    BiasEliLin,
    NoiseEst,
    NoiseEstLin,
    WBiasEliLin,
    AWBiasEliLin,
};

std::string method_name(Method m);
Method method_from_name(const std::string& name);

struct Estimate {
    Eigen::VectorXd x;                       // position estimate
    std::optional<double> sigma2;            // Noise-Est family only
    std::optional<Eigen::VectorXd> lifted;   // y or y-bar when available
    Method method = Method::BiasEliLin;
    bool two_step = false;

    // Diagnostics
    std::string solver_path; // "regular", "hard_case", "closed_form", "active_constraint"
    int iterations = 0;
    double objective = 0.0;
    double condition_number = 0.0;
};

struct VarianceEstimates {
    std::vector<double> sigma2; // per sensor
    int sample_count = 0;       // T
};

// GTRS-backed Bias-Eli estimate (design built in bias_eli or weighted mode).
Estimate bias_eli(const DesignSystem& design);

// Closed form (A^T A)^{-1} A^T b.
Estimate bias_eli_lin(const DesignSystem& design);

// Convex QCQP: unconstrained solution if feasible, else the active-constraint
// solve via bisection on c(lambda) over lambda >= 0.
Estimate noise_est(const DesignSystem& design);

// Closed form on b-bar; sigma2 may come out negative and is not clamped.
Estimate noise_est_lin(const DesignSystem& design);

// Per-sensor sample variances; T = 1 returns all ones (the Trial-6 convention).
VarianceEstimates estimate_variances(const MeasurementSet& meas, int num_sensors);

// Weighted closed form (A^T W A)^{-1} A^T W b_sigma; known variances.
Estimate w_bias_eli_lin(const DesignSystem& design);

// Same with estimated variances; near-zero estimates are floored with a warning.
Estimate aw_bias_eli_lin(const Scenario& scenario, const MeasurementSet& meas,
                         const VarianceEstimates& var_est, bool* floored_warning = nullptr);

} // namespace rloc
