#include "rloc/estimators.hpp"

#include <cmath>

namespace rloc {

std::string method_name(Method m) {
    switch (m) {
    case Method::LsGn: return "ls-gn";
    case Method::SLs: return "s-ls";
    case Method::BiasEli: return "bias-eli";
    case Method::BiasEliLin: return "bias-eli-lin";
    case Method::NoiseEst: return "noise-est";
    case Method::NoiseEstLin: return "noise-est-lin";
    case Method::WBiasEliLin: return "w-bias-eli-lin";
    case Method::AWBiasEliLin: return "aw-bias-eli-lin";
    }
    return "?";
}

Method method_from_name(const std::string& name) {
    for (Method m : {Method::LsGn, Method::SLs, Method::BiasEli, Method::BiasEliLin,
                     Method::NoiseEst, Method::NoiseEstLin, Method::WBiasEliLin,
                     Method::AWBiasEliLin})
        if (method_name(m) == name) return m;
    throw ConfigError("unknown estimator name: " + name);
}

namespace {

double condition_of(const Eigen::MatrixXd& AtA) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(AtA);
    const double mn = es.eigenvalues().minCoeff();
    const double mx = es.eigenvalues().maxCoeff();
    if (mn <= 0.0) throw NumericalError("A^T A is singular");
    return mx / mn;
}

// Shared closed form for the *-Lin estimators.
Eigen::VectorXd ols(const DesignSystem& d, double* cond) {
    Eigen::MatrixXd AtA;
    Eigen::VectorXd Atb;
    if (d.weights) {
        AtA = d.A.transpose() * d.weights->asDiagonal() * d.A;
        Atb = d.A.transpose() * d.weights->asDiagonal() * d.rhs;
    } else {
        AtA = d.A.transpose() * d.A;
        Atb = d.A.transpose() * d.rhs;
    }
    if (cond) *cond = condition_of(AtA);
    Eigen::LLT<Eigen::MatrixXd> llt(AtA);
    if (llt.info() != Eigen::Success) throw NumericalError("A^T A is rank deficient");
    return llt.solve(Atb);
}

} // namespace

Estimate bias_eli(const DesignSystem& design) {
    if (design.mode == DesignMode::NoiseEst)
        throw ConfigError("bias_eli: design must be built with a known variance");
    const GtrsInstance inst = GtrsInstance::from_design(design);
    const GtrsSolution sol = solve_bias_eli(inst);
    Estimate e;
    e.method = Method::BiasEli;
    e.x = sol.y.head(design.dim);
    e.lifted = sol.y;
    e.solver_path = sol.path == GtrsPath::Regular ? "regular" : "hard_case";
    e.iterations = sol.bisection_iterations;
    e.objective = sol.objective;
    return e;
}

Estimate bias_eli_lin(const DesignSystem& design) {
    if (design.mode == DesignMode::NoiseEst)
        throw ConfigError("bias_eli_lin: design must be built with a known variance");
    Estimate e;
    e.method = Method::BiasEliLin;
    const Eigen::VectorXd y = ols(design, &e.condition_number);
    e.x = y.head(design.dim);
    e.lifted = y;
    e.solver_path = "closed_form";
    e.objective = (design.A * y - design.rhs).squaredNorm();
    return e;
}

Estimate noise_est_lin(const DesignSystem& design) {
    if (design.mode != DesignMode::NoiseEst)
        throw ConfigError("noise_est_lin: design must be built in noise_est mode");
    Estimate e;
    e.method = Method::NoiseEstLin;
    const Eigen::VectorXd y = ols(design, &e.condition_number);
    e.x = y.head(design.dim);
    e.lifted = y;
    e.sigma2 = y(design.dim) - e.x.squaredNorm(); // may be negative, kept as-is
    e.solver_path = "closed_form";
    e.objective = (design.A * y - design.rhs).squaredNorm();
    return e;
}

Estimate noise_est(const DesignSystem& design) {
    if (design.mode != DesignMode::NoiseEst)
        throw ConfigError("noise_est: design must be built in noise_est mode");
    Estimate e;
    e.method = Method::NoiseEst;
    const GtrsInstance inst = GtrsInstance::from_design(design);
    double cond = condition_of(inst.AtA);
    e.condition_number = cond;

    Eigen::LLT<Eigen::MatrixXd> llt(inst.AtA);
    Eigen::VectorXd y = llt.solve(inst.Atb);
    if (inst.constraint(y) <= 0.0) {
        e.solver_path = "closed_form"; // unconstrained minimum is feasible
    } else {
        // KKT multiplier of the inequality is nonnegative; c(0) > 0 here and c is
        // strictly decreasing, so bisect on lambda >= 0.
        double lo = 0.0, hi = 1.0;
        int expand = 0;
        while (c_of_lambda(inst, hi) > 0.0 && expand++ < 60) hi *= 2.0;
        auto bis = bisect_root([&](double lam) { return c_of_lambda(inst, lam); }, lo, hi);
        y = y_of_lambda(inst, bis.root);
        e.iterations = bis.iterations;
        e.solver_path = "active_constraint";
    }
    e.x = y.head(design.dim);
    e.lifted = y;
    e.sigma2 = y(design.dim) - e.x.squaredNorm();
    e.objective = (design.A * y - design.rhs).squaredNorm();
    return e;
}

VarianceEstimates estimate_variances(const MeasurementSet& meas, int num_sensors) {
    VarianceEstimates out;
    out.sigma2.assign(static_cast<size_t>(num_sensors), 0.0);
    std::vector<int> counts(static_cast<size_t>(num_sensors), 0);
    std::vector<double> sums(static_cast<size_t>(num_sensors), 0.0);
    for (int k = 0; k < meas.size(); ++k) {
        const auto s = static_cast<size_t>(meas.sensor_index[static_cast<size_t>(k)]);
        sums[s] += meas.values(k);
        ++counts[s];
    }
    const int T = counts.empty() ? 0 : counts[0];
    out.sample_count = T;
    if (T <= 1) {
        // Trial-6 convention: with a single observation per sensor, take sigma^2 = 1.
        out.sigma2.assign(static_cast<size_t>(num_sensors), 1.0);
        return out;
    }
    for (int k = 0; k < meas.size(); ++k) {
        const auto s = static_cast<size_t>(meas.sensor_index[static_cast<size_t>(k)]);
        const double dev = meas.values(k) - sums[s] / counts[s];
        out.sigma2[s] += dev * dev / (counts[s] - 1);
    }
    return out;
}

Estimate w_bias_eli_lin(const DesignSystem& design) {
    if (design.mode != DesignMode::Weighted || !design.weights)
        throw ConfigError("w_bias_eli_lin: design must be built in weighted mode");
    Estimate e = bias_eli_lin(design);
    e.method = Method::WBiasEliLin;
    return e;
}

Estimate aw_bias_eli_lin(const Scenario& scenario, const MeasurementSet& meas,
                         const VarianceEstimates& var_est, bool* floored_warning) {
    Eigen::VectorXd s2(static_cast<int>(var_est.sigma2.size()));
    for (int i = 0; i < s2.size(); ++i) s2(i) = var_est.sigma2[static_cast<size_t>(i)];
    const double mx = s2.maxCoeff();
    bool floored = false;
    for (int i = 0; i < s2.size(); ++i) {
        if (s2(i) < 1e-8 * mx || s2(i) <= 0.0) {
            s2(i) = mx > 0.0 ? 1e-8 * mx : 1.0;
            floored = true;
        }
    }
    if (floored_warning) *floored_warning = floored;
    const DesignSystem d = build_design(scenario, meas, DesignMode::Weighted, s2);
    Estimate e = bias_eli_lin(d);
    e.method = Method::AWBiasEliLin;
    return e;
}

} // namespace rloc
