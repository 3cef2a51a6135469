#include "rloc/refine.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace rloc {

namespace {

void jacobian_and_residual(const Eigen::VectorXd& x, const Scenario& scenario,
                           const MeasurementSet& meas, Eigen::MatrixXd& J, Eigen::VectorXd& r) {
    const int m = meas.size();
    const int n = static_cast<int>(x.size());
    J.resize(m, n);
    r.resize(m);
    for (int k = 0; k < m; ++k) {
        const Eigen::VectorXd& a =
            scenario.sensors[static_cast<size_t>(meas.sensor_index[static_cast<size_t>(k)])];
        const Eigen::VectorXd diff = x - a;
        const double dist = diff.norm();
        if (dist <= 0.0) throw NumericalError("gn_step: iterate coincides with a sensor");
        J.row(k) = diff.transpose() / dist;
        r(k) = meas.values(k) - dist;
    }
}

} // namespace

Eigen::VectorXd expand_weights(const std::vector<double>& sigma2_per_sensor,
                               const MeasurementSet& meas) {
    Eigen::VectorXd w(meas.size());
    for (int k = 0; k < meas.size(); ++k) {
        const double s2 =
            sigma2_per_sensor.at(static_cast<size_t>(meas.sensor_index[static_cast<size_t>(k)]));
        if (s2 <= 0.0) throw ConfigError("expand_weights: nonpositive variance");
        w(k) = 1.0 / s2;
    }
    return w;
}

Eigen::VectorXd gn_step(const Eigen::VectorXd& x0, const Scenario& scenario,
                        const MeasurementSet& meas,
                        const std::optional<Eigen::VectorXd>& weights) {
    Eigen::MatrixXd J;
    Eigen::VectorXd r;
    jacobian_and_residual(x0, scenario, meas, J, r);
    Eigen::MatrixXd JtWJ;
    Eigen::VectorXd JtWr;
    if (weights) {
        JtWJ = J.transpose() * weights->asDiagonal() * J;
        JtWr = J.transpose() * weights->asDiagonal() * r;
    } else {
        JtWJ = J.transpose() * J;
        JtWr = J.transpose() * r;
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(JtWJ);
    const double mn = es.eigenvalues().minCoeff();
    const double mx = es.eigenvalues().maxCoeff();
    if (mn <= 0.0 || mx / mn > 1e12)
        throw NumericalError("gn_step: J^T W J is ill-conditioned");
    return x0 + JtWJ.llt().solve(JtWr);
}

Estimate first_step(FirstStep first, const Scenario& scenario, const MeasurementSet& meas,
                    std::optional<double> sigma2) {
    const double s2 = sigma2.value_or(scenario.noise.sigma2);
    auto scalar = [](double v) {
        Eigen::VectorXd s(1);
        s(0) = v;
        return s;
    };
    switch (first) {
    case FirstStep::BiasEli:
        return bias_eli(build_design(scenario, meas, DesignMode::BiasEli, scalar(s2)));
    case FirstStep::SLs: {
        Estimate e = bias_eli(build_design(scenario, meas, DesignMode::BiasEli, scalar(0.0)));
        e.method = Method::SLs;
        return e;
    }
    case FirstStep::BiasEliLin:
        return bias_eli_lin(build_design(scenario, meas, DesignMode::BiasEli, scalar(s2)));
    case FirstStep::NoiseEst:
        return noise_est(build_design(scenario, meas, DesignMode::NoiseEst));
    case FirstStep::NoiseEstLin:
        return noise_est_lin(build_design(scenario, meas, DesignMode::NoiseEst));
    case FirstStep::WBiasEliLin: {
        std::vector<double> s2s;
        if (scenario.noise.kind == NoiseKind::Heterogeneous)
            s2s = scenario.noise.sigma2_per_sensor;
        else
            s2s.assign(static_cast<size_t>(scenario.num_sensors()), s2);
        Eigen::VectorXd v = Eigen::Map<Eigen::VectorXd>(s2s.data(), static_cast<int>(s2s.size()));
        return w_bias_eli_lin(build_design(scenario, meas, DesignMode::Weighted, v));
    }
    case FirstStep::AWBiasEliLin: {
        const VarianceEstimates var = estimate_variances(meas, scenario.num_sensors());
        return aw_bias_eli_lin(scenario, meas, var);
    }
    }
    throw ConfigError("unknown first-step selector");
}

Estimate two_step(FirstStep first, const Scenario& scenario, const MeasurementSet& meas,
                  std::optional<double> sigma2) {
    Estimate e = first_step(first, scenario, meas, sigma2);
    std::optional<Eigen::VectorXd> w;
    if (first == FirstStep::WBiasEliLin && scenario.noise.kind == NoiseKind::Heterogeneous) {
        w = expand_weights(scenario.noise.sigma2_per_sensor, meas);
    } else if (first == FirstStep::AWBiasEliLin) {
        VarianceEstimates var = estimate_variances(meas, scenario.num_sensors());
        const double mx = *std::max_element(var.sigma2.begin(), var.sigma2.end());
        for (double& v : var.sigma2)
            if (v < 1e-8 * mx || v <= 0.0) v = mx > 0.0 ? 1e-8 * mx : 1.0;
        w = expand_weights(var.sigma2, meas);
    }
    e.x = gn_step(e.x, scenario, meas, w);
    e.two_step = true;
    e.lifted.reset(); // the lift belongs to the first step only
    return e;
}

Estimate gn_converge(const Eigen::VectorXd& x0, const Scenario& scenario,
                     const MeasurementSet& meas, const std::optional<Eigen::VectorXd>& weights,
                     double tol, int max_iter) {
    Eigen::VectorXd x = x0;
    int it = 0;
    double prev_step = std::numeric_limits<double>::infinity();
    int growth_streak = 0;
    for (; it < max_iter; ++it) {
        const Eigen::VectorXd next = gn_step(x, scenario, meas, weights);
        const double step = (next - x).norm();
        x = next;
        if (step > 10.0 * prev_step)
            ++growth_streak;
        else
            growth_streak = 0;
        if (growth_streak >= 5) throw NumericalError("gn_converge: divergence detected");
        prev_step = step;
        if (step < tol) {
            ++it;
            break;
        }
    }
    Estimate e;
    e.method = Method::LsGn;
    e.x = x;
    e.iterations = it;
    e.solver_path = "gauss_newton";
    double obj = 0.0;
    for (int k = 0; k < meas.size(); ++k) {
        const Eigen::VectorXd& a =
            scenario.sensors[static_cast<size_t>(meas.sensor_index[static_cast<size_t>(k)])];
        const double r = (a - x).norm() - meas.values(k);
        const double wk = weights ? (*weights)(k) : 1.0;
        obj += wk * r * r;
    }
    e.objective = obj;
    return e;
}

} // namespace rloc
