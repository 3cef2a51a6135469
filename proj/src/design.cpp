#include "rloc/design.hpp"

namespace rloc {

Eigen::MatrixXd constraint_matrix(int n) {
    Eigen::MatrixXd D = Eigen::MatrixXd::Zero(n + 1, n + 1);
    D.topLeftCorner(n, n).setIdentity();
    return D;
}

Eigen::VectorXd constraint_vector(int n) {
    Eigen::VectorXd g = Eigen::VectorXd::Zero(n + 1);
    g(n) = -0.5;
    return g;
}

DesignSystem build_design(const Scenario& scenario, const MeasurementSet& meas, DesignMode mode,
                          std::optional<Eigen::VectorXd> sigma2_input) {
    const int n = scenario.dim();
    const int m = meas.size();
    const int M = scenario.num_sensors();

    if (mode == DesignMode::NoiseEst && sigma2_input.has_value())
        throw ConfigError("build_design: noise_est mode takes no variance input");
    if (mode == DesignMode::BiasEli &&
        (!sigma2_input.has_value() || sigma2_input->size() != 1))
        throw ConfigError("build_design: bias_eli mode needs a scalar variance");
    if (mode == DesignMode::Weighted &&
        (!sigma2_input.has_value() || sigma2_input->size() != M))
        throw ConfigError("build_design: weighted mode needs a per-sensor variance list");

    DesignSystem d;
    d.mode = mode;
    d.dim = n;
    d.A.resize(m, n + 1);
    d.rhs.resize(m);
    d.D = constraint_matrix(n);
    d.g = constraint_vector(n);

    Eigen::VectorXd w;
    if (mode == DesignMode::Weighted) w.resize(m);

    for (int k = 0; k < m; ++k) {
        const int s = meas.sensor_index[static_cast<size_t>(k)];
        const Eigen::VectorXd& a = scenario.sensors[static_cast<size_t>(s)];
        d.A.row(k).head(n) = -2.0 * a.transpose();
        d.A(k, n) = 1.0;
        double rhs = meas.values(k) * meas.values(k) - a.squaredNorm();
        switch (mode) {
        case DesignMode::BiasEli:
            rhs -= (*sigma2_input)(0);
            break;
        case DesignMode::NoiseEst:
            break;
        case DesignMode::Weighted: {
            const double s2 = (*sigma2_input)(s);
            if (s2 <= 0.0) throw ConfigError("build_design: nonpositive weight variance");
            rhs -= s2;
            w(k) = 1.0 / s2;
            break;
        }
        }
        d.rhs(k) = rhs;
    }
    if (mode == DesignMode::Weighted) d.weights = w;
    return d;
}

Eigen::VectorXd true_lift(const Scenario& scenario, DesignMode mode) {
    const int n = scenario.dim();
    Eigen::VectorXd y(n + 1);
    y.head(n) = scenario.target;
    y(n) = scenario.target.squaredNorm();
    if (mode == DesignMode::NoiseEst) y(n) += scenario.noise.sigma2;
    return y;
}

} // namespace rloc
