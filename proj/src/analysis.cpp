#include "rloc/analysis.hpp"

#include "rloc/design.hpp"

namespace rloc {

FisherReport fisher(const Scenario& scenario, const Eigen::VectorXd& at) {
    const int n = scenario.dim();
    Eigen::MatrixXd F = Eigen::MatrixXd::Zero(n, n);
    for (int i = 0; i < scenario.num_sensors(); ++i) {
        const Eigen::VectorXd diff = at - scenario.sensors[static_cast<size_t>(i)];
        const double d2 = diff.squaredNorm();
        if (d2 <= 0.0) throw NumericalError("fisher: evaluation point coincides with a sensor");
        const double s2 = scenario.noise.variance_for(i);
        if (s2 <= 0.0) throw NumericalError("fisher: zero noise variance has no finite CRLB");
        F += static_cast<double>(scenario.repeats) / s2 * (diff * diff.transpose()) / d2;
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(F);
    if (es.eigenvalues().minCoeff() <= 1e-12 * es.eigenvalues().maxCoeff())
        throw NumericalError("fisher: information matrix is singular (degenerate geometry)");
    FisherReport r;
    r.F = F;
    const Eigen::MatrixXd Finv = F.inverse();
    r.crlb = Finv.trace();
    r.per_coordinate = Finv.diagonal();
    return r;
}

TheoreticalMse theoretical_mse(const Scenario& scenario, double sigma2) {
    const int m = scenario.num_measurements();
    const int M = scenario.num_sensors();
    const int T = scenario.repeats;
    const int n = scenario.dim();

    TheoreticalMse out;
    out.lambda_diag.resize(m);
    Eigen::MatrixXd A(m, n + 1);
    int k = 0;
    for (int i = 0; i < M; ++i) {
        const Eigen::VectorXd& a = scenario.sensors[static_cast<size_t>(i)];
        const double f2 = (a - scenario.target).squaredNorm();
        for (int j = 0; j < T; ++j, ++k) {
            out.lambda_diag(k) = 4.0 * f2 * sigma2 + 2.0 * sigma2 * sigma2;
            A.row(k).head(n) = -2.0 * a.transpose();
            A(k, n) = 1.0;
        }
    }
    const Eigen::MatrixXd AtA = A.transpose() * A;
    Eigen::LLT<Eigen::MatrixXd> llt(AtA);
    if (llt.info() != Eigen::Success) throw NumericalError("theoretical_mse: A^T A singular");
    // Abar = (A^T A)^{-1} A^T, so MSE = Abar Lambda Abar^T.
    const Eigen::MatrixXd Abar = llt.solve(A.transpose());
    out.mse_matrix = Abar * out.lambda_diag.asDiagonal() * Abar.transpose();

    double bias = 0.0;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < m; ++j)
            bias -= Abar(i, j) * Abar(i, j) * out.lambda_diag(j);
    out.sigma2_bias = bias;
    return out;
}

void StatsAccumulator::Neumaier::add(double v) {
    const double t = sum + v;
    if (std::abs(sum) >= std::abs(v))
        comp += (sum - t) + v;
    else
        comp += (v - t) + sum;
    sum = t;
}

void StatsAccumulator::Neumaier::merge(const Neumaier& o) {
    add(o.sum);
    comp += o.comp;
}

StatsAccumulator::StatsAccumulator(int dim) : dim_(dim), dev_sum_(static_cast<size_t>(dim)) {}

void StatsAccumulator::add(const Estimate& e, const Eigen::VectorXd& truth, double true_sigma2) {
    if (e.x.size() != dim_) throw ConfigError("stats: dimension mismatch");
    const Eigen::VectorXd dev = e.x - truth;
    for (int i = 0; i < dim_; ++i) dev_sum_[static_cast<size_t>(i)].add(dev(i));
    sq_sum_.add(dev.squaredNorm());
    if (e.sigma2) {
        sigma2_dev_sum_.add(*e.sigma2 - true_sigma2);
        ++sigma2_count_;
    }
    ++count_;
}

void StatsAccumulator::merge(const StatsAccumulator& other) {
    for (int i = 0; i < dim_; ++i)
        dev_sum_[static_cast<size_t>(i)].merge(other.dev_sum_[static_cast<size_t>(i)]);
    sq_sum_.merge(other.sq_sum_);
    sigma2_dev_sum_.merge(other.sigma2_dev_sum_);
    count_ += other.count_;
    sigma2_count_ += other.sigma2_count_;
}

EmpiricalStats StatsAccumulator::finish() const {
    if (count_ == 0) throw ConfigError("stats: no runs to aggregate");
    EmpiricalStats s;
    s.run_count = count_;
    s.mean_deviation.resize(dim_);
    for (int i = 0; i < dim_; ++i)
        s.mean_deviation(i) = dev_sum_[static_cast<size_t>(i)].value() / static_cast<double>(count_);
    s.mse = sq_sum_.value() / static_cast<double>(count_);
    if (sigma2_count_ > 0)
        s.sigma2_mean_deviation = sigma2_dev_sum_.value() / static_cast<double>(sigma2_count_);
    return s;
}

EmpiricalStats aggregate(const std::vector<Estimate>& runs, const Scenario& truth) {
    if (runs.empty()) throw ConfigError("aggregate: empty run list");
    StatsAccumulator acc(truth.dim());
    for (const auto& e : runs) acc.add(e, truth.target, truth.noise.sigma2);
    return acc.finish();
}

} // namespace rloc
