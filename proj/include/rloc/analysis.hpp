#pragma once

#include <Eigen/Dense>
#include <optional>
#include <vector>

#include "rloc/estimators.hpp"
#include "rloc/scenario.hpp"

namespace rloc {

struct FisherReport {
    Eigen::MatrixXd F;              // n x n
    double crlb;                    // tr(F^{-1})
    Eigen::VectorXd per_coordinate; // diag(F^{-1})
};

// F = sum over measurements of (1/sigma_i^2) (x-a)(x-a)^T / ||x-a||^2.
// Heterogeneous scenarios weight each term by its sensor's variance.
FisherReport fisher(const Scenario& scenario, const Eigen::VectorXd& at);

struct TheoreticalMse {
    Eigen::VectorXd lambda_diag;  // 4 f_i^2 sigma^2 + 2 sigma^4 per measurement
    Eigen::MatrixXd mse_matrix;   // (A^T A)^{-1} A^T Lambda A (A^T A)^{-1}
    double sigma2_bias;           // E[sigma2_hat - sigma^2] for Noise-Est-Lin
    double position_mse() const { return mse_matrix.topLeftCorner(mse_matrix.rows() - 1, mse_matrix.cols() - 1).trace(); }
};

// Finite-sample MSE of the *-Lin lifts and the sigma^2 bias, from true geometry.
TheoreticalMse theoretical_mse(const Scenario& scenario, double sigma2);

struct EmpiricalStats {
    Eigen::VectorXd mean_deviation; // per-coordinate bias proxy
    double mse = 0.0;               // mean ||x_hat - x^o||^2
    std::optional<double> sigma2_mean_deviation;
    long run_count = 0;
};

// Compensated (Neumaier) accumulator so parallel partials can merge exactly
// when combined in a fixed order.
class StatsAccumulator {
public:
    explicit StatsAccumulator(int dim);
    void add(const Estimate& e, const Eigen::VectorXd& truth, double true_sigma2 = 0.0);
    void merge(const StatsAccumulator& other);
    EmpiricalStats finish() const;

private:
    struct Neumaier {
        double sum = 0.0, comp = 0.0;
        void add(double v);
        void merge(const Neumaier& o);
        double value() const { return sum + comp; }
    };
    int dim_;
    std::vector<Neumaier> dev_sum_;
    Neumaier sq_sum_;
    Neumaier sigma2_dev_sum_;
    long count_ = 0;
    long sigma2_count_ = 0;
};

EmpiricalStats aggregate(const std::vector<Estimate>& runs, const Scenario& truth);

} // namespace rloc
