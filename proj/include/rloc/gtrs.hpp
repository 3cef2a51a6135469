#pragma once

#include <Eigen/Dense>

#include "rloc/design.hpp"
#include "rloc/polynomial.hpp"
#include "rloc/spectral.hpp"

namespace rloc {

// min ||Ay - b||^2  s.t.  y^T D y + 2 g^T y = 0
struct GtrsInstance {
    Eigen::MatrixXd A;
    Eigen::VectorXd b;
    Eigen::MatrixXd D;
    Eigen::VectorXd g;
    Eigen::MatrixXd AtA;
    Eigen::VectorXd Atb;

    static GtrsInstance from_design(const DesignSystem& d);
    static GtrsInstance from_parts(Eigen::MatrixXd A, Eigen::VectorXd b, Eigen::MatrixXd D,
                                   Eigen::VectorXd g);

    double objective(const Eigen::VectorXd& y) const { return (A * y - b).squaredNorm(); }
    double constraint(const Eigen::VectorXd& y) const {
        return y.dot(D * y) + 2.0 * g.dot(y);
    }
};

enum class GtrsPath { Regular, HardCase };

struct GtrsSolution {
    Eigen::VectorXd y;
    double lambda;          // multiplier; equals lambda_l on the hard-case path
    GtrsPath path;
    double constraint_residual;
    double objective;
    int bisection_iterations;
    bool multiple_root_warning; // Sturm reported >= 2 roots in I (numerical artifact)
};

// y(lambda) = (A^T A + lambda D)^{-1} (A^T b - lambda g); requires lambda > lambda_l.
Eigen::VectorXd y_of_lambda(const GtrsInstance& inst, double lambda);

// c(lambda) = y(lambda)^T D y(lambda) + 2 g^T y(lambda); strictly decreasing on I.
double c_of_lambda(const GtrsInstance& inst, double lambda);

// The degree <= 2n+2 polynomial whose roots in I coincide with the zeros of c:
// T(lambda) = c(lambda) * prod_j (gamma_j + lambda delta_j)^2.
Polynomial build_T(const GtrsInstance& inst, const Diagonalization& diag);

// Hard case: A^T A + lambda_l D singular. Solves the consistent singular system
// together with the quadratic constraint by the null-space parametrization
// y = y_p + t v, picking the t that minimizes v^T y.
Eigen::VectorXd solve_hard_case(const GtrsInstance& inst, double lambda_l,
                                const Eigen::VectorXd& v);

// Full solver: lambda_l, T(lambda), Sturm root test, bisection or hard-case fallback.
GtrsSolution solve_bias_eli(const GtrsInstance& inst);

} // namespace rloc
