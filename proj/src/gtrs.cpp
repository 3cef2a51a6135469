#include "rloc/gtrs.hpp"

#include <cmath>

namespace rloc {

GtrsInstance GtrsInstance::from_parts(Eigen::MatrixXd A, Eigen::VectorXd b, Eigen::MatrixXd D,
                                      Eigen::VectorXd g) {
    GtrsInstance inst;
    inst.AtA = A.transpose() * A;
    inst.Atb = A.transpose() * b;
    inst.A = std::move(A);
    inst.b = std::move(b);
    inst.D = std::move(D);
    inst.g = std::move(g);
    return inst;
}

GtrsInstance GtrsInstance::from_design(const DesignSystem& d) {
    if (d.weights) {
        // Fold the diagonal weights into A and b so the GTRS machinery is unchanged.
        const Eigen::VectorXd sqw = d.weights->array().sqrt();
        return from_parts(sqw.asDiagonal() * d.A, sqw.asDiagonal() * d.rhs, d.D, d.g);
    }
    return from_parts(d.A, d.rhs, d.D, d.g);
}

Eigen::VectorXd y_of_lambda(const GtrsInstance& inst, double lambda) {
    const Eigen::MatrixXd H = inst.AtA + lambda * inst.D;
    Eigen::LLT<Eigen::MatrixXd> llt(H);
    if (llt.info() != Eigen::Success)
        throw NumericalError("y_of_lambda: A^T A + lambda D is singular or indefinite");
    return llt.solve(inst.Atb - lambda * inst.g);
}

double c_of_lambda(const GtrsInstance& inst, double lambda) {
    return inst.constraint(y_of_lambda(inst, lambda));
}

Polynomial build_T(const GtrsInstance& inst, const Diagonalization& diag) {
    const int k = static_cast<int>(diag.delta.size());
    // w(lambda) = R^T (A^T b - lambda g) is linear in lambda.
    const Eigen::VectorXd w0 = diag.R.transpose() * inst.Atb;
    const Eigen::VectorXd w1 = diag.R.transpose() * inst.g;
    const Eigen::VectorXd gR = 2.0 * (diag.R.transpose() * inst.g);

    std::vector<Polynomial> factor; // gamma_i + lambda delta_i
    factor.reserve(static_cast<size_t>(k));
    for (int i = 0; i < k; ++i)
        factor.emplace_back(std::vector<double>{diag.gamma(i), diag.delta(i)});

    Polynomial T = Polynomial::constant(0.0);
    for (int i = 0; i < k; ++i) {
        Polynomial others = Polynomial::constant(1.0);
        for (int j = 0; j < k; ++j)
            if (j != i) others = others * factor[static_cast<size_t>(j)] * factor[static_cast<size_t>(j)];
        const Polynomial wi({w0(i), -w1(i)});
        T = T + wi * factor[static_cast<size_t>(i)] * others * gR(i);
        T = T + wi * wi * others * diag.delta(i);
    }
    // No magnitude pruning: the high-order coefficients are delta-products,
    // tiny next to the constant term yet decisive at |lambda| ~ 1/delta.
    return T;
}

Eigen::VectorXd solve_hard_case(const GtrsInstance& inst, double lambda_l,
                                const Eigen::VectorXd& v) {
    const Eigen::MatrixXd H = inst.AtA + lambda_l * inst.D;
    const Eigen::VectorXd rhs = inst.Atb - lambda_l * inst.g;

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(H);
    const double scale = std::max(1.0, std::abs(es.eigenvalues().maxCoeff()));
    int null_dim = 0;
    for (int i = 0; i < es.eigenvalues().size(); ++i)
        if (std::abs(es.eigenvalues()(i)) < 1e-9 * scale) ++null_dim;
    if (null_dim > 1)
        throw NumericalError("hard case: null space dimension > 1 is not supported");

    Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(H);
    const Eigen::VectorXd y_p = cod.solve(rhs);
    if ((H * y_p - rhs).norm() > 1e-8 * (1.0 + rhs.norm()))
        throw NumericalError("hard case: singular system is inconsistent");

    // Constraint along y = y_p + t v is a scalar quadratic in t.
    const double a = v.dot(inst.D * v);
    const double b = 2.0 * (v.dot(inst.D * y_p) + inst.g.dot(v));
    const double c = inst.constraint(y_p);

    double t;
    if (std::abs(a) > 1e-14 * (1.0 + std::abs(b) + std::abs(c))) {
        double disc = b * b - 4.0 * a * c;
        if (disc < 0.0) {
            if (disc > -1e-8 * (b * b + 4.0 * std::abs(a * c) + 1.0))
                disc = 0.0;
            else
                throw NumericalError("hard case: constraint has no real solution along v");
        }
        const double sq = std::sqrt(disc);
        // v^T y = v^T y_p + t ||v||^2 is minimized at the smaller root.
        t = (-b - sq) / (2.0 * a);
        if (a < 0.0) t = (-b + sq) / (2.0 * a);
    } else if (std::abs(b) > 1e-14) {
        t = -c / b;
    } else {
        t = 0.0; // constraint independent of t; y_p already satisfies it or nothing will
    }
    return y_p + t * v;
}

GtrsSolution solve_bias_eli(const GtrsInstance& inst) {
    const double lam_l = lambda_lower(inst.AtA, inst.D);
    const Diagonalization diag = simdiag(inst.AtA, inst.D);
    const Polynomial T = build_T(inst, diag);

    const double eps = 1e-10 * (1.0 + std::abs(lam_l));
    const double lo = lam_l + eps;

    GtrsSolution sol;
    sol.multiple_root_warning = false;
    sol.bisection_iterations = 0;

    int roots_in_I = 0;
    double hi = lo + 1.0;
    if (T.degree() >= 1) {
        hi = 1.0 + cauchy_bound(T);
        if (hi <= lo) hi = lo + 1.0;
        roots_in_I = sturm_count(T, lo, hi);
    }

    // In a consistent hard case T has an exact double root at lambda_l itself;
    // the chain evaluation at lo cannot always separate it from (lo, hi], so a
    // reported root is only trusted when c(lo) > 0 confirms a sign change.
    const double clo = c_of_lambda(inst, lo);
    const auto bisect_regular = [&] {
        double chi = c_of_lambda(inst, hi);
        int expand = 0;
        while (chi > 0.0 && expand++ < 60) {
            hi = lo + 2.0 * (hi - lo);
            chi = c_of_lambda(inst, hi);
        }
        auto bis = bisect_root([&](double lam) { return c_of_lambda(inst, lam); }, lo, hi);
        sol.lambda = bis.root;
        sol.bisection_iterations = bis.iterations;
        sol.y = y_of_lambda(inst, sol.lambda);
        sol.path = GtrsPath::Regular;
    };
    if (roots_in_I >= 1 && clo > 0.0) {
        sol.multiple_root_warning = roots_in_I >= 2;
        bisect_regular();
    } else if (clo > 0.0) {
        // Sturm found nothing, but c(lo) > 0 and c is strictly decreasing with
        // c -> -inf, so a sign change exists; bisect and flag the miscount.
        sol.multiple_root_warning = true;
        bisect_regular();
    } else {
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(inst.AtA + lam_l * inst.D);
        const Eigen::VectorXd v = es.eigenvectors().col(0); // eigenvalue 0 direction
        try {
            sol.y = solve_hard_case(inst, lam_l, v);
            sol.lambda = lam_l;
            sol.path = GtrsPath::HardCase;
        } catch (const NumericalError&) {
            // Root sits within eps of lambda_l but the boundary system is
            // inconsistent: lo is the best representable multiplier.
            sol.lambda = lo;
            sol.y = y_of_lambda(inst, lo);
            sol.path = GtrsPath::Regular;
        }
    }
    sol.constraint_residual = inst.constraint(sol.y);
    sol.objective = inst.objective(sol.y);
    return sol;
}

} // namespace rloc
