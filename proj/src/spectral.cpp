#include "rloc/spectral.hpp"

namespace rloc {

namespace {
Eigen::LLT<Eigen::MatrixXd> cholesky_or_throw(const Eigen::MatrixXd& AtA) {
    Eigen::LLT<Eigen::MatrixXd> llt(AtA);
    if (llt.info() != Eigen::Success)
        throw NumericalError("A^T A is not positive definite (rank-deficient geometry)");
    return llt;
}
} // namespace

Diagonalization simdiag(const Eigen::MatrixXd& AtA, const Eigen::MatrixXd& D) {
    auto llt = cholesky_or_throw(AtA);
    const Eigen::MatrixXd L = llt.matrixL();
    // S = L^{-1} D L^{-T}, symmetric PSD.
    Eigen::MatrixXd S = L.triangularView<Eigen::Lower>().solve(D);
    S = L.triangularView<Eigen::Lower>().solve(S.transpose()).transpose();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(S);
    if (es.info() != Eigen::Success) throw NumericalError("simdiag: eigendecomposition failed");

    Diagonalization out;
    out.R = L.transpose().triangularView<Eigen::Upper>().solve(es.eigenvectors());
    out.gamma = Eigen::VectorXd::Ones(AtA.rows());
    out.delta = es.eigenvalues();
    for (int i = 0; i < out.delta.size(); ++i)
        if (std::abs(out.delta(i)) < 1e-12) out.delta(i) = 0.0;
    return out;
}

double lambda_lower(const Eigen::MatrixXd& AtA, const Eigen::MatrixXd& D) {
    auto llt = cholesky_or_throw(AtA);
    const Eigen::MatrixXd L = llt.matrixL();
    Eigen::MatrixXd S = L.triangularView<Eigen::Lower>().solve(D);
    S = L.triangularView<Eigen::Lower>().solve(S.transpose()).transpose();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(S);
    if (es.info() != Eigen::Success) throw NumericalError("lambda_lower: eigendecomposition failed");
    const double theta_max = es.eigenvalues().maxCoeff();
    if (theta_max <= 0.0)
        throw NumericalError("lambda_lower: D has no positive direction under A^T A");
    return -1.0 / theta_max;
}

} // namespace rloc
