#include <doctest.h>

#include <Eigen/Dense>
#include <random>

#include "rloc/polynomial.hpp"
#include "rloc/spectral.hpp"

using namespace rloc;

namespace {

// Counts sign changes of p on a dense grid; a root-count oracle independent of
// the Sturm machinery. Assumes simple roots (random coefficients).
int dense_scan_roots(const Polynomial& p, double lo, double hi, int points = 1000000) {
    int count = 0;
    double prev = p(lo);
    for (int i = 1; i <= points; ++i) {
        const double x = lo + (hi - lo) * i / points;
        const double v = p(x);
        if (prev != 0.0 && v != 0.0 && (prev > 0) != (v > 0)) ++count;
        if (v != 0.0) prev = v;
    }
    return count;
}

std::vector<double> companion_real_roots(const Polynomial& p) {
    const int d = p.degree();
    Eigen::MatrixXd C = Eigen::MatrixXd::Zero(d, d);
    for (int i = 1; i < d; ++i) C(i, i - 1) = 1.0;
    for (int i = 0; i < d; ++i) C(i, d - 1) = -p.coeffs()[static_cast<size_t>(i)] / p.leading();
    Eigen::EigenSolver<Eigen::MatrixXd> es(C);
    std::vector<double> roots;
    for (int i = 0; i < d; ++i) {
        const auto z = es.eigenvalues()(i);
        if (std::abs(z.imag()) < 1e-8 * (1.0 + std::abs(z.real()))) roots.push_back(z.real());
    }
    return roots;
}

Polynomial random_poly(std::mt19937_64& gen, int degree) {
    std::uniform_real_distribution<double> coef(-5.0, 5.0);
    std::vector<double> c(static_cast<size_t>(degree) + 1);
    for (auto& v : c) v = coef(gen);
    if (std::abs(c.back()) < 0.1) c.back() = 1.0;
    return Polynomial(c);
}

} // namespace

TEST_CASE("polynomial arithmetic basics") {
    const Polynomial p({1.0, -3.0, 2.0}); // 2x^2 - 3x + 1
    CHECK(p(1.0) == doctest::Approx(0.0));
    CHECK(p(0.5) == doctest::Approx(0.0));
    CHECK(p(2.0) == doctest::Approx(3.0));
    const auto [q, r] = p.divide(Polynomial({-1.0, 1.0})); // / (x - 1)
    CHECK(r.is_zero());
    CHECK(q.degree() == 1);
    CHECK(q(0.5) == doctest::Approx(0.0));
}

TEST_CASE("sturm_count on known polynomials") {
    CHECK(sturm_count(Polynomial({-1.0, 0.0, 1.0}), 0.0,
                      std::numeric_limits<double>::infinity()) == 1); // x^2-1 on (0,inf)
    CHECK(sturm_count(Polynomial({1.0, 0.0, 1.0}), -std::numeric_limits<double>::infinity(),
                      std::numeric_limits<double>::infinity()) == 0); // x^2+1
    // (x-1)^2 (x+2): repeated root counted once
    const Polynomial p = Polynomial({-1.0, 1.0}) * Polynomial({-1.0, 1.0}) * Polynomial({2.0, 1.0});
    CHECK(sturm_count(p, -10.0, 10.0) == 2);
    CHECK_THROWS_AS(sturm_count(p, 1.0, 1.0), NumericalError);
}

TEST_CASE("sturm_count matches dense-scan oracle on random degree-8 polynomials") {
    std::mt19937_64 gen(7);
    for (int trial = 0; trial < 50; ++trial) {
        const Polynomial p = random_poly(gen, 8);
        const double B = cauchy_bound(p);
        CHECK(sturm_count(p, -B, B) == dense_scan_roots(p, -B, B));
    }
}

TEST_CASE("cauchy_bound formula and companion-matrix domination") {
    CHECK(cauchy_bound(Polynomial({2.0, -3.0, 1.0})) == doctest::Approx(4.0));
    CHECK(cauchy_bound(Polynomial({0.0, 0.0, 0.0, 1.0})) == doctest::Approx(1.0));
    CHECK_THROWS_AS(cauchy_bound(Polynomial::constant(3.0)), NumericalError);

    std::mt19937_64 gen(11);
    for (int trial = 0; trial < 30; ++trial) {
        const Polynomial p = random_poly(gen, 10);
        const double B = cauchy_bound(p);
        for (double r : companion_real_roots(p)) CHECK(std::abs(r) <= B);
    }
}

TEST_CASE("bisect_root") {
    auto lin = [](double x) { return x - 2.0; };
    CHECK(bisect_root(lin, 0.0, 5.0, 1e-12).root == doctest::Approx(2.0).epsilon(1e-11));
    auto cub = [](double x) { return x * x * x - 8.0; };
    CHECK(bisect_root(cub, 0.0, 5.0, 1e-12).root == doctest::Approx(2.0).epsilon(1e-11));
    CHECK_THROWS_AS(bisect_root(lin, 3.0, 5.0, 1e-12), NumericalError);
}

TEST_CASE("lambda_lower closed forms") {
    Eigen::MatrixXd D2 = Eigen::MatrixXd::Zero(2, 2);
    D2(0, 0) = 1.0;
    CHECK(lambda_lower(Eigen::MatrixXd::Identity(2, 2), D2) == doctest::Approx(-1.0));
    Eigen::MatrixXd AtA = Eigen::Vector2d(4.0, 1.0).asDiagonal();
    CHECK(lambda_lower(AtA, D2) == doctest::Approx(-4.0));
}

TEST_CASE("lambda_lower boundary eigenvalue residual on random SPD instances") {
    std::mt19937_64 gen(3);
    std::normal_distribution<double> nrm;
    for (int trial = 0; trial < 50; ++trial) {
        Eigen::MatrixXd X(8, 4);
        for (int i = 0; i < X.size(); ++i) X.data()[i] = nrm(gen);
        const Eigen::MatrixXd AtA = X.transpose() * X + 0.1 * Eigen::MatrixXd::Identity(4, 4);
        Eigen::MatrixXd D = Eigen::MatrixXd::Zero(4, 4);
        D.topLeftCorner(3, 3).setIdentity();
        const double lam = lambda_lower(AtA, D);
        auto min_eig = [&](double l) {
            return Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(AtA + l * D)
                .eigenvalues()
                .minCoeff();
        };
        const double scale = AtA.norm();
        CHECK(std::abs(min_eig(lam)) <= 1e-8 * scale);
        CHECK(min_eig(lam + 1e-6) > 0.0);
        CHECK(min_eig(lam - 1e-6) < 0.0);
    }
}

TEST_CASE("simdiag residuals and consistency with lambda_lower") {
    std::mt19937_64 gen(5);
    std::normal_distribution<double> nrm;
    for (int trial = 0; trial < 100; ++trial) {
        Eigen::MatrixXd X(10, 4);
        for (int i = 0; i < X.size(); ++i) X.data()[i] = nrm(gen);
        const Eigen::MatrixXd AtA = X.transpose() * X + 0.05 * Eigen::MatrixXd::Identity(4, 4);
        Eigen::MatrixXd D = Eigen::MatrixXd::Zero(4, 4);
        D.topLeftCorner(3, 3).setIdentity();

        const Diagonalization dg = simdiag(AtA, D);
        const Eigen::MatrixXd G = dg.R.transpose() * AtA * dg.R;
        const Eigen::MatrixXd S = dg.R.transpose() * D * dg.R;
        CHECK((G - Eigen::MatrixXd::Identity(4, 4)).norm() <= 1e-9 * (1.0 + AtA.norm()));
        CHECK((S - Eigen::MatrixXd(dg.delta.asDiagonal())).norm() <= 1e-9 * (1.0 + D.norm()));
        CHECK(dg.delta.minCoeff() >= 0.0);
        CHECK(std::abs(dg.R.determinant()) > 0.0);
        CHECK(lambda_lower(AtA, D) == doctest::Approx(-1.0 / dg.delta.maxCoeff()).epsilon(1e-9));
    }
}

TEST_CASE("simdiag identity case") {
    Eigen::MatrixXd D = Eigen::MatrixXd::Zero(2, 2);
    D(0, 0) = 1.0;
    const Diagonalization dg = simdiag(Eigen::MatrixXd::Identity(2, 2), D);
    std::vector<double> d(dg.delta.data(), dg.delta.data() + 2);
    std::sort(d.begin(), d.end());
    CHECK(d[0] == doctest::Approx(0.0));
    CHECK(d[1] == doctest::Approx(1.0));
}
