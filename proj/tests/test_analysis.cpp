#include <doctest.h>

#include <algorithm>
#include <random>

#include "rloc/analysis.hpp"
#include "rloc/design.hpp"
#include "rloc/refine.hpp"

using namespace rloc;

TEST_CASE("fisher equals J^T J / sigma^2 in the homogeneous case") {
    const Scenario s = reference_scenario(2.5, 3);
    const FisherReport fr = fisher(s, s.target);

    Eigen::MatrixXd J(s.num_measurements(), 3);
    int row = 0;
    for (int i = 0; i < s.num_sensors(); ++i) {
        const Eigen::VectorXd u =
            (s.target - s.sensors[static_cast<size_t>(i)]) / s.true_distance(i);
        for (int t = 0; t < s.repeats; ++t) J.row(row++) = u.transpose();
    }
    CHECK((fr.F - J.transpose() * J / 2.5).norm() < 1e-12 * fr.F.norm());
    CHECK(fr.crlb == doctest::Approx(fr.F.inverse().trace()).epsilon(1e-12));
    CHECK(fr.per_coordinate.sum() == doctest::Approx(fr.crlb).epsilon(1e-12));
}

TEST_CASE("CRLB scales linearly in sigma^2 and inversely in T") {
    const double base = fisher(reference_scenario(1.0, 1), Eigen::Vector3d(6, 6, 6)).crlb;
    CHECK(fisher(reference_scenario(3.0, 1), Eigen::Vector3d(6, 6, 6)).crlb ==
          doctest::Approx(3.0 * base).epsilon(1e-12));
    CHECK(fisher(reference_scenario(1.0, 10), Eigen::Vector3d(6, 6, 6)).crlb ==
          doctest::Approx(base / 10.0).epsilon(1e-12));
}

TEST_CASE("heterogeneous fisher weights each sensor by 1/sigma_i^2") {
    const Scenario het = reference_scenario_heterogeneous(1);
    Eigen::MatrixXd F = Eigen::MatrixXd::Zero(3, 3);
    for (int i = 0; i < het.num_sensors(); ++i) {
        const Eigen::VectorXd u =
            (het.target - het.sensors[static_cast<size_t>(i)]) / het.true_distance(i);
        F += u * u.transpose() / het.noise.variance_for(i);
    }
    CHECK((fisher(het, het.target).F - F).norm() < 1e-12 * F.norm());
}

TEST_CASE("theoretical_mse lambda entries and hand value") {
    const Scenario s = reference_scenario(1.0, 1);
    const TheoreticalMse tm = theoretical_mse(s, 1.0);
    REQUIRE(tm.lambda_diag.size() == 10);
    // a_1 = [5 0 5]: f^2 = 38, so 4*38*1 + 2*1 = 154.
    CHECK(tm.lambda_diag(0) == doctest::Approx(154.0));
    for (int i = 0; i < 10; ++i) {
        const double f2 = (s.target - s.sensors[static_cast<size_t>(i)]).squaredNorm();
        CHECK(tm.lambda_diag(i) == doctest::Approx(4.0 * f2 + 2.0));
    }
    CHECK(tm.position_mse() > 0.0);
    CHECK(tm.sigma2_bias < 0.0); // downward bias of the plug-in variance
}

TEST_CASE("theoretical_mse equals the sandwich formula computed directly") {
    const Scenario s = reference_scenario(0.5, 2);
    const MeasurementSet ms = simulate(s, 1);
    const DesignSystem d = build_design(s, ms, DesignMode::NoiseEst);
    const TheoreticalMse tm = theoretical_mse(s, 0.5);

    const Eigen::MatrixXd AtA = d.A.transpose() * d.A;
    const Eigen::MatrixXd cov = AtA.inverse() * d.A.transpose() *
                                Eigen::MatrixXd(tm.lambda_diag.asDiagonal()) * d.A *
                                AtA.inverse();
    CHECK((tm.mse_matrix - cov).norm() < 1e-9 * cov.norm());

    // sigma2 bias: -sum_i sum_j Abar_ij^2 Lambda_j with i over the first n rows.
    const Eigen::MatrixXd Abar = AtA.inverse() * d.A.transpose();
    double bias = 0.0;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < Abar.cols(); ++j)
            bias -= Abar(i, j) * Abar(i, j) * tm.lambda_diag(j);
    CHECK(tm.sigma2_bias == doctest::Approx(bias).epsilon(1e-10));
}

TEST_CASE("StatsAccumulator merge is order-fixed-exact and matches aggregate") {
    const Scenario s = reference_scenario(1.0, 1);
    std::vector<Estimate> runs;
    for (std::uint64_t seed = 1; seed <= 64; ++seed)
        runs.push_back(first_step(FirstStep::NoiseEstLin, s, simulate(s, seed)));

    StatsAccumulator seq(3);
    for (const auto& e : runs) seq.add(e, s.target, 1.0);

    StatsAccumulator a(3), b(3);
    for (size_t k = 0; k < runs.size(); ++k)
        (k < 32 ? a : b).add(runs[k], s.target, 1.0);
    a.merge(b);

    const EmpiricalStats es = seq.finish();
    const EmpiricalStats em = a.finish();
    CHECK(es.mse == em.mse);
    CHECK(es.mean_deviation == em.mean_deviation);
    CHECK(*es.sigma2_mean_deviation == *em.sigma2_mean_deviation);
    CHECK(es.run_count == 64);

    const EmpiricalStats ag = aggregate(runs, s);
    CHECK(ag.mse == doctest::Approx(es.mse).epsilon(1e-14));
}

TEST_CASE("synthetic accumulator check: unit offsets give MSE = n") {
    StatsAccumulator acc(3);
    const Eigen::Vector3d truth(1.0, 2.0, 3.0);
    for (int k = 0; k < 10; ++k) {
        Estimate e;
        e.x = truth + Eigen::Vector3d(1.0, 1.0, 1.0) * (k % 2 == 0 ? 1.0 : -1.0);
        acc.add(e, truth);
    }
    const EmpiricalStats st = acc.finish();
    CHECK(st.mse == doctest::Approx(3.0));
    CHECK(st.mean_deviation.norm() == doctest::Approx(0.0));
    CHECK_FALSE(st.sigma2_mean_deviation.has_value());
}

TEST_CASE("empirical MSE of Noise-Est-Lin matches the closed form") {
    const double sigma2 = 1.0;
    const Scenario s = reference_scenario(sigma2, 1);
    const TheoreticalMse tm = theoretical_mse(s, sigma2);
    StatsAccumulator acc(3);
    const long N = 20000;
    for (long k = 1; k <= N; ++k)
        acc.add(first_step(FirstStep::NoiseEstLin, s, simulate(s, static_cast<std::uint64_t>(k))),
                s.target, sigma2);
    const double mse = acc.finish().mse;
    CHECK(std::abs(mse - tm.position_mse()) < 0.15 * tm.position_mse());
}
