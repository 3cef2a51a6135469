#include <doctest.h>

#include <cstdio>
#include <fstream>
#include <sstream>

#include "rloc/harness.hpp"

using namespace rloc;

namespace {

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE(in.good());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

TrialConfig tiny_config() {
    TrialConfig cfg;
    cfg.name = "unit-tiny";
    cfg.scenario = reference_scenario(1.0, 1);
    cfg.estimators = {"noise-est-lin", "two-step:bias-eli"};
    cfg.t_sweep = {1, 4};
    cfg.sigma2_sweep = {1.0};
    cfg.run_sweep = {40};
    cfg.base_seed = 99;
    return cfg;
}

} // namespace

TEST_CASE("EstimatorSpec parsing") {
    const EstimatorSpec a = EstimatorSpec::parse("bias-eli");
    CHECK(a.first == FirstStep::BiasEli);
    CHECK_FALSE(a.two_step);
    const EstimatorSpec b = EstimatorSpec::parse("two-step:noise-est");
    CHECK(b.first == FirstStep::NoiseEst);
    CHECK(b.two_step);
    CHECK(b.label == "two-step:noise-est");
    CHECK_THROWS_AS(EstimatorSpec::parse("two-step:nope"), ConfigError);
}

TEST_CASE("builtin configs exist and validate") {
    const auto names = TrialConfig::builtin_names();
    CHECK(names.size() == 6);
    for (const auto& n : names) {
        const TrialConfig small = TrialConfig::builtin(n, false);
        small.validate();
        const TrialConfig full = TrialConfig::builtin(n, true);
        full.validate();
        CHECK(small.name == n);
    }
    CHECK_THROWS_AS(TrialConfig::builtin("nope", false), ConfigError);
}

TEST_CASE("config JSON round trip preserves the content hash") {
    const TrialConfig cfg = TrialConfig::builtin("trial3-small", false);
    const std::string path = "unit_cfg_roundtrip.json";
    {
        std::ofstream out(path);
        out << "{\"name\":\"trial3-small\"}"; // placeholder; replaced below
    }
    // Round trip through the JSON text form of a hand-built config.
    std::ostringstream text;
    text << "{\"name\":\"unit\",\"scenario\":" << cfg.scenario.to_json_text()
         << ",\"estimators\":[\"noise-est-lin\"],\"t_sweep\":[1,10],"
            "\"sigma2_sweep\":[0.5],\"runs\":25,\"seed\":7}";
    const TrialConfig back = TrialConfig::from_json_text(text.str());
    CHECK(back.name == "unit");
    CHECK(back.base_seed == 7);
    CHECK(back.t_sweep == std::vector<int>{1, 10});
    CHECK(back.run_sweep == std::vector<long>{25});
    CHECK(back.content_hash() == TrialConfig::from_json_text(text.str()).content_hash());
    std::remove(path.c_str());
}

TEST_CASE("run_trial is deterministic and worker-count invariant") {
    const TrialConfig cfg = tiny_config();
    const TrialReport r1 = run_trial(cfg, 1);
    const TrialReport r2 = run_trial(cfg, 1);
    const TrialReport r8 = run_trial(cfg, 8);
    REQUIRE(r1.cells.size() == 4); // 2 estimators x 2 T values
    for (size_t i = 0; i < r1.cells.size(); ++i) {
        CHECK(r1.cells[i].stats.mse == r2.cells[i].stats.mse);
        CHECK(r1.cells[i].stats.mse == r8.cells[i].stats.mse);
        CHECK(r1.cells[i].stats.mean_deviation == r8.cells[i].stats.mean_deviation);
        CHECK(r1.cells[i].failures == 0);
        CHECK(r1.cells[i].runs == 40);
        CHECK(r1.cells[i].crlb > 0.0);
    }
}

TEST_CASE("adding an estimator does not perturb existing cells") {
    TrialConfig cfg = tiny_config();
    const TrialReport base = run_trial(cfg, 2);
    cfg.estimators.push_back("bias-eli-lin");
    const TrialReport more = run_trial(cfg, 2);
    for (const auto& cell : base.cells) {
        bool found = false;
        for (const auto& other : more.cells)
            if (other.estimator == cell.estimator && other.T == cell.T) {
                CHECK(other.stats.mse == cell.stats.mse);
                found = true;
            }
        CHECK(found);
    }
}

TEST_CASE("CSV emission is byte-identical across runs and workers") {
    const TrialConfig cfg = tiny_config();
    emit_csv(run_trial(cfg, 1), "unit_a.csv");
    emit_csv(run_trial(cfg, 8), "unit_b.csv");
    const std::string a = slurp("unit_a.csv");
    CHECK(a == slurp("unit_b.csv"));
    CHECK(a.rfind("estimator,T,sigma2,m,N,", 0) == 0);
    // Timing column empty by default: every row ends with a comma.
    std::istringstream lines(a);
    std::string line;
    std::getline(lines, line); // header
    int rows = 0;
    while (std::getline(lines, line))
        if (!line.empty()) {
            CHECK(line.back() == ',');
            ++rows;
        }
    CHECK(rows == 4);
    std::remove("unit_a.csv");
    std::remove("unit_b.csv");
}

TEST_CASE("theory_mse present only for closed-form first-step cells") {
    TrialConfig cfg = tiny_config();
    cfg.estimators = {"noise-est-lin", "bias-eli", "two-step:noise-est-lin"};
    const TrialReport r = run_trial(cfg, 1);
    for (const auto& cell : r.cells) {
        if (cell.estimator == "noise-est-lin")
            CHECK(cell.theory_mse.has_value());
        else
            CHECK_FALSE(cell.theory_mse.has_value());
    }
}

TEST_CASE("report JSON round trip") {
    const TrialReport r = run_trial(tiny_config(), 2);
    const std::string path = "unit_report.json";
    {
        std::ofstream out(path);
        out << r.to_json_text();
    }
    const TrialReport back = TrialReport::from_json_file(path);
    CHECK(back.config_name == r.config_name);
    CHECK(back.config_hash == r.config_hash);
    REQUIRE(back.cells.size() == r.cells.size());
    for (size_t i = 0; i < r.cells.size(); ++i) {
        CHECK(back.cells[i].stats.mse == r.cells[i].stats.mse);
        CHECK(back.cells[i].estimator == r.cells[i].estimator);
    }
    std::remove(path.c_str());
}

TEST_CASE("SVG output structure and determinism") {
    TrialConfig cfg = tiny_config();
    cfg.t_sweep = {1, 10, 100};
    const TrialReport r = run_trial(cfg, 2);
    emit_svg(r, PlotKind::MseVsT, "unit_plot.svg");
    const std::string svg = slurp("unit_plot.svg");
    CHECK(svg.rfind("<svg", 0) == 0);
    CHECK(svg.find("</svg>") != std::string::npos);
    CHECK(svg.find("polyline") != std::string::npos);
    CHECK(svg.find("noise-est-lin") != std::string::npos);
    CHECK(svg.find("CRLB") != std::string::npos);
    emit_svg(r, PlotKind::MseVsT, "unit_plot2.svg");
    CHECK(svg == slurp("unit_plot2.svg"));
    std::remove("unit_plot.svg");
    std::remove("unit_plot2.svg");
}

TEST_CASE("single-run cells are handled") {
    TrialConfig cfg = tiny_config();
    cfg.run_sweep = {1};
    cfg.estimators = {"noise-est-lin"};
    const TrialReport r = run_trial(cfg, 4);
    for (const auto& cell : r.cells) {
        CHECK(cell.runs == 1);
        CHECK(std::isfinite(cell.stats.mse));
    }
}

TEST_CASE("invalid configs are rejected") {
    TrialConfig cfg = tiny_config();
    cfg.estimators.clear();
    CHECK_THROWS_AS(cfg.validate(), ConfigError);
    TrialConfig cfg2 = tiny_config();
    cfg2.t_sweep = {0};
    CHECK_THROWS_AS(cfg2.validate(), ConfigError);
    TrialConfig cfg3 = tiny_config();
    cfg3.estimators = {"nope"};
    CHECK_THROWS_AS(cfg3.validate(), ConfigError);
}
