#include <CLI11.hpp>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <json.hpp>

#include "rloc/analysis.hpp"
#include "rloc/harness.hpp"
#include "rloc/refine.hpp"

namespace fs = std::filesystem;
using namespace rloc;

namespace {

nlohmann::json estimate_to_json(const Estimate& e) {
    nlohmann::json j;
    j["x"] = std::vector<double>(e.x.data(), e.x.data() + e.x.size());
    j["method"] = method_name(e.method);
    j["two_step"] = e.two_step;
    if (e.sigma2) j["sigma2"] = *e.sigma2;
    if (e.lifted)
        j["lifted"] = std::vector<double>(e.lifted->data(), e.lifted->data() + e.lifted->size());
    j["diagnostics"] = {{"solver_path", e.solver_path},
                        {"iterations", e.iterations},
                        {"objective", e.objective},
                        {"condition_number", e.condition_number}};
    return j;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Range-based localization toolkit"};
    app.require_subcommand(1);

    // simulate
    auto* sim = app.add_subcommand("simulate", "Synthesize noisy range measurements");
    std::string sim_scenario, sim_out;
    std::uint64_t sim_seed = 1;
    sim->add_option("--scenario", sim_scenario, "Scenario JSON file")->required();
    sim->add_option("--seed", sim_seed, "RNG seed");
    sim->add_option("--out", sim_out, "Output CSV path")->required();

    // estimate
    auto* est = app.add_subcommand("estimate", "Run an estimator on measurements");
    std::string est_scenario, est_meas, est_method;
    double est_sigma2 = -1.0;
    bool est_two_step = false;
    est->add_option("--scenario", est_scenario, "Scenario JSON file")->required();
    est->add_option("--measurements", est_meas, "Measurement CSV file")->required();
    est->add_option("--method", est_method, "Estimator name")->required();
    est->add_option("--sigma2", est_sigma2, "Known noise variance (Bias-Eli family)");
    est->add_flag("--two-step", est_two_step, "Apply one Gauss-Newton refinement step");

    // crlb
    auto* crlb = app.add_subcommand("crlb", "Fisher information and CRLB for a scenario");
    std::string crlb_scenario;
    double crlb_sigma2 = -1.0;
    crlb->add_option("--scenario", crlb_scenario, "Scenario JSON file")->required();
    crlb->add_option("--sigma2", crlb_sigma2, "Override homogeneous noise variance");

    // trial
    auto* trial = app.add_subcommand("trial", "Run a Monte-Carlo trial");
    std::string trial_config, trial_builtin, trial_out;
    bool trial_full = false, trial_timing = false;
    int trial_workers = 1;
    trial->add_option("--config", trial_config, "Trial config JSON file");
    trial->add_option("--builtin", trial_builtin, "Builtin trial name");
    trial->add_flag("--full", trial_full, "Full reproduction scale (slow)");
    trial->add_flag("--timing", trial_timing, "Include wall time in the CSV");
    trial->add_option("--out", trial_out, "Output directory")->required();
    trial->add_option("--workers", trial_workers, "Worker thread count");

    // plot
    auto* plot = app.add_subcommand("plot", "Render an SVG figure from a trial report");
    std::string plot_report, plot_kind, plot_out;
    plot->add_option("--report", plot_report, "Report directory (from trial)")->required();
    plot->add_option("--kind", plot_kind, "bias_vs_runs | mse_vs_T | mse_vs_noise")->required();
    plot->add_option("--out", plot_out, "Output SVG path")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (*sim) {
            const Scenario s = Scenario::from_json_file(sim_scenario);
            simulate(s, sim_seed).to_csv_file(sim_out);
        } else if (*est) {
            Scenario s = Scenario::from_json_file(est_scenario);
            if (est_sigma2 >= 0.0) {
                s.noise.kind = NoiseKind::Homogeneous;
                s.noise.sigma2 = est_sigma2;
            }
            const MeasurementSet meas = MeasurementSet::from_csv_file(est_meas);
            const EstimatorSpec spec = EstimatorSpec::parse(est_method);
            std::optional<double> s2;
            if (est_sigma2 >= 0.0) s2 = est_sigma2;
            const Estimate e = (est_two_step || spec.two_step)
                                   ? two_step(spec.first, s, meas, s2)
                                   : first_step(spec.first, s, meas, s2);
            std::cout << estimate_to_json(e).dump(2) << "\n";
        } else if (*crlb) {
            Scenario s = Scenario::from_json_file(crlb_scenario);
            if (crlb_sigma2 >= 0.0) {
                s.noise.kind = NoiseKind::Homogeneous;
                s.noise.sigma2 = crlb_sigma2;
            }
            const FisherReport r = fisher(s, s.target);
            nlohmann::json j;
            j["crlb"] = r.crlb;
            j["per_coordinate"] = std::vector<double>(
                r.per_coordinate.data(), r.per_coordinate.data() + r.per_coordinate.size());
            std::vector<std::vector<double>> F;
            for (int i = 0; i < r.F.rows(); ++i) {
                const Eigen::RowVectorXd row = r.F.row(i);
                F.emplace_back(row.data(), row.data() + row.size());
            }
            j["fisher"] = F;
            std::cout << j.dump(2) << "\n";
        } else if (*trial) {
            if (trial_config.empty() == trial_builtin.empty())
                throw ConfigError("trial: give exactly one of --config / --builtin");
            const TrialConfig cfg = trial_builtin.empty()
                                        ? TrialConfig::from_json_file(trial_config)
                                        : TrialConfig::builtin(trial_builtin, trial_full);
            const TrialReport report = run_trial(cfg, trial_workers);
            fs::create_directories(trial_out);
            emit_csv(report, (fs::path(trial_out) / "report.csv").string(), trial_timing);
            std::ofstream((fs::path(trial_out) / "report.json").string())
                << report.to_json_text() << "\n";
            long total_failures = 0;
            for (const auto& c : report.cells) total_failures += c.failures;
            std::cerr << "trial '" << cfg.name << "': " << report.cells.size() << " cells, "
                      << total_failures << " failures\n";
        } else if (*plot) {
            fs::path p(plot_report);
            if (fs::is_directory(p)) p /= "report.json";
            const TrialReport report = TrialReport::from_json_file(p.string());
            emit_svg(report, plot_kind_from_name(plot_kind), plot_out);
        }
    } catch (const ConfigError& e) {
        std::cerr << "configuration error: " << e.what() << "\n";
        return 2;
    } catch (const NumericalError& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
