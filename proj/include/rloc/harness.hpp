#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "rloc/analysis.hpp"
#include "rloc/refine.hpp"
#include "rloc/scenario.hpp"

namespace rloc {

// Estimator selector as it appears in configs: a first-step name, optionally
// prefixed "two-step:" (e.g. "two-step:bias-eli").
struct EstimatorSpec {
    FirstStep first;
    bool two_step = false;
    std::string label;

    static EstimatorSpec parse(const std::string& name);
};

struct TrialConfig {
    std::string name;
    Scenario scenario;               // noise/repeats overridden per cell by the sweeps
    std::vector<std::string> estimators;
    std::vector<int> t_sweep;        // repeats per sensor
    std::vector<double> sigma2_sweep; // homogeneous variance, or scale factor for
                                      // heterogeneous per-sensor variances
    std::vector<long> run_sweep;     // Monte-Carlo run counts (usually one entry)
    std::uint64_t base_seed = 1;

    void validate() const;
    std::uint64_t content_hash() const;

    static TrialConfig from_json_file(const std::string& path);
    static TrialConfig from_json_text(const std::string& text);
    static TrialConfig builtin(const std::string& name, bool full_scale);
    static std::vector<std::string> builtin_names();
};

struct CellResult {
    std::string estimator;
    int T = 1;
    double sigma2 = 0.0; // sweep value
    int m = 0;
    long runs = 0;
    EmpiricalStats stats;
    double crlb = 0.0;
    std::optional<double> theory_mse; // closed-form lift MSE, *-Lin estimators only
    long failures = 0;
    double wall_seconds = 0.0;
};

struct TrialReport {
    std::string config_name;
    std::uint64_t base_seed = 0;
    std::uint64_t config_hash = 0;
    int dim = 3;
    std::vector<CellResult> cells;

    std::string to_json_text() const;
    static TrialReport from_json_file(const std::string& path);
};

// Runs every (estimator, T, sigma2, N) cell. Noise realizations depend only on
// (base seed, T, sigma2, run index), so estimator lists can change without
// perturbing them, and worker count never affects the result.
TrialReport run_trial(const TrialConfig& config, int workers = 1);

// One CSV: header plus one row per cell. Timing column is left empty unless
// include_timing is set, keeping default output byte-reproducible.
void emit_csv(const TrialReport& report, const std::string& path, bool include_timing = false);

enum class PlotKind { BiasVsRuns, MseVsT, MseVsNoise };

PlotKind plot_kind_from_name(const std::string& name);

// Self-contained SVG: one polyline per estimator plus a CRLB reference line;
// log-log axes for the MSE kinds. Output is deterministic.
void emit_svg(const TrialReport& report, PlotKind kind, const std::string& path);

} // namespace rloc
