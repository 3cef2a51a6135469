#include "rloc/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <limits>
#include <cstring>
#include <fstream>
#include <json.hpp>
#include <sstream>
#include <thread>

#include "rloc/rng.hpp"

namespace rloc {

EstimatorSpec EstimatorSpec::parse(const std::string& name) {
    EstimatorSpec spec;
    spec.label = name;
    std::string base = name;
    const std::string prefix = "two-step:";
    if (base.rfind(prefix, 0) == 0) {
        spec.two_step = true;
        base = base.substr(prefix.size());
    }
    if (base == "bias-eli") spec.first = FirstStep::BiasEli;
    else if (base == "bias-eli-lin") spec.first = FirstStep::BiasEliLin;
    else if (base == "noise-est") spec.first = FirstStep::NoiseEst;
    else if (base == "noise-est-lin") spec.first = FirstStep::NoiseEstLin;
    else if (base == "s-ls") spec.first = FirstStep::SLs;
    else if (base == "w-bias-eli-lin") spec.first = FirstStep::WBiasEliLin;
    else if (base == "aw-bias-eli-lin") spec.first = FirstStep::AWBiasEliLin;
    else throw ConfigError("unknown estimator in config: " + name);
    return spec;
}

void TrialConfig::validate() const {
    scenario.validate();
    if (estimators.empty()) throw ConfigError("trial config: empty estimator list");
    for (const auto& e : estimators) EstimatorSpec::parse(e);
    if (t_sweep.empty()) throw ConfigError("trial config: empty T sweep");
    for (int t : t_sweep)
        if (t < 1) throw ConfigError("trial config: T must be >= 1");
    if (sigma2_sweep.empty()) throw ConfigError("trial config: empty sigma2 sweep");
    if (run_sweep.empty()) throw ConfigError("trial config: empty run sweep");
    for (long n : run_sweep)
        if (n < 1) throw ConfigError("trial config: run count must be >= 1");
}

std::uint64_t TrialConfig::content_hash() const {
    // FNV-1a over a canonical text rendering of the config content.
    std::ostringstream ss;
    ss << name << '|' << scenario.to_json_text() << '|' << base_seed << '|';
    for (const auto& e : estimators) ss << e << ',';
    ss << '|';
    for (int t : t_sweep) ss << t << ',';
    ss << '|';
    char buf[32];
    for (double s : sigma2_sweep) {
        std::snprintf(buf, sizeof(buf), "%.17g", s);
        ss << buf << ',';
    }
    ss << '|';
    for (long n : run_sweep) ss << n << ',';
    std::uint64_t h = 14695981039346656037ULL;
    for (char c : ss.str()) {
        h ^= static_cast<unsigned char>(c);
        h *= 1099511628211ULL;
    }
    return h;
}

TrialConfig TrialConfig::from_json_text(const std::string& text) {
    nlohmann::json j = nlohmann::json::parse(text);
    TrialConfig c;
    c.name = j.value("name", "custom");
    if (j.contains("scenario_file"))
        c.scenario = Scenario::from_json_file(j.at("scenario_file").get<std::string>());
    else
        c.scenario = Scenario::from_json_text(j.at("scenario").dump());
    c.estimators = j.at("estimators").get<std::vector<std::string>>();
    c.t_sweep = j.at("t_sweep").get<std::vector<int>>();
    c.sigma2_sweep = j.value("sigma2_sweep", std::vector<double>{1.0});
    if (j.contains("run_sweep"))
        c.run_sweep = j.at("run_sweep").get<std::vector<long>>();
    else
        c.run_sweep = {j.value("runs", 200L)};
    c.base_seed = j.value("seed", 1ULL);
    c.validate();
    return c;
}

TrialConfig TrialConfig::from_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open trial config: " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return from_json_text(ss.str());
}

std::vector<std::string> TrialConfig::builtin_names() {
    return {"trial1-tiny", "trial2-small", "trial3-small",
            "trial4-small", "trial5-small", "trial6-small"};
}

TrialConfig TrialConfig::builtin(const std::string& name, bool full) {
    TrialConfig c;
    c.name = name;
    c.base_seed = 20240815;
    c.scenario = reference_scenario(1.0, 1);
    if (name == "trial1-tiny") {
        // Finite-sample bias of the first-step estimators vs Monte-Carlo runs.
        c.estimators = {"bias-eli", "bias-eli-lin", "noise-est", "noise-est-lin"};
        c.t_sweep = {1};
        c.sigma2_sweep = {1.0};
        c.run_sweep = full ? std::vector<long>{1000, 10000, 100000}
                           : std::vector<long>{100, 300, 1000};
    } else if (name == "trial2-small") {
        // Large-sample bias vs T, including the non-consistent S-LS.
        c.estimators = {"bias-eli", "noise-est", "noise-est-lin", "s-ls"};
        c.t_sweep = full ? std::vector<int>{1, 10, 100, 1000, 10000}
                         : std::vector<int>{1, 10, 100, 1000};
        c.sigma2_sweep = {1.0};
        c.run_sweep = {full ? 1000L : 200L};
    } else if (name == "trial3-small") {
        // MSE vs number of measurements, first-step and two-step.
        c.estimators = {"bias-eli", "bias-eli-lin", "noise-est", "noise-est-lin", "s-ls",
                        "two-step:bias-eli", "two-step:noise-est", "two-step:noise-est-lin"};
        c.t_sweep = full ? std::vector<int>{1, 10, 100, 1000, 10000}
                         : std::vector<int>{1, 10, 100, 1000};
        c.sigma2_sweep = {1.0};
        c.run_sweep = {full ? 1000L : 200L};
    } else if (name == "trial4-small") {
        // MSE vs noise intensity at large T.
        c.estimators = {"bias-eli", "noise-est", "noise-est-lin", "two-step:bias-eli",
                        "two-step:noise-est", "two-step:noise-est-lin"};
        c.t_sweep = {full ? 10000 : 1000};
        c.sigma2_sweep = {0.1, 0.3, 1.0, 3.0, 10.0};
        c.run_sweep = {full ? 1000L : 200L};
    } else if (name == "trial5-small") {
        // Theoretical vs Monte-Carlo MSE of Noise-Est-Lin at T = 1.
        c.estimators = {"noise-est-lin"};
        c.t_sweep = {1};
        c.sigma2_sweep = {0.1, 0.3, 1.0, 3.0, 10.0};
        c.run_sweep = {full ? 100000L : 2000L};
    } else if (name == "trial6-small") {
        // Heterogeneous variances: weighted and approximately weighted estimators.
        c.scenario = reference_scenario_heterogeneous(1);
        c.estimators = {"w-bias-eli-lin", "two-step:w-bias-eli-lin", "aw-bias-eli-lin",
                        "two-step:aw-bias-eli-lin"};
        c.t_sweep = full ? std::vector<int>{1, 10, 100, 1000, 10000}
                         : std::vector<int>{1, 10, 100, 1000};
        c.sigma2_sweep = {1.0};
        c.run_sweep = {full ? 1000L : 200L};
    } else {
        throw ConfigError("unknown builtin trial: " + name);
    }
    return c;
}

namespace {

std::uint64_t double_bits(double v) {
    std::uint64_t bits;
    std::memcpy(&bits, &v, sizeof(bits));
    return bits;
}

// Seed for one Monte-Carlo run; independent of the estimator list and of N.
std::uint64_t run_seed(std::uint64_t base, int T, double sigma2, long run) {
    std::uint64_t h = rng::hash_combine(base, static_cast<std::uint64_t>(T));
    h = rng::hash_combine(h, double_bits(sigma2));
    return rng::hash_combine(h, static_cast<std::uint64_t>(run));
}

Scenario cell_scenario(const Scenario& base, int T, double sigma2) {
    Scenario s = base;
    s.repeats = T;
    if (s.noise.kind == NoiseKind::Homogeneous) {
        s.noise.sigma2 = sigma2;
    } else {
        for (double& v : s.noise.sigma2_per_sensor) v *= sigma2;
    }
    return s;
}

struct ChunkStats {
    std::vector<StatsAccumulator> per_estimator;
    std::vector<long> failures;
};

} // namespace

TrialReport run_trial(const TrialConfig& config, int workers) {
    config.validate();
    if (workers < 1) workers = 1;
    const int n = config.scenario.dim();

    std::vector<EstimatorSpec> specs;
    for (const auto& name : config.estimators) specs.push_back(EstimatorSpec::parse(name));

    TrialReport report;
    report.config_name = config.name;
    report.base_seed = config.base_seed;
    report.config_hash = config.content_hash();
    report.dim = n;

    for (int T : config.t_sweep) {
        for (double s2 : config.sigma2_sweep) {
            for (long N : config.run_sweep) {
                const Scenario scen = cell_scenario(config.scenario, T, s2);
                const auto t0 = std::chrono::steady_clock::now();

                // Fixed-size chunks keep the merge order independent of worker count.
                const long chunk_size = 32;
                const long num_chunks = (N + chunk_size - 1) / chunk_size;
                std::vector<ChunkStats> chunks;
                chunks.reserve(static_cast<size_t>(num_chunks));
                for (long ci = 0; ci < num_chunks; ++ci) {
                    ChunkStats cs;
                    cs.per_estimator.assign(specs.size(), StatsAccumulator(n));
                    cs.failures.assign(specs.size(), 0);
                    chunks.push_back(std::move(cs));
                }

                const double true_sigma2 =
                    scen.noise.kind == NoiseKind::Homogeneous ? scen.noise.sigma2 : 0.0;
                auto work_chunk = [&](long ci) {
                    const long lo = ci * chunk_size;
                    const long hi = std::min(N, lo + chunk_size);
                    ChunkStats& cs = chunks[static_cast<size_t>(ci)];
                    for (long run = lo; run < hi; ++run) {
                        const MeasurementSet meas =
                            simulate(scen, run_seed(config.base_seed, T, s2, run));
                        for (size_t e = 0; e < specs.size(); ++e) {
                            try {
                                const Estimate est =
                                    specs[e].two_step
                                        ? two_step(specs[e].first, scen, meas)
                                        : first_step(specs[e].first, scen, meas);
                                cs.per_estimator[e].add(est, scen.target, true_sigma2);
                            } catch (const std::exception&) {
                                ++cs.failures[e];
                            }
                        }
                    }
                };

                if (workers == 1) {
                    for (long ci = 0; ci < num_chunks; ++ci) work_chunk(ci);
                } else {
                    std::atomic<long> next{0};
                    std::vector<std::thread> pool;
                    for (int w = 0; w < workers; ++w)
                        pool.emplace_back([&] {
                            long ci;
                            while ((ci = next.fetch_add(1)) < num_chunks) work_chunk(ci);
                        });
                    for (auto& t : pool) t.join();
                }

                const double secs =
                    std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

                double crlb = std::numeric_limits<double>::quiet_NaN();
                bool positive_noise = scen.noise.kind == NoiseKind::Homogeneous
                                          ? scen.noise.sigma2 > 0.0
                                          : true;
                if (positive_noise) crlb = fisher(scen, scen.target).crlb;

                for (size_t e = 0; e < specs.size(); ++e) {
                    CellResult cell;
                    cell.estimator = specs[e].label;
                    cell.T = T;
                    cell.sigma2 = s2;
                    cell.m = scen.num_measurements();
                    cell.runs = N;
                    StatsAccumulator acc(n);
                    long failures = 0;
                    for (const auto& cs : chunks) {
                        acc.merge(cs.per_estimator[e]);
                        failures += cs.failures[e];
                    }
                    cell.failures = failures;
                    if (failures < N) cell.stats = acc.finish();
                    cell.crlb = crlb;
                    if (!specs[e].two_step && scen.noise.kind == NoiseKind::Homogeneous &&
                        (specs[e].first == FirstStep::BiasEliLin ||
                         specs[e].first == FirstStep::NoiseEstLin))
                        cell.theory_mse = theoretical_mse(scen, scen.noise.sigma2).position_mse();
                    cell.wall_seconds = secs / static_cast<double>(specs.size());
                    report.cells.push_back(std::move(cell));
                }
            }
        }
    }
    return report;
}

std::string TrialReport::to_json_text() const {
    nlohmann::json j;
    j["config_name"] = config_name;
    j["base_seed"] = base_seed;
    j["config_hash"] = config_hash;
    j["dim"] = dim;
    for (const auto& c : cells) {
        nlohmann::json jc;
        jc["estimator"] = c.estimator;
        jc["T"] = c.T;
        jc["sigma2"] = c.sigma2;
        jc["m"] = c.m;
        jc["runs"] = c.runs;
        jc["failures"] = c.failures;
        jc["mse"] = c.stats.mse;
        jc["bias"] = std::vector<double>(c.stats.mean_deviation.data(),
                                         c.stats.mean_deviation.data() +
                                             c.stats.mean_deviation.size());
        if (c.stats.sigma2_mean_deviation)
            jc["bias_sigma2"] = *c.stats.sigma2_mean_deviation;
        if (std::isfinite(c.crlb)) jc["crlb"] = c.crlb;
        if (c.theory_mse) jc["theory_mse"] = *c.theory_mse;
        jc["wall_seconds"] = c.wall_seconds;
        j["cells"].push_back(jc);
    }
    return j.dump(2);
}

TrialReport TrialReport::from_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open report: " + path);
    nlohmann::json j = nlohmann::json::parse(in);
    TrialReport r;
    r.config_name = j.value("config_name", "");
    r.base_seed = j.value("base_seed", 0ULL);
    r.config_hash = j.value("config_hash", 0ULL);
    r.dim = j.value("dim", 3);
    for (const auto& jc : j.at("cells")) {
        CellResult c;
        c.estimator = jc.at("estimator").get<std::string>();
        c.T = jc.at("T").get<int>();
        c.sigma2 = jc.at("sigma2").get<double>();
        c.m = jc.at("m").get<int>();
        c.runs = jc.at("runs").get<long>();
        c.failures = jc.at("failures").get<long>();
        c.stats.mse = jc.at("mse").get<double>();
        const auto bias = jc.at("bias").get<std::vector<double>>();
        c.stats.mean_deviation =
            Eigen::Map<const Eigen::VectorXd>(bias.data(), static_cast<int>(bias.size()));
        c.stats.run_count = c.runs - c.failures;
        if (jc.contains("bias_sigma2"))
            c.stats.sigma2_mean_deviation = jc.at("bias_sigma2").get<double>();
        c.crlb = jc.value("crlb", std::numeric_limits<double>::quiet_NaN());
        if (jc.contains("theory_mse")) c.theory_mse = jc.at("theory_mse").get<double>();
        c.wall_seconds = jc.value("wall_seconds", 0.0);
        r.cells.push_back(std::move(c));
    }
    return r;
}

void emit_csv(const TrialReport& report, const std::string& path, bool include_timing) {
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot open output file: " + path);
    out << "estimator,T,sigma2,m,N";
    for (int i = 1; i <= report.dim; ++i) out << ",bias_x" << i;
    out << ",bias_sigma2,mse,crlb,theory_mse,failures,seconds\n";
    char buf[64];
    auto fmt = [&buf](double v) {
        std::snprintf(buf, sizeof(buf), "%.17g", v);
        return std::string(buf);
    };
    for (const auto& c : report.cells) {
        out << c.estimator << ',' << c.T << ',' << fmt(c.sigma2) << ',' << c.m << ',' << c.runs;
        for (int i = 0; i < report.dim; ++i) out << ',' << fmt(c.stats.mean_deviation(i));
        out << ',';
        if (c.stats.sigma2_mean_deviation) out << fmt(*c.stats.sigma2_mean_deviation);
        out << ',' << fmt(c.stats.mse) << ',';
        if (std::isfinite(c.crlb)) out << fmt(c.crlb);
        out << ',';
        if (c.theory_mse) out << fmt(*c.theory_mse);
        out << ',' << c.failures << ',';
        if (include_timing) {
            std::snprintf(buf, sizeof(buf), "%.3f", c.wall_seconds);
            out << buf;
        }
        out << '\n';
    }
}

PlotKind plot_kind_from_name(const std::string& name) {
    if (name == "bias_vs_runs") return PlotKind::BiasVsRuns;
    if (name == "mse_vs_T") return PlotKind::MseVsT;
    if (name == "mse_vs_noise") return PlotKind::MseVsNoise;
    throw ConfigError("unknown plot kind: " + name);
}

} // namespace rloc
