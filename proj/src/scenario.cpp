#include "rloc/scenario.hpp"

#include <fstream>
#include <json.hpp>
#include <sstream>

#include "rloc/rng.hpp"

namespace rloc {

void Scenario::validate() const {
    const int n = dim();
    if (n != 2 && n != 3) throw ConfigError("scenario: dimension must be 2 or 3");
    if (sensors.empty()) throw ConfigError("scenario: empty sensor list");
    if (num_sensors() < n + 1)
        throw ConfigError("scenario: need at least n+1 distinct sensors");
    for (const auto& a : sensors) {
        if (a.size() != n) throw ConfigError("scenario: sensor dimension mismatch");
        if ((a - target).norm() <= 0.0)
            throw ConfigError("scenario: sensor coincides with target");
    }
    if (repeats < 1) throw ConfigError("scenario: repeats must be >= 1");
    if (noise.kind == NoiseKind::Homogeneous) {
        if (noise.sigma2 < 0.0) throw ConfigError("scenario: negative variance");
    } else {
        if (static_cast<int>(noise.sigma2_per_sensor.size()) != num_sensors())
            throw ConfigError("scenario: per-sensor variance list length != M");
        for (double v : noise.sigma2_per_sensor)
            if (v < 0.0) throw ConfigError("scenario: negative variance");
    }
}

Scenario Scenario::from_json_text(const std::string& text) {
    nlohmann::json j = nlohmann::json::parse(text);
    Scenario s;
    for (const auto& row : j.at("sensors")) {
        Eigen::VectorXd a(row.size());
        for (size_t k = 0; k < row.size(); ++k) a(static_cast<int>(k)) = row[k].get<double>();
        s.sensors.push_back(a);
    }
    const auto& tgt = j.at("target");
    s.target.resize(static_cast<int>(tgt.size()));
    for (size_t k = 0; k < tgt.size(); ++k) s.target(static_cast<int>(k)) = tgt[k].get<double>();
    const auto& noise = j.at("noise");
    const std::string kind = noise.at("kind").get<std::string>();
    if (kind == "homogeneous") {
        s.noise.kind = NoiseKind::Homogeneous;
        s.noise.sigma2 = noise.at("sigma2").get<double>();
    } else if (kind == "heterogeneous") {
        s.noise.kind = NoiseKind::Heterogeneous;
        s.noise.sigma2_per_sensor = noise.at("sigma2").get<std::vector<double>>();
    } else {
        throw ConfigError("scenario: unknown noise kind '" + kind + "'");
    }
    s.repeats = j.value("repeats", 1);
    s.validate();
    return s;
}

Scenario Scenario::from_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open scenario file: " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return from_json_text(ss.str());
}

std::string Scenario::to_json_text() const {
    nlohmann::json j;
    for (const auto& a : sensors) {
        std::vector<double> row(a.data(), a.data() + a.size());
        j["sensors"].push_back(row);
    }
    j["target"] = std::vector<double>(target.data(), target.data() + target.size());
    if (noise.kind == NoiseKind::Homogeneous) {
        j["noise"] = {{"kind", "homogeneous"}, {"sigma2", noise.sigma2}};
    } else {
        j["noise"] = {{"kind", "heterogeneous"}, {"sigma2", noise.sigma2_per_sensor}};
    }
    j["repeats"] = repeats;
    return j.dump(2);
}

std::vector<double> MeasurementSet::for_sensor(int sensor) const {
    std::vector<double> out;
    for (int k = 0; k < size(); ++k)
        if (sensor_index[static_cast<size_t>(k)] == sensor) out.push_back(values(k));
    return out;
}

void MeasurementSet::to_csv_file(const std::string& path) const {
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot open output file: " + path);
    out << "sensor_index,repetition,distance\n";
    char buf[64];
    for (int k = 0; k < size(); ++k) {
        std::snprintf(buf, sizeof(buf), "%d,%d,%.17g\n", sensor_index[static_cast<size_t>(k)],
                      repetition[static_cast<size_t>(k)], values(k));
        out << buf;
    }
}

MeasurementSet MeasurementSet::from_csv_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open measurements file: " + path);
    std::string line;
    if (!std::getline(in, line)) throw ConfigError("empty measurements file: " + path);
    MeasurementSet ms;
    std::vector<double> vals;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::stringstream ss(line);
        std::string cell;
        std::getline(ss, cell, ',');
        ms.sensor_index.push_back(std::stoi(cell));
        std::getline(ss, cell, ',');
        ms.repetition.push_back(std::stoi(cell));
        std::getline(ss, cell, ',');
        vals.push_back(std::stod(cell));
    }
    ms.values = Eigen::Map<Eigen::VectorXd>(vals.data(), static_cast<int>(vals.size()));
    return ms;
}

MeasurementSet simulate(const Scenario& scenario, std::uint64_t seed) {
    scenario.validate();
    const int M = scenario.num_sensors();
    const int T = scenario.repeats;
    MeasurementSet ms;
    ms.values.resize(M * T);
    ms.sensor_index.reserve(static_cast<size_t>(M * T));
    ms.repetition.reserve(static_cast<size_t>(M * T));
    int k = 0;
    for (int i = 0; i < M; ++i) {
        const double dist = scenario.true_distance(i);
        const double sigma = std::sqrt(scenario.noise.variance_for(i));
        for (int j = 0; j < T; ++j, ++k) {
            const double z = rng::gaussian(seed, static_cast<std::uint64_t>(i),
                                           static_cast<std::uint64_t>(j));
            // Negative d_i can occur at extreme noise; estimators only use d_i^2,
            // so the value is passed through unchanged.
            ms.values(k) = dist + sigma * z;
            ms.sensor_index.push_back(i);
            ms.repetition.push_back(j);
        }
    }
    return ms;
}

Scenario reference_scenario(double sigma2, int repeats) {
    Scenario s;
    const double coords[10][3] = {{5, 0, 5},  {5, 5, -5},  {5, -5, 5},  {5, 0, 0},  {5, 5, 5},
                                  {-5, 0, -5}, {-5, -5, 5}, {-5, 5, -5}, {-5, 0, 0}, {-5, -5, -5}};
    for (const auto& c : coords) {
        Eigen::Vector3d a(c[0], c[1], c[2]);
        s.sensors.push_back(a);
    }
    s.target = Eigen::Vector3d(6, 6, 6);
    s.noise.kind = NoiseKind::Homogeneous;
    s.noise.sigma2 = sigma2;
    s.repeats = repeats;
    return s;
}

Scenario reference_scenario_heterogeneous(int repeats) {
    Scenario s = reference_scenario(0.0, repeats);
    s.noise.kind = NoiseKind::Heterogeneous;
    s.noise.sigma2_per_sensor.clear();
    for (int i = 1; i <= 10; ++i)
        s.noise.sigma2_per_sensor.push_back(0.01 * i * i);
    return s;
}

} // namespace rloc
