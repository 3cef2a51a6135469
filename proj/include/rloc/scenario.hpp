#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace rloc {

// Thrown for invalid scenarios, mode mismatches and malformed files.
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Thrown when a numerical routine cannot proceed (rank deficiency, no bracket, ...).
struct NumericalError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

enum class NoiseKind { Homogeneous, Heterogeneous };

struct NoiseModel {
    NoiseKind kind = NoiseKind::Homogeneous;
    double sigma2 = 0.0;                 // homogeneous variance
    std::vector<double> sigma2_per_sensor; // heterogeneous, length M

    double variance_for(int sensor) const {
        return kind == NoiseKind::Homogeneous ? sigma2
                                              : sigma2_per_sensor.at(static_cast<size_t>(sensor));
    }
};

// Sensor geometry, true target and noise model: the ground truth of an experiment.
struct Scenario {
    std::vector<Eigen::VectorXd> sensors; // M sensors, each of dimension n
    Eigen::VectorXd target;               // true position
    NoiseModel noise;
    int repeats = 1;                      // T observations per sensor

    int dim() const { return static_cast<int>(target.size()); }
    int num_sensors() const { return static_cast<int>(sensors.size()); }
    int num_measurements() const { return num_sensors() * repeats; }

    double true_distance(int sensor) const {
        return (sensors[static_cast<size_t>(sensor)] - target).norm();
    }

    // Enforces the structural invariants: n in {2,3}, M >= n+1, matching
    // dimensions, nonnegative variances, no sensor on top of the target.
    void validate() const;

    static Scenario from_json_file(const std::string& path);
    static Scenario from_json_text(const std::string& text);
    std::string to_json_text() const;
};

// Flat measurement list with per-measurement sensor provenance.
// Measurement k belongs to sensor sensor_index[k], repetition repetition[k].
struct MeasurementSet {
    Eigen::VectorXd values;
    std::vector<int> sensor_index;
    std::vector<int> repetition;

    int size() const { return static_cast<int>(values.size()); }

    // Grouped view: measurements of one sensor across repetitions.
    std::vector<double> for_sensor(int sensor) const;

    void to_csv_file(const std::string& path) const;
    static MeasurementSet from_csv_file(const std::string& path);
};

// d_ij = ||a_i - x^o|| + r_ij, r_ij ~ N(0, sigma_i^2). Pure in (scenario, seed);
// the draw for (i, j) depends only on (seed, i, j), not on iteration order.
MeasurementSet simulate(const Scenario& scenario, std::uint64_t seed);

// Built-in benchmark geometry: 10 sensors on a cube-ish layout, target [6 6 6].
Scenario reference_scenario(double sigma2 = 1.0, int repeats = 1);

// Same geometry with per-sensor variances 0.01, 0.04, ..., 1.
Scenario reference_scenario_heterogeneous(int repeats = 1);

} // namespace rloc
