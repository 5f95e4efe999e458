#pragma once

// Batch commands behind the `shiftest` executable. Each writes its results
// into `output_dir` and reports problems through shiftest::Error.

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>

#include "shiftest/error.hpp"
#include "shiftest/simulate.hpp"
#include "shiftest/weights.hpp"

namespace shiftest {

struct RunConfig {
    std::filesystem::path input;
    std::filesystem::path output_dir = ".";
    std::optional<double> period;
    std::string weights = "power:1.3";
    double confidence = 0.95;
    std::uint64_t seed = 1;
    int replicates = 200;
    double sigma = 1.0;
    std::string pattern = "sinc15";
    int curves = 10;
    int samples = 101;
    int max_iterations = 500;
    double gradient_tolerance = 1e-8;
    bool truncate_even = false;
    int threads = 0;
};

/// "power:<beta>", "unit" or "file:<path>" (one delta per line for
/// l = 0, 1, ..., header optional).
WeightScheme parse_weights(const std::string& spec, int cutoff);

/// "sinc15", "cosine" or "file:<path>" (first curve column of a curve table).
Pattern parse_pattern(const std::string& spec);

/// Simulation settings assembled from the command-line configuration.
SimulationSpec simulation_spec(const RunConfig& config);

/// shifts.csv, aligned.csv, mean.csv, covariance.csv, report.json.
void cmd_estimate(const RunConfig& config, std::ostream& warnings);

/// summary.json, replicates.csv, plotdata/*.csv, figures/*.svg.
void cmd_simulate(const RunConfig& config, std::ostream& warnings);

/// comparison.csv and report.json; simulated data when no input is given.
void cmd_compare_landmark(const RunConfig& config, std::ostream& warnings);

/// 2 input, 3 estimation, 4 inference.
int exit_code(Stage stage);

/// Runs a command by name and maps failures to exit codes, printing the
/// failing stage to `errors`. Returns 0 on success.
int run_command(const std::string& name, const RunConfig& config, std::ostream& errors);

}  // namespace shiftest
