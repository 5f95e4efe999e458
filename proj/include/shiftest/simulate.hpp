#pragma once

// Synthetic shifted-curve datasets and replicated Monte Carlo studies.

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "shiftest/criterion.hpp"
#include "shiftest/fourier.hpp"
#include "shiftest/landmark.hpp"
#include "shiftest/optimizer.hpp"
#include "shiftest/weights.hpp"

namespace shiftest {

/// T-periodic pattern evaluated on (-T/2, T/2] coordinates.
class Pattern {
public:
    enum class Kind { Sinc15, Cosine, Samples };

    /// f(u) = 15 sin(4u) / (4u) with u = 2 pi t / T, f(0) = 15.
    static Pattern sinc15() { return Pattern(Kind::Sinc15, {}); }
    /// f(t) = cos(2 pi t / T).
    static Pattern cosine() { return Pattern(Kind::Cosine, {}); }
    /// Trigonometric interpolant of samples taken at t_i = -T/2 + i T / m
    /// (m odd).
    static Pattern samples(std::vector<double> values);

    Kind kind() const { return kind_; }
    std::string name() const;
    double value(double t, double period) const;

    /// c_l = (1/T) int_{-T/2}^{T/2} f(t) exp(-2 pi i l t / T) dt for |l| <= cutoff,
    /// indexed l + cutoff. Named patterns use composite Simpson integration;
    /// sampled patterns are exact.
    Eigen::VectorXcd true_coefficients(int cutoff, double period) const;

private:
    Pattern(Kind kind, std::vector<double> values);

    Kind kind_;
    std::vector<double> values_;
    std::vector<Complex> coeffs_;  // sampled patterns only
};

struct SimulationSpec {
    Pattern pattern = Pattern::sinc15();
    int curves = 10;
    int samples = 101;
    double sigma = 1.0;
    double period = 2.0 * kPi;
    /// Explicit time-domain shifts (length J, first entry 0). When empty the
    /// phases are drawn uniformly on [-shift_half_width, shift_half_width].
    std::optional<Eigen::VectorXd> shifts;
    double shift_half_width = kPi / 4.0;
    /// Weight family; rebuilt for the cutoff of `samples`.
    WeightScheme weights = WeightScheme::power(1.3, 1);
    int replicates = 1;
    std::uint64_t seed = 1;
    double level = 0.95;
    bool with_landmark = true;
    bool with_inference = true;
    OptimizerConfig optimizer;
    LandmarkConfig landmark;
    /// 0 means one worker per hardware thread.
    int threads = 0;

    /// Throws InputError on even or too small `samples`, negative sigma,
    /// J < 2 or R < 1.
    void validate() const;
    int cutoff() const { return (samples - 1) / 2; }
    WeightScheme resolved_weights() const { return weights.with_cutoff(cutoff()); }
};

struct SimulatedData {
    CurveSet curves;
    /// True shifts, time units and radians, one per curve (first is 0).
    Eigen::VectorXd theta;
    Eigen::VectorXd alpha;
};

/// Deterministic in (seed, replicate): shifts come from stream 0, noise from
/// stream 1, drawn curve by curve.
SimulatedData generate(const SimulationSpec& spec, std::uint64_t replicate);

struct ReplicateResult {
    Eigen::VectorXd alpha_true;  // J-1 free phases
    Eigen::VectorXd alpha_hat;
    Eigen::VectorXd theta_true;  // J entries
    Eigen::VectorXd theta_hat;
    double criterion = 0.0;
    bool converged = false;
    int iterations = 0;
    bool inference_ok = false;
    double sigma2_hat = 0.0;
    Eigen::VectorXd std_errors;
    std::vector<bool> covered;
    std::optional<Eigen::VectorXd> theta_landmark;

    /// wrap(alpha_hat - alpha_true), per free phase.
    Eigen::VectorXd error() const;
};

struct MonteCarloSummary {
    int replicates = 0;
    int curves = 0;
    int samples = 0;
    double sigma = 0.0;
    std::vector<ReplicateResult> runs;

    Eigen::VectorXd bias;
    /// Sample covariance of sqrt(n) (alpha_hat - alpha*).
    Eigen::MatrixXd empirical_covariance;
    /// sigma^2 Gamma from the pattern's true coefficients.
    Eigen::MatrixXd theoretical_covariance;
    double gamma_scalar_true = 0.0;
    Eigen::VectorXd coverage;
    Eigen::VectorXd std_dev;
    double rmse = 0.0;
    std::optional<double> rmse_landmark;
    double median_abs_error = 0.0;
    double mean_sigma2_hat = 0.0;
    int nonconverged = 0;
    int inference_failures = 0;
    int landmark_failures = 0;
};

/// sigma^2 Gamma from the true coefficients of the spec's pattern.
Eigen::MatrixXd theoretical_covariance(const SimulationSpec& spec, double* scalar = nullptr);

/// Runs every replicate (in parallel) and aggregates in replicate order.
MonteCarloSummary run_study(const SimulationSpec& spec);

/// Lowest point of a profile; ties go to the first.
double grid_minimum(const std::vector<std::pair<double, double>>& profile);

struct CriterionGrid {
    double sigma;
    std::string weights;
    std::vector<std::pair<double, double>> points;
};

/// Two-curve weight sweep: for each sigma one dataset (theta_2 given), the
/// criterion profile under every weight family on `points` grid points.
std::vector<CriterionGrid> weight_sweep(const SimulationSpec& base, double theta2,
                                        const std::vector<double>& sigmas,
                                        const std::vector<WeightScheme>& weights, int points);

}  // namespace shiftest
