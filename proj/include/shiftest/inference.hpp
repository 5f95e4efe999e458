#pragma once

#include <vector>

#include <Eigen/Dense>

#include "shiftest/criterion.hpp"
#include "shiftest/optimizer.hpp"

namespace shiftest {

/// Standard normal quantile, |error| below 1e-12 on (0, 1).
double normal_quantile(double p);

/// sigma^2 estimated from the spread of rephased coefficients around their
/// mean: (1/(J-1)) sum_l sum_j |c~_jl - c^_l|^2. Unbiased at the true phases.
double estimate_noise_variance(const SpectralTable& table, const ConstrainedShift& alpha_hat);

/// Ratio sum delta^4 l^2 |c_l|^2 / (sum delta^2 l^2 |c_l|^2)^2 for given
/// magnitudes |c_l|^2 indexed l + L. Throws InferenceError when the
/// denominator vanishes.
double gamma_scalar(const Eigen::VectorXd& magnitudes2, const WeightScheme& weights);

/// scalar * (I + U) of size (J-1).
Eigen::MatrixXd gamma_matrix(double scalar, int curves);

/// Plug-in asymptotic covariance of sqrt(n)(alpha_hat - alpha*) for sigma = 1,
/// using debiased magnitudes max(|c^_l|^2 - sigma2/(nJ), 0).
Eigen::MatrixXd estimate_gamma(const SpectralTable& table, const WeightScheme& weights,
                               const ConstrainedShift& alpha_hat, double sigma2_hat);

struct Interval {
    double lower;
    double upper;
};

struct CovarianceReport {
    Eigen::MatrixXd gamma_hat;
    double sigma2_hat = 0.0;
    double level = 0.95;
    /// Standard errors of alpha_2..alpha_J in radians.
    Eigen::VectorXd std_errors;
    std::vector<Interval> intervals;       // radians
    std::vector<Interval> time_intervals;  // time units

    /// Covariance of alpha_hat itself: sigma2 * Gamma / n.
    Eigen::MatrixXd covariance(int n) const { return gamma_hat * (sigma2_hat / n); }
};

/// Intervals alpha_j +- z_{(1+level)/2} sqrt(sigma2 Gamma_jj / n).
CovarianceReport confidence_intervals(const EstimationResult& result,
                                      const Eigen::MatrixXd& gamma_hat, double sigma2_hat, int n,
                                      double period, double level);

/// Noise variance, plug-in Gamma and intervals in one call.
CovarianceReport infer(const CriterionContext& ctx, const EstimationResult& result,
                       double period, double level);

}  // namespace shiftest
