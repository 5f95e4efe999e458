#pragma once

// Baseline registration: estimate each curve's maximum with a periodic
// Nadaraya-Watson smoother, then shift the maxima into coincidence.

#include <optional>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "shiftest/fourier.hpp"

namespace shiftest {

struct LandmarkConfig {
    /// Gaussian kernel bandwidth in time units; non-positive means "use
    /// default_bandwidth".
    double bandwidth = 0.0;
};

/// 1.06 * (T / sqrt(12)) * n^(-1/5): the normal-reference rule applied to
/// the uniform design on [0, T).
double default_bandwidth(double period, int n);

/// Periodic Nadaraya-Watson smoother over the grid t_i = i T / n. Throws
/// InputError for a non-positive bandwidth.
std::vector<double> smooth(std::span<const double> curve, double period, double bandwidth);

/// Location (time units, in [0, T)) of the maximum of a smoothed curve,
/// refined by a parabola through the discrete argmax and its neighbours.
/// Throws EstimationError("landmark undefined") when the maximum is not unique.
double max_location(std::span<const double> smoothed, double period);

/// Per-curve landmark (max) locations; nullopt for curves whose maximum is
/// undefined.
std::vector<std::optional<double>> landmark_locations(const CurveSet& curves,
                                                      const LandmarkConfig& config);

/// theta_j = loc_j - loc_1 wrapped into (-T/2, T/2]. Throws when any curve
/// has no landmark.
Eigen::VectorXd align_by_max(const CurveSet& curves, const LandmarkConfig& config);

}  // namespace shiftest
