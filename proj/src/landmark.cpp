#include "shiftest/landmark.hpp"

#include <algorithm>
#include <cmath>

#include "shiftest/error.hpp"

namespace shiftest {
namespace {

constexpr double kFlatTolerance = 1e-9;

double wrap_half_open(double x, double period) {
    // into (-T/2, T/2]
    double w = std::fmod(x, period);
    if (w > 0.5 * period) w -= period;
    if (w <= -0.5 * period) w += period;
    return w;
}

double resolve_bandwidth(const LandmarkConfig& config, double period, int n) {
    return config.bandwidth > 0.0 ? config.bandwidth : default_bandwidth(period, n);
}

}  // namespace

double default_bandwidth(double period, int n) {
    return 1.06 * (period / std::sqrt(12.0)) * std::pow(static_cast<double>(n), -0.2);
}

std::vector<double> smooth(std::span<const double> curve, double period, double bandwidth) {
    const int n = static_cast<int>(curve.size());
    if (n < 3) throw InputError("smoothing needs at least 3 samples");
    if (!(bandwidth > 0.0)) throw InputError("bandwidth must be positive");

    // The grid is equispaced and circular, so the kernel only depends on the
    // circular lag.
    std::vector<double> kernel(n);
    const double step = period / n;
    for (int k = 0; k < n; ++k) {
        const double dist = std::min(k, n - k) * step;
        const double u = dist / bandwidth;
        kernel[k] = std::exp(-0.5 * u * u);
    }
    double mass = 0.0;
    for (double w : kernel) mass += w;

    std::vector<double> out(n);
    for (int i = 0; i < n; ++i) {
        double acc = 0.0;
        for (int k = 0; k < n; ++k) acc += kernel[k] * curve[(i + k) % n];
        out[i] = acc / mass;
    }
    return out;
}

double max_location(std::span<const double> smoothed, double period) {
    const int n = static_cast<int>(smoothed.size());
    if (n < 3) throw InputError("landmark search needs at least 3 samples");
    const auto top = std::max_element(smoothed.begin(), smoothed.end());
    const int i = static_cast<int>(std::distance(smoothed.begin(), top));
    const double peak = *top;
    const double tol = kFlatTolerance * std::max(1.0, std::abs(peak));
    for (int k = 0; k < n; ++k) {
        const int lag = std::min(std::abs(k - i), n - std::abs(k - i));
        if (lag > 1 && smoothed[k] >= peak - tol) throw EstimationError("landmark undefined");
    }

    const double left = smoothed[(i + n - 1) % n];
    const double right = smoothed[(i + 1) % n];
    if (left >= peak - tol && right >= peak - tol) throw EstimationError("landmark undefined");
    const double curvature = left - 2.0 * peak + right;
    double offset = 0.0;
    if (curvature < 0.0) offset = 0.5 * (left - right) / curvature;
    const double t = (i + offset) * period / n;
    return std::fmod(t + period, period);
}

std::vector<std::optional<double>> landmark_locations(const CurveSet& curves,
                                                      const LandmarkConfig& config) {
    const int n = curves.length();
    const double h = resolve_bandwidth(config, curves.period(), n);
    std::vector<std::optional<double>> out;
    std::vector<double> row(n);
    for (int j = 0; j < curves.curves(); ++j) {
        for (int i = 0; i < n; ++i) row[i] = curves.samples()(j, i);
        try {
            out.emplace_back(max_location(smooth(row, curves.period(), h), curves.period()));
        } catch (const EstimationError&) {
            out.emplace_back(std::nullopt);
        }
    }
    return out;
}

Eigen::VectorXd align_by_max(const CurveSet& curves, const LandmarkConfig& config) {
    const auto locs = landmark_locations(curves, config);
    Eigen::VectorXd theta(curves.curves());
    for (int j = 0; j < curves.curves(); ++j) {
        if (!locs[j]) throw EstimationError("landmark undefined");
        theta[j] = j == 0 ? 0.0 : wrap_half_open(*locs[j] - *locs[0], curves.period());
    }
    return theta;
}

}  // namespace shiftest
