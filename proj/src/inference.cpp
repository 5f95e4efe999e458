#include "shiftest/inference.hpp"

#include <array>
#include <cmath>

#include <fmt/format.h>

#include "shiftest/error.hpp"

namespace shiftest {
namespace {

constexpr double kEnergyFloor = 1e-24;

}  // namespace


double normal_quantile(double p) {
    if (!(p > 0.0 && p < 1.0)) throw InputError("normal_quantile: p must lie in (0, 1)");

    // Acklam's rational approximation followed by one Halley step.
    static constexpr std::array<double, 6> a{-3.969683028665376e+01, 2.209460984245205e+02,
                                             -2.759285104469687e+02, 1.383577518672690e+02,
                                             -3.066479806614716e+01, 2.506628277459239e+00};
    static constexpr std::array<double, 5> b{-5.447609879822406e+01, 1.615858368580409e+02,
                                             -1.556989798598866e+02, 6.680131188771972e+01,
                                             -1.328068155288572e+01};
    static constexpr std::array<double, 6> c{-7.784894002430293e-03, -3.223964580411365e-01,
                                             -2.400758277161838e+00, -2.549732539343734e+00,
                                             4.374664141464968e+00, 2.938163982698783e+00};
    static constexpr std::array<double, 4> d{7.784695709041462e-03, 3.224671290700398e-01,
                                             2.445134137142996e+00, 3.754408661907416e+00};
    constexpr double p_low = 0.02425;

    double x;
    if (p < p_low) {
        const double q = std::sqrt(-2.0 * std::log(p));
        x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
            ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    } else if (p <= 1.0 - p_low) {
        const double q = p - 0.5;
        const double r = q * q;
        x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
            (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
    } else {
        const double q = std::sqrt(-2.0 * std::log1p(-p));
        x = -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
            ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    }

    const double e = p < 0.5 ? 0.5 * std::erfc(-x / std::numbers::sqrt2) - p
                             : (1.0 - p) - 0.5 * std::erfc(x / std::numbers::sqrt2);
    const double u = e * std::sqrt(2.0 * kPi) * std::exp(0.5 * x * x);
    return x - u / (1.0 + 0.5 * x * u);
}

double estimate_noise_variance(const SpectralTable& table, const ConstrainedShift& alpha_hat) {
    const int J = table.curves();
    if (J < 2) throw InferenceError("noise variance is unidentifiable from a single curve");
    if (alpha_hat.curves() != J) throw InputError("shift vector does not match table");
    const SpectralTable rephased = rephase(table, alpha_hat.full());
    const Eigen::RowVectorXcd mean = rephased.coeffs().colwise().mean();
    double total = 0.0;
    for (int j = 0; j < J; ++j) total += (rephased.coeffs().row(j) - mean).squaredNorm();
    return total / (J - 1);
}

double gamma_scalar(const Eigen::VectorXd& magnitudes2, const WeightScheme& weights) {
    const int L = static_cast<int>(magnitudes2.size() - 1) / 2;
    if (weights.cutoff() != L) throw InputError("weights do not match coefficient range");
    double num = 0.0;
    double den = 0.0;
    for (int l = -L; l <= L; ++l) {
        const double w2 = weights.delta_squared(l);
        const double e = static_cast<double>(l) * l * magnitudes2[l + L];
        num += w2 * w2 * e;
        den += w2 * e;
    }
    if (!(den > 0.0)) throw InferenceError("signal energy indistinguishable from noise");
    return num / (den * den);
}

Eigen::MatrixXd gamma_matrix(double scalar, int curves) {
    const int m = curves - 1;
    return scalar * (Eigen::MatrixXd::Identity(m, m) + Eigen::MatrixXd::Ones(m, m));
}

Eigen::MatrixXd estimate_gamma(const SpectralTable& table, const WeightScheme& weights,
                               const ConstrainedShift& alpha_hat, double sigma2_hat) {
    const int J = table.curves();
    const int n = table.length();
    const Eigen::VectorXcd mean = mean_rephased(table, alpha_hat.full());
    const double bias = sigma2_hat / (static_cast<double>(n) * J);
    // Energy at rounding level relative to the largest coefficient counts as zero.
    const double floor = kEnergyFloor * mean.cwiseAbs2().maxCoeff();
    Eigen::VectorXd debiased(mean.size());
    for (Eigen::Index k = 0; k < mean.size(); ++k) {
        const double e = std::norm(mean[k]) - bias;
        debiased[k] = e > floor ? e : 0.0;
    }
    return gamma_matrix(gamma_scalar(debiased, weights), J);
}

CovarianceReport confidence_intervals(const EstimationResult& result,
                                      const Eigen::MatrixXd& gamma_hat, double sigma2_hat, int n,
                                      double period, double level) {
    if (!(level > 0.0 && level < 1.0))
        throw InferenceError(fmt::format("confidence level {} outside (0, 1)", level));
    const Eigen::VectorXd& alpha = result.alpha_hat.free();
    if (gamma_hat.rows() != alpha.size() || gamma_hat.cols() != alpha.size())
        throw InputError("covariance size does not match the shift vector");
    if (!(sigma2_hat >= 0.0)) throw InferenceError("noise variance must be non-negative");

    CovarianceReport out;
    out.gamma_hat = gamma_hat;
    out.sigma2_hat = sigma2_hat;
    out.level = level;
    out.std_errors.resize(alpha.size());
    const double z = normal_quantile(0.5 * (1.0 + level));
    const double to_time = period / (2.0 * kPi);
    for (Eigen::Index k = 0; k < alpha.size(); ++k) {
        const double se = std::sqrt(sigma2_hat * gamma_hat(k, k) / n);
        out.std_errors[k] = se;
        out.intervals.push_back({alpha[k] - z * se, alpha[k] + z * se});
        out.time_intervals.push_back({(alpha[k] - z * se) * to_time, (alpha[k] + z * se) * to_time});
    }
    return out;
}

CovarianceReport infer(const CriterionContext& ctx, const EstimationResult& result,
                       double period, double level) {
    const double sigma2 = estimate_noise_variance(ctx.table(), result.alpha_hat);
    const Eigen::MatrixXd gamma =
        estimate_gamma(ctx.table(), ctx.weights(), result.alpha_hat, sigma2);
    return confidence_intervals(result, gamma, sigma2, ctx.length(), period, level);
}

}  // namespace shiftest
