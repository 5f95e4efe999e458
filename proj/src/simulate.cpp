#include "shiftest/simulate.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <thread>

#include <fmt/format.h>

#include "shiftest/error.hpp"
#include "shiftest/inference.hpp"
#include "shiftest/random.hpp"

namespace shiftest {
namespace {

constexpr std::uint64_t kShiftStream = 0;
constexpr std::uint64_t kNoiseStream = 1;
// Weight-sweep datasets use replicate indices far from any study's.
constexpr std::uint64_t kSweepReplicateBase = 1ULL << 40;

// Runs body(i) for i in [0, count) on a small pool; the first exception is
// rethrown after all workers finish.
template <typename Body>
void parallel_for(int count, int threads, Body&& body) {
    int workers = threads > 0 ? threads : static_cast<int>(std::thread::hardware_concurrency());
    workers = std::clamp(workers, 1, std::max(count, 1));
    std::atomic<int> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    auto work = [&] {
        for (int i = next++; i < count; i = next++) {
            try {
                body(i);
            } catch (...) {
                std::lock_guard lock(failure_mutex);
                if (!failure) failure = std::current_exception();
            }
        }
    };
    if (workers == 1) {
        work();
    } else {
        std::vector<std::jthread> pool;
        for (int w = 0; w < workers; ++w) pool.emplace_back(work);
    }
    if (failure) std::rethrow_exception(failure);
}

double median(std::vector<double> v) {
    if (v.empty()) return 0.0;
    const std::size_t mid = v.size() / 2;
    std::nth_element(v.begin(), v.begin() + static_cast<long>(mid), v.end());
    const double hi = v[mid];
    if (v.size() % 2 == 1) return hi;
    return 0.5 * (hi + *std::max_element(v.begin(), v.begin() + static_cast<long>(mid)));
}

}  // namespace

Pattern::Pattern(Kind kind, std::vector<double> values) : kind_(kind), values_(std::move(values)) {
    if (kind_ != Kind::Samples) return;
    if (values_.size() % 2 == 0 || values_.size() < 3)
        throw InputError("pattern samples need an odd count >= 3");
    const auto d = forward_dft(values_);
    const int L = static_cast<int>(values_.size() - 1) / 2;
    coeffs_.resize(d.size());
    // Samples sit at t_i = -T/2 + i T / m, so c_l = (-1)^l d_l.
    for (int l = -L; l <= L; ++l) coeffs_[l + L] = (l % 2 == 0 ? 1.0 : -1.0) * d[l + L];
}

Pattern Pattern::samples(std::vector<double> values) { return Pattern(Kind::Samples, std::move(values)); }

std::string Pattern::name() const {
    switch (kind_) {
        case Kind::Sinc15:
            return "sinc15";
        case Kind::Cosine:
            return "cosine";
        case Kind::Samples:
            break;
    }
    return "samples";
}

double Pattern::value(double t, double period) const {
    const double u = wrap_angle(2.0 * kPi * t / period);
    switch (kind_) {
        case Kind::Sinc15:
            return u == 0.0 ? 15.0 : 15.0 * std::sin(4.0 * u) / (4.0 * u);
        case Kind::Cosine:
            return std::cos(u);
        case Kind::Samples:
            break;
    }
    const int L = static_cast<int>(coeffs_.size() - 1) / 2;
    double acc = coeffs_[L].real();
    for (int l = 1; l <= L; ++l) acc += 2.0 * (coeffs_[l + L] * std::polar(1.0, l * u)).real();
    return acc;
}

Eigen::VectorXcd Pattern::true_coefficients(int cutoff, double period) const {
    Eigen::VectorXcd out = Eigen::VectorXcd::Zero(2 * cutoff + 1);
    if (kind_ == Kind::Samples) {
        const int L = static_cast<int>(coeffs_.size() - 1) / 2;
        for (int l = -std::min(L, cutoff); l <= std::min(L, cutoff); ++l)
            out[l + cutoff] = coeffs_[l + L];
        return out;
    }

    // Composite Simpson on [-T/2, T/2]; the integrand is periodic, so the two
    // endpoint samples coincide and share one weight.
    int intervals = std::max(8192, 32 * cutoff);
    intervals += intervals % 2;
    const double h = period / intervals;
    std::vector<double> weighted(intervals);
    for (int k = 0; k < intervals; ++k) {
        const double w = k == 0 ? 2.0 : (k % 2 == 1 ? 4.0 : 2.0);
        weighted[k] = w * value(-0.5 * period + k * h, period);
    }
    for (int l = 0; l <= cutoff; ++l) {
        // exp(-2 pi i l t_k / T) with t_k = -T/2 + k h
        const Complex step = std::polar(1.0, -2.0 * kPi * l / intervals);
        Complex rot = std::polar(1.0, kPi * l);
        Complex acc(0.0, 0.0);
        for (int k = 0; k < intervals; ++k) {
            acc += weighted[k] * rot;
            rot *= step;
        }
        const Complex c = acc * (h / (3.0 * period));
        out[cutoff + l] = c;
        out[cutoff - l] = std::conj(c);
    }
    return out;
}

void SimulationSpec::validate() const {
    if (samples < 3 || samples % 2 == 0)
        throw InputError(fmt::format("simulation needs an odd sample count >= 3, got {}", samples));
    if (curves < 2) throw InputError("simulation needs at least 2 curves");
    if (!(sigma >= 0.0) || !std::isfinite(sigma)) throw InputError("sigma must be >= 0");
    if (replicates < 1) throw InputError("replicates must be >= 1");
    if (!(period > 0.0)) throw InputError("period must be positive");
    if (!(level > 0.0 && level < 1.0)) throw InputError("confidence level must lie in (0, 1)");
    if (shifts && (shifts->size() != curves || (*shifts)[0] != 0.0))
        throw InputError("explicit shifts need one entry per curve with the first equal to 0");
    optimizer.validate();
}

SimulatedData generate(const SimulationSpec& spec, std::uint64_t replicate) {
    spec.validate();
    const int J = spec.curves;
    const int n = spec.samples;
    const double T = spec.period;

    Eigen::VectorXd theta(J);
    if (spec.shifts) {
        theta = *spec.shifts;
    } else {
        CounterRng rng(spec.seed, replicate, kShiftStream);
        theta[0] = 0.0;
        for (int j = 1; j < J; ++j)
            theta[j] = rng.uniform(-spec.shift_half_width, spec.shift_half_width) * T / (2.0 * kPi);
    }

    CounterRng noise(spec.seed, replicate, kNoiseStream);
    Eigen::MatrixXd y(J, n);
    for (int j = 0; j < J; ++j)
        for (int i = 0; i < n; ++i) {
            const double t = -0.5 * T + i * T / n;
            y(j, i) = spec.pattern.value(t - theta[j], T);
            if (spec.sigma > 0.0) y(j, i) += spec.sigma * noise.normal();
        }
    Eigen::VectorXd alpha = theta * (2.0 * kPi / T);
    return {CurveSet(std::move(y), T), std::move(theta), std::move(alpha)};
}

Eigen::VectorXd ReplicateResult::error() const {
    Eigen::VectorXd e(alpha_hat.size());
    for (Eigen::Index k = 0; k < e.size(); ++k) e[k] = wrap_angle(alpha_hat[k] - alpha_true[k]);
    return e;
}

Eigen::MatrixXd theoretical_covariance(const SimulationSpec& spec, double* scalar) {
    spec.validate();
    const Eigen::VectorXcd c = spec.pattern.true_coefficients(spec.cutoff(), spec.period);
    const double s = gamma_scalar(c.cwiseAbs2(), spec.resolved_weights());
    if (scalar) *scalar = s;
    return spec.sigma * spec.sigma * gamma_matrix(s, spec.curves);
}

MonteCarloSummary run_study(const SimulationSpec& spec) {
    spec.validate();
    const WeightScheme weights = spec.resolved_weights();
    const int R = spec.replicates;
    const int J = spec.curves;
    const int n = spec.samples;

    std::vector<ReplicateResult> runs(R);
    parallel_for(R, spec.threads, [&](int r) {
        const SimulatedData data = generate(spec, static_cast<std::uint64_t>(r));
        const CriterionContext ctx(transform(data.curves), weights);
        const EstimationResult est = minimize(ctx, spec.optimizer, spec.period);

        ReplicateResult& out = runs[r];
        out.alpha_true = data.alpha.tail(J - 1);
        out.theta_true = data.theta;
        out.alpha_hat = est.alpha_hat.free();
        out.theta_hat = est.theta_hat;
        out.criterion = est.criterion_value;
        out.converged = est.converged;
        out.iterations = est.iterations;

        if (spec.with_inference) {
            try {
                const CovarianceReport rep = infer(ctx, est, spec.period, spec.level);
                out.inference_ok = true;
                out.sigma2_hat = rep.sigma2_hat;
                out.std_errors = rep.std_errors;
                for (int k = 0; k < J - 1; ++k) {
                    const double centre = rep.intervals[k].lower + 0.5 * (rep.intervals[k].upper -
                                                                         rep.intervals[k].lower);
                    const double half = 0.5 * (rep.intervals[k].upper - rep.intervals[k].lower);
                    out.covered.push_back(std::abs(wrap_angle(out.alpha_true[k] - centre)) <= half);
                }
            } catch (const InferenceError&) {
                out.inference_ok = false;
            }
        }
        if (spec.with_landmark) {
            try {
                out.theta_landmark = align_by_max(data.curves, spec.landmark);
            } catch (const EstimationError&) {
                out.theta_landmark.reset();
            }
        }
    });

    MonteCarloSummary s;
    s.replicates = R;
    s.curves = J;
    s.samples = n;
    s.sigma = spec.sigma;

    const int m = J - 1;
    Eigen::MatrixXd errors(R, m);
    std::vector<double> abs_errors;
    double sq = 0.0;
    double lm_sq = 0.0;
    int lm_count = 0;
    Eigen::VectorXd covered = Eigen::VectorXd::Zero(m);
    int inference_ok = 0;
    double sigma2_sum = 0.0;
    for (int r = 0; r < R; ++r) {
        const ReplicateResult& run = runs[r];
        const Eigen::VectorXd e = run.error();
        errors.row(r) = e.transpose();
        sq += e.squaredNorm();
        for (int k = 0; k < m; ++k) abs_errors.push_back(std::abs(e[k]));
        if (!run.converged) ++s.nonconverged;
        if (spec.with_inference) {
            if (run.inference_ok) {
                ++inference_ok;
                sigma2_sum += run.sigma2_hat;
                for (int k = 0; k < m; ++k) covered[k] += run.covered[k] ? 1.0 : 0.0;
            } else {
                ++s.inference_failures;
            }
        }
        if (spec.with_landmark) {
            if (run.theta_landmark) {
                for (int k = 0; k < m; ++k) {
                    const double d = wrap_angle(2.0 * kPi *
                                                ((*run.theta_landmark)[k + 1] - run.theta_true[k + 1]) /
                                                spec.period);
                    lm_sq += d * d;
                }
                ++lm_count;
            } else {
                ++s.landmark_failures;
            }
        }
    }

    s.bias = errors.colwise().mean().transpose();
    const Eigen::MatrixXd centred = (errors.rowwise() - s.bias.transpose()) * std::sqrt(double(n));
    s.empirical_covariance = R > 1 ? Eigen::MatrixXd(centred.transpose() * centred / (R - 1))
                                   : Eigen::MatrixXd::Zero(m, m);
    s.std_dev = (s.empirical_covariance.diagonal() / n).cwiseSqrt();
    s.theoretical_covariance = theoretical_covariance(spec, &s.gamma_scalar_true);
    s.coverage = inference_ok > 0 ? Eigen::VectorXd(covered / inference_ok) : Eigen::VectorXd::Zero(m);
    s.mean_sigma2_hat = inference_ok > 0 ? sigma2_sum / inference_ok : 0.0;
    s.rmse = std::sqrt(sq / (static_cast<double>(R) * m));
    if (lm_count > 0) s.rmse_landmark = std::sqrt(lm_sq / (static_cast<double>(lm_count) * m));
    s.median_abs_error = median(abs_errors);
    s.runs = std::move(runs);
    return s;
}

double grid_minimum(const std::vector<std::pair<double, double>>& profile) {
    if (profile.empty()) throw InputError("empty profile");
    auto best = profile.begin();
    for (auto it = profile.begin(); it != profile.end(); ++it)
        if (it->second < best->second) best = it;
    return best->first;
}

std::vector<CriterionGrid> weight_sweep(const SimulationSpec& base, double theta2,
                                        const std::vector<double>& sigmas,
                                        const std::vector<WeightScheme>& weights, int points) {
    std::vector<CriterionGrid> out;
    for (std::size_t s = 0; s < sigmas.size(); ++s) {
        SimulationSpec spec = base;
        spec.curves = 2;
        spec.sigma = sigmas[s];
        spec.shifts = Eigen::Vector2d(0.0, theta2);
        const SimulatedData data = generate(spec, kSweepReplicateBase + s);
        const SpectralTable table = transform(data.curves);
        for (const WeightScheme& w : weights) {
            const CriterionContext ctx(table, w.with_cutoff(table.cutoff()));
            out.push_back({sigmas[s], w.describe(),
                           profile(ctx, ConstrainedShift::zero(2), 0, points)});
        }
    }
    return out;
}

}  // namespace shiftest
