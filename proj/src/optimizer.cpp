#include "shiftest/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>

#include "shiftest/error.hpp"

namespace shiftest {
namespace {

// Largest per-coordinate move in one line search, so a single step cannot
// leap across several basins of the periodic criterion.
constexpr double kMaxMove = kPi / 4.0;

// Relative size below which two criterion values are indistinguishable.
constexpr double kRoundoff = 1e-13;
constexpr int kPolishSteps = 2;

double max_abs(const Eigen::VectorXd& v) { return v.size() ? v.cwiseAbs().maxCoeff() : 0.0; }

bool lexicographically_less(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
    return std::lexicographical_compare(a.data(), a.data() + a.size(), b.data(),
                                        b.data() + b.size());
}

Eigen::VectorXd to_time(const ConstrainedShift& alpha, double period) {
    return alpha.full() * (period / (2.0 * kPi));
}

}  // namespace

void OptimizerConfig::validate() const {
    if (max_iterations < 1) throw InputError("max_iterations must be positive");
    if (!(gradient_tolerance > 0.0)) throw InputError("gradient tolerance must be positive");
    if (!(contraction > 0.0 && contraction < 1.0))
        throw InputError("line-search contraction must lie in (0, 1)");
    if (!(sufficient_decrease > 0.0 && sufficient_decrease < 1.0))
        throw InputError("sufficient-decrease constant must lie in (0, 1)");
    if (restarts < 0) throw InputError("restarts must be non-negative");
    if (max_backtracks < 1) throw InputError("max_backtracks must be positive");
}

std::vector<ConstrainedShift> initialize(const CriterionContext& ctx) {
    const int J = ctx.curves();
    const int n = ctx.length();
    const int L = ctx.table().cutoff();
    std::vector<ConstrainedShift> out;

    Eigen::VectorXd lags = Eigen::VectorXd::Zero(J - 1);
    bool informative = false;
    std::vector<Complex> cross(n);
    for (int j = 1; j < J; ++j) {
        double scale = 0.0;
        for (int l = -L; l <= L; ++l) {
            cross[l + L] = std::conj(ctx.table().at(0, l)) * ctx.table().at(j, l);
            if (l != 0) scale += std::abs(cross[l + L]);
        }
        // r(k) = sum_l conj(d_1l) d_jl exp(2 pi i l k / n) peaks at 2 pi k / n = alpha_j.
        const auto r = inverse_dft(cross);
        const auto [lo, hi] = std::minmax_element(r.begin(), r.end());
        if (!(scale > 0.0) || *hi - *lo <= 1e-12 * scale) continue;
        const auto k = static_cast<int>(std::distance(r.begin(), hi));
        lags[j - 1] = wrap_angle(2.0 * kPi * k / n);
        informative = true;
    }
    if (informative && max_abs(lags) > 0.0) out.push_back(ConstrainedShift(lags));
    out.push_back(ConstrainedShift::zero(J));
    return out;
}

EstimationResult minimize_from(const CriterionContext& ctx, const ConstrainedShift& start,
                               const OptimizerConfig& config, double period) {
    config.validate();
    EstimationResult res;
    ConstrainedShift x = start;
    auto [f, g] = value_and_gradient(ctx, x);
    res.history.push_back(f);
    Eigen::VectorXd d = -g;
    double step = 1.0;
    double prev_slope = 0.0;

    int it = 0;
    for (; it < config.max_iterations; ++it) {
        if (max_abs(g) <= config.gradient_tolerance) break;
        double slope = g.dot(d);
        if (!(slope < 0.0)) {
            d = -g;
            slope = -g.squaredNorm();
        }
        // Minimizer of the local quadratic model along d; where the curvature
        // is not positive, reuse the previous step scaled by the change in slope.
        const double curvature = d.dot(hessian(ctx, x) * d);
        double t = curvature > 0.0 ? -slope / curvature : (it == 0 ? 1.0 : step * prev_slope / slope);
        if (!(t > 0.0) || !std::isfinite(t)) t = 1.0;
        t = std::min(t, kMaxMove / max_abs(d));

        bool accepted = false;
        ConstrainedShift trial = x;
        ValueAndGradient at_trial{};
        for (int b = 0; b < config.max_backtracks; ++b, t *= config.contraction) {
            trial = ConstrainedShift::wrapped(x.free() + t * d);
            at_trial = value_and_gradient(ctx, trial);
            if (!std::isfinite(at_trial.value)) continue;
            if (at_trial.value <= f + config.sufficient_decrease * t * slope) {
                accepted = true;
                break;
            }
            // Within rounding of f, value comparisons stop being informative;
            // accept when the directional derivative shrinks instead.
            const double noise = kRoundoff * (std::abs(f) + 1.0);
            if (std::abs(at_trial.value - f) <= noise &&
                std::abs(at_trial.gradient.dot(d)) < std::abs(slope)) {
                accepted = true;
                break;
            }
        }
        if (!accepted) break;

        const Eigen::VectorXd g_new = at_trial.gradient;
        const double beta = std::max(0.0, g_new.dot(g_new - g) / g.squaredNorm());
        x = trial;
        f = at_trial.value;
        d = -g_new + beta * d;
        g = g_new;
        step = t;
        prev_slope = slope;
        res.history.push_back(f);
    }

    // Newton polish near a minimum; skipped when the iteration budget ran out.
    for (int k = 0; it < config.max_iterations && k < kPolishSteps && max_abs(g) > 0.0; ++k) {
        const Eigen::LLT<Eigen::MatrixXd> llt(hessian(ctx, x));
        if (llt.info() != Eigen::Success) break;
        const Eigen::VectorXd move = llt.solve(g);
        if (!move.allFinite() || max_abs(move) > kMaxMove) break;
        const ConstrainedShift trial = ConstrainedShift::wrapped(x.free() - move);
        const ValueAndGradient at_trial = value_and_gradient(ctx, trial);
        if (!(at_trial.value <= f) || !(max_abs(at_trial.gradient) < max_abs(g))) break;
        x = trial;
        f = at_trial.value;
        g = at_trial.gradient;
        res.history.push_back(f);
    }

    res.alpha_hat = x;
    res.theta_hat = to_time(x, period);
    res.criterion_value = f;
    res.iterations = it;
    res.gradient_norm = max_abs(g);
    res.converged = res.gradient_norm <= config.gradient_tolerance;
    return res;
}

EstimationResult minimize(const CriterionContext& ctx, const OptimizerConfig& config,
                          double period) {
    config.validate();
    if (ctx.weights().all_zero()) throw EstimationError("criterion identically zero");

    std::vector<ConstrainedShift> starts = initialize(ctx);
    const int J = ctx.curves();
    for (int r = 0; r < config.restarts; ++r) {
        const double a = -kPi + 2.0 * kPi * (r + 0.5) / config.restarts;
        starts.push_back(ConstrainedShift(Eigen::VectorXd::Constant(J - 1, a)));
    }

    std::optional<EstimationResult> best;
    for (std::size_t s = 0; s < starts.size(); ++s) {
        EstimationResult run = minimize_from(ctx, starts[s], config, period);
        run.start_index = static_cast<int>(s);
        if (!std::isfinite(run.criterion_value)) continue;
        if (!best) {
            best = std::move(run);
            continue;
        }
        const double tie = 1e-12 * std::max(1.0, std::abs(best->criterion_value));
        const double diff = run.criterion_value - best->criterion_value;
        if (diff < -tie ||
            (std::abs(diff) <= tie &&
             lexicographically_less(run.alpha_hat.free(), best->alpha_hat.free())))
            best = std::move(run);
    }
    if (!best) throw EstimationError("no starting point produced a finite criterion value");
    return *best;
}

}  // namespace shiftest
