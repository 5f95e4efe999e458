#include "shiftest/criterion.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <numeric>

#include <fmt/format.h>

#include "shiftest/error.hpp"

namespace shiftest {
namespace {

void require_dims(const CriterionContext& ctx, const ConstrainedShift& alpha) {
    if (alpha.curves() != ctx.curves())
        throw InputError(fmt::format("shift vector has {} free phases, context has {} curves",
                                     alpha.free().size(), ctx.curves()));
}

// Rephased coefficients of every curve at one frequency, plus their mean.
struct Column {
    std::vector<Complex> rephased;
    Complex mean;
};

void fill_column(const CriterionContext& ctx, const Eigen::VectorXd& phases, int l,
                 Column& col) {
    const int J = ctx.curves();
    col.rephased.resize(J);
    Complex sum(0.0, 0.0);
    for (int j = 0; j < J; ++j) {
        col.rephased[j] = std::polar(1.0, l * phases[j]) * ctx.table().at(j, l);
        sum += col.rephased[j];
    }
    col.mean = sum / static_cast<double>(J);
}

double evaluate_phases(const CriterionContext& ctx, const Eigen::VectorXd& phases) {
    const int J = ctx.curves();
    Column col;
    double total = 0.0;
    for (int l : ctx.active()) {
        fill_column(ctx, phases, l, col);
        double spread = 0.0;
        for (int j = 0; j < J; ++j) spread += std::norm(col.rephased[j] - col.mean);
        total += ctx.weights().delta_squared(l) * spread;
    }
    return total / J;
}

}  // namespace

double wrap_angle(double a) {
    double w = std::fmod(a + kPi, 2.0 * kPi);
    if (w < 0.0) w += 2.0 * kPi;
    return w - kPi;
}

ConstrainedShift::ConstrainedShift(Eigen::VectorXd free) : free_(std::move(free)) {
    for (Eigen::Index k = 0; k < free_.size(); ++k)
        if (!(std::abs(free_[k]) <= kPi))
            throw InputError(fmt::format("phase {} = {} outside [-pi, pi]", k + 2, free_[k]));
}

ConstrainedShift ConstrainedShift::wrapped(const Eigen::VectorXd& free) {
    Eigen::VectorXd w = free;
    for (Eigen::Index k = 0; k < w.size(); ++k) w[k] = wrap_angle(w[k]);
    return ConstrainedShift(std::move(w));
}

ConstrainedShift ConstrainedShift::zero(int curves) {
    return ConstrainedShift(Eigen::VectorXd::Zero(curves - 1));
}

Eigen::VectorXd ConstrainedShift::full() const {
    Eigen::VectorXd out(free_.size() + 1);
    out[0] = 0.0;
    out.tail(free_.size()) = free_;
    return out;
}

CriterionContext::CriterionContext(SpectralTable table, WeightScheme weights)
    : table_(std::move(table)), weights_(std::move(weights)) {
    if (weights_.cutoff() != table_.cutoff())
        throw InputError(fmt::format("weights cover |l| <= {} but the table has |l| <= {}",
                                     weights_.cutoff(), table_.cutoff()));
    if (table_.curves() < 2) throw InputError("criterion needs at least 2 curves");
    const int L = table_.cutoff();
    for (int l = -L; l <= L; ++l)
        if (weights_.delta(l) != 0.0) active_.push_back(l);
    std::stable_sort(active_.begin(), active_.end(), [this](int a, int b) {
        const double wa = weights_.delta_squared(a);
        const double wb = weights_.delta_squared(b);
        if (wa != wb) return wa < wb;
        return std::abs(a) > std::abs(b);
    });
}

double evaluate(const CriterionContext& ctx, const ConstrainedShift& alpha) {
    require_dims(ctx, alpha);
    return evaluate_phases(ctx, alpha.full());
}

double evaluate_full(const CriterionContext& ctx, const Eigen::VectorXd& phases) {
    if (phases.size() != ctx.curves())
        throw InputError("evaluate_full: one phase per curve expected");
    return evaluate_phases(ctx, phases);
}

double evaluate_decomposed(const CriterionContext& ctx, const ConstrainedShift& alpha) {
    require_dims(ctx, alpha);
    const int J = ctx.curves();
    const Eigen::VectorXd phases = alpha.full();
    Column col;
    double total = 0.0;
    for (int l : ctx.active()) {
        fill_column(ctx, phases, l, col);
        double energy = 0.0;
        for (int j = 0; j < J; ++j) energy += std::norm(col.rephased[j]);
        total += ctx.weights().delta_squared(l) * (energy / J - std::norm(col.mean));
    }
    return total;
}

ValueAndGradient value_and_gradient(const CriterionContext& ctx, const ConstrainedShift& alpha) {
    require_dims(ctx, alpha);
    const int J = ctx.curves();
    const Eigen::VectorXd phases = alpha.full();
    Column col;
    double value = 0.0;
    Eigen::VectorXd grad = Eigen::VectorXd::Zero(J - 1);
    for (int l : ctx.active()) {
        fill_column(ctx, phases, l, col);
        const double w = ctx.weights().delta_squared(l);
        double spread = 0.0;
        for (int j = 0; j < J; ++j) spread += std::norm(col.rephased[j] - col.mean);
        value += w * spread;
        const Complex mean_conj = std::conj(col.mean);
        for (int k = 1; k < J; ++k) grad[k - 1] += w * l * (col.rephased[k] * mean_conj).imag();
    }
    return {value / J, grad * (2.0 / J)};
}

Eigen::VectorXd gradient(const CriterionContext& ctx, const ConstrainedShift& alpha) {
    return value_and_gradient(ctx, alpha).gradient;
}

Eigen::MatrixXd hessian(const CriterionContext& ctx, const ConstrainedShift& alpha) {
    require_dims(ctx, alpha);
    const int J = ctx.curves();
    const Eigen::VectorXd phases = alpha.full();
    Column col;
    Eigen::MatrixXd h = Eigen::MatrixXd::Zero(J - 1, J - 1);
    for (int l : ctx.active()) {
        fill_column(ctx, phases, l, col);
        const double w = ctx.weights().delta_squared(l) * l * l;
        const Complex total = col.mean * static_cast<double>(J);
        for (int k = 1; k < J; ++k) {
            const Complex others = total - col.rephased[k];
            h(k - 1, k - 1) += w * (col.rephased[k] * std::conj(others)).real();
            for (int m = k + 1; m < J; ++m)
                h(k - 1, m - 1) -= w * (col.rephased[k] * std::conj(col.rephased[m])).real();
        }
    }
    h *= 2.0 / (static_cast<double>(J) * J);
    h.triangularView<Eigen::StrictlyLower>() = h.transpose().triangularView<Eigen::StrictlyLower>();
    return h;
}

std::vector<std::pair<double, double>> profile(const CriterionContext& ctx,
                                               const ConstrainedShift& base, int coordinate,
                                               int points) {
    require_dims(ctx, base);
    if (coordinate < 0 || coordinate >= ctx.curves() - 1)
        throw InputError("profile: coordinate out of range");
    if (points < 2) throw InputError("profile: need at least 2 points");
    std::vector<std::pair<double, double>> out;
    out.reserve(points);
    Eigen::VectorXd phases = base.full();
    for (int p = 0; p < points; ++p) {
        const double a = -kPi + 2.0 * kPi * p / (points - 1);
        phases[coordinate + 1] = a;
        out.emplace_back(a, evaluate_phases(ctx, phases));
    }
    return out;
}

IdentifiabilityCheck check_identifiability(const CriterionContext& ctx, double sigma2_hat) {
    IdentifiabilityCheck out;
    const int J = ctx.curves();
    const int L = ctx.table().cutoff();
    out.threshold = 3.0 * std::sqrt(std::max(sigma2_hat, 0.0) / ctx.length());
    for (int l = 1; l <= L; ++l) {
        if (ctx.weights().delta(l) == 0.0) continue;
        double magnitude = 0.0;
        for (int j = 0; j < J; ++j) magnitude += std::abs(ctx.table().at(j, l));
        if (magnitude / J > out.threshold) out.active.push_back(l);
    }
    // l and -l are both in the set, so {1} alone already holds a coprime pair.
    for (std::size_t a = 0; a < out.active.size() && !out.witness; ++a)
        for (std::size_t b = a; b < out.active.size(); ++b)
            if (std::gcd(out.active[a], out.active[b]) == 1) {
                out.witness = std::make_pair(out.active[a], out.active[b]);
                break;
            }
    out.satisfied = out.witness.has_value();
    return out;
}

}  // namespace shiftest
