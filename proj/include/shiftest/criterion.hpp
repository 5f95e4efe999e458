#pragma once

// Weighted Fourier-domain contrast between rephased curves and their mean,
// with analytic first and second derivatives. The first curve's phase is
// pinned to zero; everything below works on the J - 1 free phases.

#include <numbers>
#include <optional>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "shiftest/fourier.hpp"
#include "shiftest/weights.hpp"

namespace shiftest {

constexpr double kPi = std::numbers::pi;

/// Wraps an angle into [-pi, pi).
double wrap_angle(double a);

/// Phases (alpha_2, ..., alpha_J) in [-pi, pi]; alpha_1 = 0 is implied.
class ConstrainedShift {
public:
    explicit ConstrainedShift(Eigen::VectorXd free);

    /// Wraps every coordinate into [-pi, pi) first.
    static ConstrainedShift wrapped(const Eigen::VectorXd& free);
    static ConstrainedShift zero(int curves);

    const Eigen::VectorXd& free() const { return free_; }
    int curves() const { return static_cast<int>(free_.size()) + 1; }
    /// All J phases, leading 0 included.
    Eigen::VectorXd full() const;

private:
    Eigen::VectorXd free_;
};

/// Spectral table plus weights, with the summation order fixed once.
class CriterionContext {
public:
    CriterionContext(SpectralTable table, WeightScheme weights);

    const SpectralTable& table() const { return table_; }
    const WeightScheme& weights() const { return weights_; }
    int curves() const { return table_.curves(); }
    int length() const { return table_.length(); }

    /// Frequencies with non-zero weight, ordered by ascending delta_l^2 (ties:
    /// larger |l| first). All sums run in this order.
    const std::vector<int>& active() const { return active_; }

private:
    SpectralTable table_;
    WeightScheme weights_;
    std::vector<int> active_;
};

/// M_n(alpha) = (1/J) sum_j sum_l delta_l^2 |c~_jl(alpha) - c^_l(alpha)|^2.
double evaluate(const CriterionContext& ctx, const ConstrainedShift& alpha);

/// Same contrast at J unconstrained phases (alpha_1 free too).
double evaluate_full(const CriterionContext& ctx, const Eigen::VectorXd& phases);

/// sum_l delta_l^2 [(1/J) sum_j |c~_jl|^2 - |c^_l|^2], algebraically equal to evaluate().
double evaluate_decomposed(const CriterionContext& ctx, const ConstrainedShift& alpha);

/// Partial derivatives with respect to alpha_2..alpha_J.
Eigen::VectorXd gradient(const CriterionContext& ctx, const ConstrainedShift& alpha);

/// Symmetric (J-1)x(J-1) matrix of second derivatives.
Eigen::MatrixXd hessian(const CriterionContext& ctx, const ConstrainedShift& alpha);

struct ValueAndGradient {
    double value;
    Eigen::VectorXd gradient;
};

/// One pass computing both; used by the optimizer.
ValueAndGradient value_and_gradient(const CriterionContext& ctx, const ConstrainedShift& alpha);

/// Criterion along one free coordinate, the others held at `base`. Points are
/// equispaced on [-pi, pi], endpoints included.
std::vector<std::pair<double, double>> profile(const CriterionContext& ctx,
                                               const ConstrainedShift& base, int coordinate,
                                               int points);

struct IdentifiabilityCheck {
    bool satisfied = false;
    double threshold = 0.0;
    /// Positive frequencies whose weighted magnitude clears the threshold.
    std::vector<int> active;
    /// A coprime pair from `active` when one exists.
    std::optional<std::pair<int, int>> witness;
};

/// Plausibility check of the two-coprime-frequencies condition: frequency l
/// counts when delta_l != 0 and (1/J) sum_j |d_jl| > 3 sigma / sqrt(n).
IdentifiabilityCheck check_identifiability(const CriterionContext& ctx, double sigma2_hat);

}  // namespace shiftest
