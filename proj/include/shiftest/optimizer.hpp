#pragma once

#include <vector>

#include <Eigen/Dense>

#include "shiftest/criterion.hpp"

namespace shiftest {

struct OptimizerConfig {
    int max_iterations = 500;
    /// Convergence when the max-norm of the gradient drops to this value.
    double gradient_tolerance = 1e-8;
    /// Extra starting points per free coordinate on a uniform grid of
    /// [-pi, pi); 0 uses the phase-correlation and zero starts only.
    int restarts = 0;
    double contraction = 0.5;
    double sufficient_decrease = 1e-4;
    /// Line-search attempts before a start is abandoned.
    int max_backtracks = 60;

    void validate() const;
};

struct EstimationResult {
    ConstrainedShift alpha_hat = ConstrainedShift::zero(2);
    /// Time-domain shifts T alpha / (2 pi), one per curve, theta_1 = 0.
    Eigen::VectorXd theta_hat;
    double criterion_value = 0.0;
    int iterations = 0;
    bool converged = false;
    double gradient_norm = 0.0;
    /// Index into the candidate list that produced this result.
    int start_index = 0;
    /// Criterion value after each accepted step of the winning run.
    std::vector<double> history;
};

/// Starting points: the cross-correlation lag of each curve against curve 1,
/// followed by the zero vector. Degenerate (flat) correlations yield only the
/// zero vector.
std::vector<ConstrainedShift> initialize(const CriterionContext& ctx);

/// Polak-Ribiere conjugate gradient from one start, coordinates wrapped
/// into [-pi, pi) after every step.
EstimationResult minimize_from(const CriterionContext& ctx, const ConstrainedShift& start,
                               const OptimizerConfig& config, double period);

/// Runs every candidate start and keeps the lowest criterion value (ties go
/// to the lexicographically smallest phase vector). Throws EstimationError
/// when all weights are zero or no start yields a finite value.
EstimationResult minimize(const CriterionContext& ctx, const OptimizerConfig& config = {},
                          double period = 2.0 * kPi);

}  // namespace shiftest
