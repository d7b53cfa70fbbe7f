#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include <Eigen/Core>

#include "rrhte/losses.hpp"
#include "rrhte/trial_data.hpp"

namespace rrhte {

// Normal systems with a symmetric condition estimate above this are treated
// as ill-conditioned.
inline constexpr double kIllConditionedThreshold = 1e12;

/// Condition estimate lambda_max / lambda_min of a symmetric PSD matrix
/// (+inf when singular).
double sym_condition(const MatrixXd& M);

struct SolverOptions {
    int rank = 1;
    double tol = 1e-6;       // stop when the true-loss decrease falls below tol
    int max_iter = 1000;
    std::uint64_t init_seed = 0;
    double ridge = 0.0;      // 0 means: retry automatically on ill-conditioning
    bool quiet = false;      // suppress the ridge-retry warning
    std::optional<FactorizedCoefficients> init;  // overrides the seeded start
};

/// Quadratic majorization of the logistic objective around the current
/// iterate: Phi holds the logistic residual factors in (0,1), Z the working
/// responses, and surrogate_constant the dropped additive constant, so
/// quadratic + constant upper-bounds the true loss and touches it at the
/// expansion point (where it equals surrogate_value).
struct MajorizationState {
    MatrixXd Phi;
    MatrixXd Z;
    double surrogate_constant = 0.0;
    double surrogate_value = 0.0;
    int iteration = 0;
};

MajorizationState majorize_w(const FactorizedCoefficients& coeffs, const TrialData& data);
MajorizationState majorize_a(const FactorizedCoefficients& coeffs, const TrialData& data);

/// Full surrogate (quadratic part + tangency constant) at a trial point.
double surrogate_value(LossKind kind, const MajorizationState& state, const TrialData& data,
                       const FactorizedCoefficients& trial);

/// Orthogonal polar factor of G (m x r, m >= r): the V with orthonormal
/// columns maximizing tr(G'V), with tr(G'V) equal to the sum of G's singular
/// values. Rank-deficient G is completed deterministically, never an error.
MatrixXd update_v(const MatrixXd& G);

/// W = (X'AX + ridge I)^-1 X'TAZV. Throws IllConditionedError when the
/// normal system is singular or has condition estimate above threshold.
MatrixXd update_w_wmethod(const TrialData& data, const MatrixXd& Z, const MatrixXd& V,
                          double ridge = 0.0);

/// W = (X'Q^2X + ridge I)^-1 X'QZV for the q-scaled scheme.
MatrixXd update_w_alearner(const TrialData& data, const MatrixXd& Zdag, const MatrixXd& V,
                           double ridge = 0.0);

struct FitResult {
    FactorizedCoefficients coeffs;
    std::vector<double> objective_trace;  // true loss; entry 0 is the initial value
    bool converged = false;
    int iterations = 0;
};

/// Alternating majorize / V-update / W-update descent on the weighted loss.
FitResult fit_r3w(const TrialData& data, const SolverOptions& options);

/// Same scheme on the predictor-scaled loss.
FitResult fit_r3a(const TrialData& data, const SolverOptions& options);

}  // namespace rrhte
