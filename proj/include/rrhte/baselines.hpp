#pragma once

#include <vector>

#include <Eigen/Core>

#include "rrhte/solver.hpp"
#include "rrhte/trial_data.hpp"

namespace rrhte {

/// Standard logistic regression of each outcome on [1, X, tX].
struct FullModelFit {
    VectorXd alpha;  // m intercepts
    MatrixXd B;      // p x m main-effect coefficients
    MatrixXd C;      // p x m interaction coefficients
    std::vector<int> irls_iterations;
};

/// Fits each outcome by IRLS (max 200 iterations, tol 1e-8). Separation or
/// non-convergence raises ConvergenceError naming the outcome index.
FullModelFit fit_full(const TrialData& data);

/// Model-implied log ratio of outcome means at t = +1 vs t = -1:
/// H_ij = log sigma(alpha_j + x'b_j + x'c_j) - log sigma(alpha_j + x'b_j - x'c_j).
MatrixXd full_effect(const FullModelFit& fit, const MatrixXd& X);

/// Per-outcome coefficient fits; column j of Gamma solves outcome j alone.
struct ColumnwiseFit {
    MatrixXd Gamma;  // p x m
    std::vector<int> iterations;
    std::vector<bool> converged;
};

/// Per-outcome predictor-scaled logistic fit via the quadratic MM scheme.
ColumnwiseFit fit_ma(const TrialData& data, const SolverOptions& options);

/// Per-outcome inverse-probability weighted fit, t-signed predictors.
ColumnwiseFit fit_mw(const TrialData& data, const SolverOptions& options);

}  // namespace rrhte
