#pragma once

#include <Eigen/Core>

#include "rrhte/trial_data.hpp"

namespace rrhte {

enum class LossKind { WMethod, ALearner };

/// log(1 + exp(-x)) without overflow for any finite x.
inline double softplus_neg(double x) {
    double ax = x < 0 ? -x : x;
    return std::log1p(std::exp(-ax)) + (x < 0 ? -x : 0.0);
}

/// Linear predictors Theta = diag(row_scale) * X * W * V' (n x m).
MatrixXd linear_predictors(const MatrixXd& X, const FactorizedCoefficients& coeffs,
                           const VectorXd& row_scale);

/// sum_i weights_i sum_j Y_ij log(1 + exp(-Theta_ij)). Terms with Y_ij = 0
/// contribute exactly zero. Pass all-ones weights for the unweighted loss.
double multiple_logistic_loss(const MatrixXd& Y, const MatrixXd& Theta, const VectorXd& weights);

/// Inverse-probability weighted objective: t-signed predictors, weights a_i.
double loss_w(const FactorizedCoefficients& coeffs, const TrialData& data);

/// Predictor-scaled objective: q-scaled predictors, unit weights.
double loss_a(const FactorizedCoefficients& coeffs, const TrialData& data);

struct LossGradient {
    MatrixXd dW;  // p x r
    MatrixXd dV;  // m x r, treating V as unconstrained
};

LossGradient loss_gradient(LossKind kind, const FactorizedCoefficients& coeffs,
                           const TrialData& data);

}  // namespace rrhte
