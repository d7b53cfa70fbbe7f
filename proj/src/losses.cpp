#include "rrhte/losses.hpp"

#include <cmath>

namespace rrhte {

namespace {

// phi(theta) = sigma(-theta) = 1/(1 + exp(theta)), safe for any finite theta.
inline double logistic_residual(double theta) {
    if (theta <= 0.0) {
        double e = std::exp(theta);
        return 1.0 / (1.0 + e);
    }
    double e = std::exp(-theta);
    return e / (1.0 + e);
}

}  // namespace

MatrixXd linear_predictors(const MatrixXd& X, const FactorizedCoefficients& coeffs,
                           const VectorXd& row_scale) {
    if (coeffs.W.rows() != X.cols() || coeffs.V.cols() != coeffs.W.cols())
        throw DimensionError("linear_predictors: coefficient shapes do not match X");
    if (row_scale.size() != X.rows())
        throw DimensionError("linear_predictors: row_scale length does not match X");
    return row_scale.asDiagonal() * (X * coeffs.W * coeffs.V.transpose());
}

double multiple_logistic_loss(const MatrixXd& Y, const MatrixXd& Theta, const VectorXd& weights) {
    if (Y.rows() != Theta.rows() || Y.cols() != Theta.cols())
        throw DimensionError("multiple_logistic_loss: Y and Theta shapes differ");
    if (weights.size() != Y.rows())
        throw DimensionError("multiple_logistic_loss: weights length does not match Y");
    if ((weights.array() <= 0.0).any())
        throw ValidationError("multiple_logistic_loss: weights must be positive");
    if (!Theta.allFinite()) throw NumericError("multiple_logistic_loss: non-finite predictor");
    Eigen::ArrayXXd terms =
        Y.array() * Theta.array().unaryExpr([](double th) { return softplus_neg(th); });
    return (terms.colwise() * weights.array()).sum();
}

double loss_w(const FactorizedCoefficients& coeffs, const TrialData& data) {
    MatrixXd theta = linear_predictors(data.X, coeffs, data.t);
    return multiple_logistic_loss(data.Y, theta, w_weights(data.t, data.pi));
}

double loss_a(const FactorizedCoefficients& coeffs, const TrialData& data) {
    MatrixXd theta = linear_predictors(data.X, coeffs, a_scalings(data.t, data.pi));
    return multiple_logistic_loss(data.Y, theta, VectorXd::Ones(data.n()));
}

LossGradient loss_gradient(LossKind kind, const FactorizedCoefficients& coeffs,
                           const TrialData& data) {
    VectorXd scale = kind == LossKind::WMethod ? data.t : a_scalings(data.t, data.pi);
    VectorXd weights =
        kind == LossKind::WMethod ? w_weights(data.t, data.pi) : VectorXd::Ones(data.n());
    MatrixXd theta = linear_predictors(data.X, coeffs, scale);
    MatrixXd phi = theta.unaryExpr([](double th) { return logistic_residual(th); });
    // dL/dTheta_ij = -w_i y_ij phi_ij
    MatrixXd dTheta = -((data.Y.array() * phi.array()).colwise() * weights.array()).matrix();
    MatrixXd scaled_x = scale.asDiagonal() * data.X;  // n x p
    LossGradient grad;
    grad.dW = scaled_x.transpose() * dTheta * coeffs.V;
    grad.dV = dTheta.transpose() * scaled_x * coeffs.W;
    return grad;
}

}  // namespace rrhte
