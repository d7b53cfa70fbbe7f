#pragma once

#include <Eigen/Core>

#include "rrhte/errors.hpp"

namespace rrhte {

using Eigen::MatrixXd;
using Eigen::VectorXd;

// Predictions of the logistic propensity model are clamped to
// [kPropensityClamp, 1 - kPropensityClamp] so the inverse weights a_i stay
// below 1e6 and exp() never overflows downstream.
inline constexpr double kPropensityClamp = 1e-6;

/// A two-arm trial: centered covariates X (n x p), binary outcomes Y (n x m),
/// treatment indicators t in {-1,+1} and propensity scores pi in (0,1).
/// Immutable after construction; the constructor validates all invariants.
struct TrialData {
    MatrixXd X;
    MatrixXd Y;
    VectorXd t;
    VectorXd pi;

    TrialData(MatrixXd X_in, MatrixXd Y_in, VectorXd t_in, VectorXd pi_in);

    Eigen::Index n() const { return X.rows(); }
    Eigen::Index p() const { return X.cols(); }
    Eigen::Index m() const { return Y.cols(); }
};

/// Rank-r factorization Gamma = W V' of the p x m treatment-effect
/// coefficient matrix. V has orthonormal columns on converged fits.
struct FactorizedCoefficients {
    MatrixXd W;  // p x r
    MatrixXd V;  // m x r

    Eigen::Index rank() const { return W.cols(); }
    MatrixXd coefficient_matrix() const { return W * V.transpose(); }
};

/// True iff V'V = I_r entrywise within tol.
bool has_orthonormal_columns(const MatrixXd& V, double tol = 1e-8);

/// Removes the column means of X_raw. Idempotent: applying it to its own
/// output returns a bitwise-identical matrix.
MatrixXd center_columns(const MatrixXd& X_raw);

/// Maps a 0/1 coded treatment vector to the internal -1/+1 coding.
VectorXd treatment_from_binary(const VectorXd& t01);

/// Inverse assignment-probability weights a_i = (t_i pi_i + (1 - t_i)/2)^-1:
/// 1/pi_i on the test arm, 1/(1 - pi_i) on the control arm.
VectorXd w_weights(const VectorXd& t, const VectorXd& pi);

/// Predictor scalings q_i = (t_i + 1)/2 - pi_i: 1 - pi_i on the test arm,
/// -pi_i on the control arm. Never zero under positivity.
VectorXd a_scalings(const VectorXd& t, const VectorXd& pi);

struct PropensityModel {
    enum class Mode { Constant, EmpiricalRct, Logistic };

    Mode mode = Mode::Constant;
    double rate = 0.5;  // Constant / EmpiricalRct
    VectorXd beta;      // Logistic: intercept first, then slope per covariate

    /// Per-subject assignment probabilities; logistic predictions are
    /// clamped to [kPropensityClamp, 1 - kPropensityClamp].
    VectorXd predict(const MatrixXd& X) const;
};

/// What to fit: Constant(c) passes c through, EmpiricalRct takes the sample
/// share of t = +1, Logistic fits I(t = +1) on [1, X] by IRLS.
struct PropensitySpec {
    PropensityModel::Mode mode = PropensityModel::Mode::Constant;
    double constant = 0.5;

    static PropensitySpec Constant(double c) { return {PropensityModel::Mode::Constant, c}; }
    static PropensitySpec EmpiricalRct() { return {PropensityModel::Mode::EmpiricalRct, 0.0}; }
    static PropensitySpec Logistic() { return {PropensityModel::Mode::Logistic, 0.0}; }
};

PropensityModel estimate_propensity(const MatrixXd& X, const VectorXd& t, const PropensitySpec& spec);

}  // namespace rrhte
