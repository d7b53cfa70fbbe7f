#pragma once

#include <optional>
#include <string>

#include <Eigen/Core>

#include "rrhte/trial_data.hpp"

namespace rrhte {

enum class Method { Full, MA, MAmod, MW, R3A, R3Amod, R3W };

std::string to_string(Method method);
std::optional<Method> method_from_string(const std::string& name);

/// Per-subject, per-outcome log-mean-ratio effects with provenance.
struct EffectMatrix {
    Method method;
    MatrixXd H;  // n x m
};

/// H = X W V'.
MatrixXd raw_effect(const FactorizedCoefficients& coeffs, const MatrixXd& X);

/// Propensity-dependent additive correction to a raw linear score u:
/// log(1 + exp(-(1-pi)u)) - log(1 + exp(pi u)). Vanishes at u = 0, has sign
/// opposite to u, and equals -u/2 when pi = 1/2.
double bias_term(double u, double pi);

/// Entry-wise u + bias_term(u, pi_row) applied to the raw effects X W V'.
MatrixXd corrected_effect(const FactorizedCoefficients& coeffs, const MatrixXd& X,
                          const VectorXd& pi);

/// Same correction applied to unfactorized per-outcome scores X Gamma.
MatrixXd corrected_effect_univariate(const MatrixXd& Gamma, const MatrixXd& X, const VectorXd& pi);

}  // namespace rrhte
