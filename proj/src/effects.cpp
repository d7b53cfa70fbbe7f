#include "rrhte/effects.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>

#include "rrhte/losses.hpp"

namespace rrhte {

std::string to_string(Method method) {
    switch (method) {
        case Method::Full: return "Full";
        case Method::MA: return "MA";
        case Method::MAmod: return "MAmod";
        case Method::MW: return "MW";
        case Method::R3A: return "R3A";
        case Method::R3Amod: return "R3Amod";
        case Method::R3W: return "R3W";
    }
    return "?";
}

std::optional<Method> method_from_string(const std::string& name) {
    std::string lower(name);
    std::transform(lower.begin(), lower.end(), lower.begin(),
                   [](unsigned char c) { return std::tolower(c); });
    if (lower == "full") return Method::Full;
    if (lower == "ma") return Method::MA;
    if (lower == "mamod") return Method::MAmod;
    if (lower == "mw") return Method::MW;
    if (lower == "r3a") return Method::R3A;
    if (lower == "r3amod") return Method::R3Amod;
    if (lower == "r3w") return Method::R3W;
    return std::nullopt;
}

MatrixXd raw_effect(const FactorizedCoefficients& coeffs, const MatrixXd& X) {
    if (coeffs.W.rows() != X.cols() || coeffs.V.cols() != coeffs.W.cols())
        throw DimensionError("raw_effect: coefficient shapes do not match X");
    return X * coeffs.W * coeffs.V.transpose();
}

double bias_term(double u, double pi) {
    if (!(pi > 0.0 && pi < 1.0)) throw PositivityError("bias_term: pi must lie in (0,1)");
    if (!std::isfinite(u)) throw NumericError("bias_term: non-finite score");
    return softplus_neg((1.0 - pi) * u) - softplus_neg(-pi * u);
}

namespace {

void add_bias_in_place(MatrixXd& H, const VectorXd& pi) {
    if (pi.size() != H.rows()) throw DimensionError("corrected_effect: pi length must be n");
    for (Eigen::Index i = 0; i < H.rows(); ++i)
        for (Eigen::Index j = 0; j < H.cols(); ++j) H(i, j) += bias_term(H(i, j), pi(i));
}

}  // namespace

MatrixXd corrected_effect_univariate(const MatrixXd& Gamma, const MatrixXd& X,
                                     const VectorXd& pi) {
    if (Gamma.rows() != X.cols()) throw DimensionError("corrected_effect: Gamma rows must be p");
    MatrixXd H = X * Gamma;
    add_bias_in_place(H, pi);
    return H;
}

MatrixXd corrected_effect(const FactorizedCoefficients& coeffs, const MatrixXd& X,
                          const VectorXd& pi) {
    MatrixXd H = raw_effect(coeffs, X);
    add_bias_in_place(H, pi);
    return H;
}

}  // namespace rrhte
