#include "rrhte/trial_data.hpp"

#include <cmath>
#include <string>

#include "rrhte/logistic_irls.hpp"

namespace rrhte {

namespace {

void check_treatment_coding(const VectorXd& t) {
    for (Eigen::Index i = 0; i < t.size(); ++i)
        if (t(i) != 1.0 && t(i) != -1.0)
            throw ValidationError("treatment vector must be coded -1/+1, entry " +
                                  std::to_string(i) + " is " + std::to_string(t(i)));
}

void check_positivity(const VectorXd& pi) {
    for (Eigen::Index i = 0; i < pi.size(); ++i)
        if (!(pi(i) > 0.0 && pi(i) < 1.0))
            throw PositivityError("propensity score must lie strictly in (0,1), entry " +
                                  std::to_string(i) + " is " + std::to_string(pi(i)));
}

double stable_sigmoid(double x) {
    if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
    double e = std::exp(x);
    return e / (1.0 + e);
}

}  // namespace

TrialData::TrialData(MatrixXd X_in, MatrixXd Y_in, VectorXd t_in, VectorXd pi_in)
    : X(std::move(X_in)), Y(std::move(Y_in)), t(std::move(t_in)), pi(std::move(pi_in)) {
    const Eigen::Index rows = X.rows();
    if (Y.rows() != rows || t.size() != rows || pi.size() != rows)
        throw DimensionError("TrialData: X, Y, t, pi must agree on the number of subjects");
    if (X.cols() < 1 || Y.cols() < 1)
        throw DimensionError("TrialData: need at least one covariate and one outcome");
    for (Eigen::Index c = 0; c < X.cols(); ++c) {
        double mean = X.col(c).mean();
        if (!(std::abs(mean) <= 1e-10))
            throw ValidationError("TrialData: covariate column " + std::to_string(c) +
                                  " is not centered (mean " + std::to_string(mean) + ")");
    }
    for (Eigen::Index j = 0; j < Y.cols(); ++j)
        for (Eigen::Index i = 0; i < rows; ++i)
            if (Y(i, j) != 0.0 && Y(i, j) != 1.0)
                throw ValidationError("TrialData: outcome (" + std::to_string(i) + "," +
                                      std::to_string(j) + ") is not 0/1");
    check_treatment_coding(t);
    check_positivity(pi);
}

bool has_orthonormal_columns(const MatrixXd& V, double tol) {
    MatrixXd gram = V.transpose() * V;
    gram -= MatrixXd::Identity(V.cols(), V.cols());
    return gram.cwiseAbs().maxCoeff() <= tol;
}

MatrixXd center_columns(const MatrixXd& X_raw) {
    if (X_raw.rows() < 2)
        throw DegenerateInputError("center_columns: need at least 2 rows, got " +
                                   std::to_string(X_raw.rows()));
    MatrixXd X = X_raw;
    for (Eigen::Index c = 0; c < X.cols(); ++c) {
        // Repeat until the computed mean is exactly zero or subtracting it no
        // longer changes any bit; a second application is then a no-op.
        for (int pass = 0; pass < 100; ++pass) {
            double mean = X.col(c).mean();
            if (mean == 0.0 || !std::isfinite(mean)) break;
            VectorXd shifted = X.col(c).array() - mean;
            if ((shifted.array() == X.col(c).array()).all()) break;
            X.col(c) = shifted;
        }
    }
    return X;
}

VectorXd treatment_from_binary(const VectorXd& t01) {
    VectorXd t(t01.size());
    for (Eigen::Index i = 0; i < t01.size(); ++i) {
        if (t01(i) == 1.0)
            t(i) = 1.0;
        else if (t01(i) == 0.0)
            t(i) = -1.0;
        else
            throw ValidationError("treatment_from_binary: entry " + std::to_string(i) +
                                  " is not 0/1");
    }
    return t;
}

VectorXd w_weights(const VectorXd& t, const VectorXd& pi) {
    if (t.size() != pi.size()) throw DimensionError("w_weights: t and pi sizes differ");
    check_treatment_coding(t);
    check_positivity(pi);
    VectorXd a(t.size());
    for (Eigen::Index i = 0; i < t.size(); ++i)
        a(i) = t(i) > 0 ? 1.0 / pi(i) : 1.0 / (1.0 - pi(i));
    return a;
}

VectorXd a_scalings(const VectorXd& t, const VectorXd& pi) {
    if (t.size() != pi.size()) throw DimensionError("a_scalings: t and pi sizes differ");
    check_treatment_coding(t);
    check_positivity(pi);
    VectorXd q(t.size());
    for (Eigen::Index i = 0; i < t.size(); ++i) q(i) = t(i) > 0 ? 1.0 - pi(i) : -pi(i);
    return q;
}

VectorXd PropensityModel::predict(const MatrixXd& X) const {
    switch (mode) {
        case Mode::Constant:
        case Mode::EmpiricalRct:
            return VectorXd::Constant(X.rows(), rate);
        case Mode::Logistic: {
            if (beta.size() != X.cols() + 1)
                throw DimensionError("PropensityModel: coefficient length does not match X");
            VectorXd eta = (X * beta.tail(X.cols())).array() + beta(0);
            VectorXd out(eta.size());
            for (Eigen::Index i = 0; i < eta.size(); ++i) {
                double v = stable_sigmoid(eta(i));
                out(i) = std::min(1.0 - kPropensityClamp, std::max(kPropensityClamp, v));
            }
            return out;
        }
    }
    throw ValidationError("PropensityModel: unknown mode");
}

PropensityModel estimate_propensity(const MatrixXd& X, const VectorXd& t,
                                    const PropensitySpec& spec) {
    if (spec.mode == PropensityModel::Mode::Constant) {
        if (!(spec.constant > 0.0 && spec.constant < 1.0))
            throw PositivityError("constant propensity must lie in (0,1)");
        PropensityModel model;
        model.mode = PropensityModel::Mode::Constant;
        model.rate = spec.constant;
        return model;
    }
    check_treatment_coding(t);
    if (X.rows() != t.size()) throw DimensionError("estimate_propensity: X and t sizes differ");
    const Eigen::Index n_plus = (t.array() > 0).count();
    if (n_plus == 0 || n_plus == t.size())
        throw EstimationError("estimate_propensity: both treatment arms must be present");
    if (spec.mode == PropensityModel::Mode::EmpiricalRct) {
        PropensityModel model;
        model.mode = PropensityModel::Mode::EmpiricalRct;
        model.rate = static_cast<double>(n_plus) / static_cast<double>(t.size());
        return model;
    }
    MatrixXd design(X.rows(), X.cols() + 1);
    design.col(0).setOnes();
    design.rightCols(X.cols()) = X;
    VectorXd y01 = (t.array() + 1.0) / 2.0;
    PropensityModel model;
    model.mode = PropensityModel::Mode::Logistic;
    model.beta = fit_logistic_irls(design, y01, 100, 1e-8);
    return model;
}

}  // namespace rrhte
