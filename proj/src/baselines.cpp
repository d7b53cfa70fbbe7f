#include "rrhte/baselines.hpp"

#include <cmath>
#include <iostream>
#include <string>

#include <Eigen/Cholesky>

#include "rrhte/logistic_irls.hpp"
#include "rrhte/losses.hpp"

namespace rrhte {

namespace {

inline double logistic_residual(double theta) {
    if (theta <= 0.0) {
        double e = std::exp(theta);
        return 1.0 / (1.0 + e);
    }
    double e = std::exp(-theta);
    return e / (1.0 + e);
}

// Per-outcome MM descent on sum_i w_i y_i log(1 + exp(-s_i x_i'gamma)).
ColumnwiseFit fit_columnwise(const TrialData& data, const SolverOptions& options,
                             const VectorXd& scale, const VectorXd& weights,
                             const VectorXd& normal_weights) {
    if (!(options.tol > 0.0)) throw ValidationError("solver: tol must be positive");
    if (options.max_iter < 1) throw ValidationError("solver: max_iter must be at least 1");
    const Eigen::Index n = data.n(), p = data.p(), m = data.m();

    MatrixXd gram = data.X.transpose() * normal_weights.asDiagonal() * data.X;
    double ridge = options.ridge;
    if (ridge == 0.0 && sym_condition(gram) > kIllConditionedThreshold) {
        ridge = 1e-8 * gram.trace() / static_cast<double>(p);
        if (!options.quiet)
            std::cerr << "warning: ill-conditioned normal system, retrying with ridge " << ridge
                      << "\n";
    }
    MatrixXd M = gram;
    M.diagonal().array() += ridge;
    if (sym_condition(M) > kIllConditionedThreshold)
        throw IllConditionedError("fit per outcome: normal system is singular; set a ridge");
    Eigen::LDLT<MatrixXd> ldlt(M);
    VectorXd rhs_scale = (scale.array() * weights.array()).matrix();  // t.*a or q

    ColumnwiseFit fit;
    fit.Gamma = MatrixXd::Zero(p, m);
    fit.iterations.assign(m, 0);
    fit.converged.assign(m, false);
    for (Eigen::Index j = 0; j < m; ++j) {
        VectorXd y = data.Y.col(j);
        VectorXd gamma = VectorXd::Zero(p);
        auto column_loss = [&](const VectorXd& g) {
            Eigen::ArrayXd theta = scale.array() * (data.X * g).array();
            return (weights.array() * y.array() *
                    theta.unaryExpr([](double th) { return softplus_neg(th); }))
                .sum();
        };
        double loss_prev = column_loss(gamma);
        for (int it = 1; it <= options.max_iter; ++it) {
            VectorXd theta = (scale.array() * (data.X * gamma).array()).matrix();
            VectorXd phi = theta.unaryExpr([](double th) { return logistic_residual(th); });
            VectorXd z = theta + 4.0 * y.cwiseProduct(phi);
            gamma = ldlt.solve(data.X.transpose() * rhs_scale.cwiseProduct(z));
            double loss = column_loss(gamma);
            fit.iterations[static_cast<std::size_t>(j)] = it;
            if (loss_prev - loss < options.tol) {
                fit.converged[static_cast<std::size_t>(j)] = true;
                break;
            }
            loss_prev = loss;
        }
        fit.Gamma.col(j) = gamma;
    }
    (void)n;
    return fit;
}

}  // namespace

FullModelFit fit_full(const TrialData& data) {
    const Eigen::Index n = data.n(), p = data.p(), m = data.m();
    const Eigen::Index n_plus = (data.t.array() > 0).count();
    if (n_plus == 0 || n_plus == n)
        throw EstimationError("fit_full: both treatment arms must be present");
    MatrixXd design(n, 1 + 2 * p);
    design.col(0).setOnes();
    design.middleCols(1, p) = data.X;
    design.rightCols(p) = data.t.asDiagonal() * data.X;

    FullModelFit fit;
    fit.alpha.resize(m);
    fit.B.resize(p, m);
    fit.C.resize(p, m);
    fit.irls_iterations.assign(m, 0);
    for (Eigen::Index j = 0; j < m; ++j) {
        VectorXd y = data.Y.col(j);
        if (y.maxCoeff() == y.minCoeff())
            throw ConvergenceError("fit_full: outcome " + std::to_string(j) +
                                   " is constant (complete separation)");
        VectorXd beta;
        try {
            int iters = 0;
            beta = fit_logistic_irls(design, y, 200, 1e-8, &iters);
            fit.irls_iterations[static_cast<std::size_t>(j)] = iters;
        } catch (const ConvergenceError& e) {
            throw ConvergenceError("fit_full: outcome " + std::to_string(j) + ": " + e.what());
        }
        fit.alpha(j) = beta(0);
        fit.B.col(j) = beta.segment(1, p);
        fit.C.col(j) = beta.segment(1 + p, p);
    }
    return fit;
}

MatrixXd full_effect(const FullModelFit& fit, const MatrixXd& X) {
    if (fit.B.rows() != X.cols() || fit.C.rows() != X.cols() || fit.B.cols() != fit.C.cols() ||
        fit.alpha.size() != fit.B.cols())
        throw DimensionError("full_effect: fit shapes do not match X");
    MatrixXd base = (X * fit.B).rowwise() + fit.alpha.transpose();
    MatrixXd inter = X * fit.C;
    // log sigma(base + inter) - log sigma(base - inter), stable via softplus
    MatrixXd H(X.rows(), fit.B.cols());
    for (Eigen::Index i = 0; i < H.rows(); ++i)
        for (Eigen::Index j = 0; j < H.cols(); ++j)
            H(i, j) = softplus_neg(base(i, j) - inter(i, j)) - softplus_neg(base(i, j) + inter(i, j));
    return H;
}

ColumnwiseFit fit_ma(const TrialData& data, const SolverOptions& options) {
    VectorXd q = a_scalings(data.t, data.pi);
    return fit_columnwise(data, options, q, VectorXd::Ones(data.n()),
                          q.array().square().matrix());
}

ColumnwiseFit fit_mw(const TrialData& data, const SolverOptions& options) {
    VectorXd a = w_weights(data.t, data.pi);
    return fit_columnwise(data, options, data.t, a, a);
}

}  // namespace rrhte
