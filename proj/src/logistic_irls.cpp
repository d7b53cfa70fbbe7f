#include "rrhte/logistic_irls.hpp"

#include <cmath>
#include <string>

#include <Eigen/Cholesky>

#include "rrhte/errors.hpp"

namespace rrhte {

using Eigen::MatrixXd;
using Eigen::VectorXd;

VectorXd fit_logistic_irls(const MatrixXd& design, const VectorXd& y01, int max_iter, double tol,
                           int* iterations_out) {
    if (design.rows() != y01.size())
        throw DimensionError("fit_logistic_irls: design and response sizes differ");
    const Eigen::Index k = design.cols();
    VectorXd beta = VectorXd::Zero(k);
    for (int it = 1; it <= max_iter; ++it) {
        VectorXd eta = design * beta;
        VectorXd mu(eta.size());
        for (Eigen::Index i = 0; i < eta.size(); ++i) {
            double x = eta(i);
            mu(i) = x >= 0 ? 1.0 / (1.0 + std::exp(-x)) : std::exp(x) / (1.0 + std::exp(x));
        }
        VectorXd s = (mu.array() * (1.0 - mu.array())).max(1e-12);
        MatrixXd hess = design.transpose() * s.asDiagonal() * design;
        VectorXd grad = design.transpose() * (y01 - mu);
        VectorXd step = hess.ldlt().solve(grad);
        if (!step.allFinite())
            throw ConvergenceError(
                "logistic IRLS: singular weighted normal system (separation?) after " +
                std::to_string(it) + " of " + std::to_string(max_iter) + " iterations");
        beta += step;
        if (step.cwiseAbs().maxCoeff() < tol) {
            if (iterations_out) *iterations_out = it;
            return beta;
        }
    }
    throw ConvergenceError("logistic IRLS did not converge within the cap of " +
                           std::to_string(max_iter) + " iterations (separation?)");
}

}  // namespace rrhte
