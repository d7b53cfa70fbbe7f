#pragma once

#include <Eigen/Core>

namespace rrhte {

/// Maximum-likelihood logistic regression of a 0/1 response on an explicit
/// design matrix via iteratively reweighted least squares. Convergence is
/// max-abs coefficient change < tol. Throws ConvergenceError (naming the
/// iteration cap) on non-convergence or a singular weighted normal system,
/// both symptoms of separation.
Eigen::VectorXd fit_logistic_irls(const Eigen::MatrixXd& design, const Eigen::VectorXd& y01,
                                  int max_iter, double tol, int* iterations_out = nullptr);

}  // namespace rrhte
