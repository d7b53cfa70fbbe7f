#pragma once

#include <vector>

#include <Eigen/Core>

#include "rrhte/trial_data.hpp"

namespace rrhte {

/// Mean squared entry-wise difference (1/nm) ||H_hat - H_true||_F^2.
double mse(const MatrixXd& H_hat, const MatrixXd& H_true);

/// Per-subject score s_i = sum_j H_ij.
VectorXd subject_scores(const MatrixXd& H);

struct ClassificationRates {
    double fpr;
    double fnr;
    double tpr;
};

/// Estimated sign (s_hat > threshold) against the true sign (s_true > 0).
/// Throws UndefinedRateError when a conditioning class is empty.
ClassificationRates classification_rates(const VectorXd& s_hat, const VectorXd& s_true,
                                         double threshold);

struct RocPoint {
    double threshold;
    double fpr;
    double tpr;
};

/// Points run from threshold +inf at (0,0) to -inf at (1,1); tied scores are
/// grouped into a single step. auc is the trapezoidal area.
struct RocCurve {
    std::vector<RocPoint> points;
    double auc;
};

RocCurve roc_and_auc(const VectorXd& s_hat, const VectorXd& s_true);

}  // namespace rrhte
