#include "rrhte/evaluation.hpp"

#include <algorithm>
#include <limits>
#include <numeric>

namespace rrhte {

double mse(const MatrixXd& H_hat, const MatrixXd& H_true) {
    if (H_hat.rows() != H_true.rows() || H_hat.cols() != H_true.cols())
        throw DimensionError("mse: shapes differ");
    return (H_hat - H_true).squaredNorm() /
           static_cast<double>(H_hat.rows() * H_hat.cols());
}

VectorXd subject_scores(const MatrixXd& H) { return H.rowwise().sum(); }

ClassificationRates classification_rates(const VectorXd& s_hat, const VectorXd& s_true,
                                         double threshold) {
    if (s_hat.size() != s_true.size())
        throw DimensionError("classification_rates: score lengths differ");
    Eigen::Index pos = 0, neg = 0, fp = 0, fn = 0;
    for (Eigen::Index i = 0; i < s_hat.size(); ++i) {
        if (s_true(i) > 0.0) {
            ++pos;
            if (!(s_hat(i) > threshold)) ++fn;
        } else {
            ++neg;
            if (s_hat(i) > threshold) ++fp;
        }
    }
    if (neg == 0)
        throw UndefinedRateError("classification_rates: no subjects with true score <= 0, "
                                 "FPR undefined");
    if (pos == 0)
        throw UndefinedRateError("classification_rates: no subjects with true score > 0, "
                                 "FNR undefined");
    ClassificationRates rates;
    rates.fpr = static_cast<double>(fp) / static_cast<double>(neg);
    rates.fnr = static_cast<double>(fn) / static_cast<double>(pos);
    rates.tpr = 1.0 - rates.fnr;
    return rates;
}

RocCurve roc_and_auc(const VectorXd& s_hat, const VectorXd& s_true) {
    if (s_hat.size() != s_true.size()) throw DimensionError("roc_and_auc: score lengths differ");
    if (!s_hat.allFinite()) throw NumericError("roc_and_auc: non-finite scores");
    const Eigen::Index n = s_hat.size();
    Eigen::Index pos = 0, neg = 0;
    for (Eigen::Index i = 0; i < n; ++i) (s_true(i) > 0.0 ? pos : neg)++;
    if (pos == 0 || neg == 0)
        throw UndefinedRateError("roc_and_auc: both true-sign classes must be non-empty");

    std::vector<Eigen::Index> idx(static_cast<std::size_t>(n));
    std::iota(idx.begin(), idx.end(), Eigen::Index{0});
    std::sort(idx.begin(), idx.end(),
              [&](Eigen::Index a, Eigen::Index b) { return s_hat(a) > s_hat(b); });

    const double inf = std::numeric_limits<double>::infinity();
    RocCurve curve;
    curve.points.push_back({inf, 0.0, 0.0});
    Eigen::Index tp = 0, fp = 0;
    std::size_t i = 0;
    while (i < idx.size()) {
        double v = s_hat(idx[i]);
        // Threshold at v classifies only strictly larger scores as positive.
        curve.points.push_back({v, static_cast<double>(fp) / static_cast<double>(neg),
                                static_cast<double>(tp) / static_cast<double>(pos)});
        while (i < idx.size() && s_hat(idx[i]) == v) {
            (s_true(idx[i]) > 0.0 ? tp : fp)++;
            ++i;
        }
    }
    curve.points.push_back({-inf, 1.0, 1.0});
    double auc = 0.0;
    for (std::size_t k = 1; k < curve.points.size(); ++k)
        auc += (curve.points[k].fpr - curve.points[k - 1].fpr) *
               (curve.points[k].tpr + curve.points[k - 1].tpr) / 2.0;
    curve.auc = auc;
    return curve;
}

}  // namespace rrhte
