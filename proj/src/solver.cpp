#include "rrhte/solver.hpp"

#include <cmath>
#include <iostream>
#include <string>

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <Eigen/QR>
#include <Eigen/SVD>

#include "rrhte/rng.hpp"

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

VectorXd loss_weights(LossKind kind, const TrialData& data) {
    return kind == LossKind::WMethod ? w_weights(data.t, data.pi) : VectorXd::Ones(data.n());
}

VectorXd predictor_scale(LossKind kind, const TrialData& data) {
    return kind == LossKind::WMethod ? data.t : a_scalings(data.t, data.pi);
}

MajorizationState majorize(LossKind kind, const FactorizedCoefficients& coeffs,
                           const TrialData& data) {
    VectorXd w = loss_weights(kind, data);
    MatrixXd theta = linear_predictors(data.X, coeffs, predictor_scale(kind, data));
    MajorizationState state;
    state.Phi = theta.unaryExpr([](double th) { return logistic_residual(th); });
    state.Z = theta + 4.0 * data.Y.cwiseProduct(state.Phi);
    if (!state.Z.allFinite()) throw NumericError("majorize: non-finite working response");
    Eigen::ArrayXXd sp = theta.array().unaryExpr([](double th) { return softplus_neg(th); });
    // Dropped additive constant: sum_ij w_i y_ij (softplus(-theta) - 2 phi^2).
    state.surrogate_constant =
        ((data.Y.array() * (sp - 2.0 * state.Phi.array().square())).colwise() * w.array()).sum();
    state.surrogate_value = ((data.Y.array() * sp).colwise() * w.array()).sum();
    return state;
}

MatrixXd solve_normal_system(const MatrixXd& gram, const MatrixXd& rhs, double ridge,
                             const char* who) {
    MatrixXd M = gram;
    M.diagonal().array() += ridge;
    if (sym_condition(M) > kIllConditionedThreshold)
        throw IllConditionedError(std::string(who) +
                                  ": normal system is singular or ill-conditioned "
                                  "(condition estimate > 1e12); set a positive ridge");
    return M.ldlt().solve(rhs);
}

}  // namespace

double sym_condition(const MatrixXd& M) {
    Eigen::SelfAdjointEigenSolver<MatrixXd> es(M, Eigen::EigenvaluesOnly);
    const VectorXd& ev = es.eigenvalues();
    double lo = ev.minCoeff();
    double hi = ev.maxCoeff();
    if (!(hi > 0.0) || lo <= 0.0) return std::numeric_limits<double>::infinity();
    return hi / lo;
}

MajorizationState majorize_w(const FactorizedCoefficients& coeffs, const TrialData& data) {
    return majorize(LossKind::WMethod, coeffs, data);
}

MajorizationState majorize_a(const FactorizedCoefficients& coeffs, const TrialData& data) {
    return majorize(LossKind::ALearner, coeffs, data);
}

double surrogate_value(LossKind kind, const MajorizationState& state, const TrialData& data,
                       const FactorizedCoefficients& trial) {
    VectorXd w = loss_weights(kind, data);
    MatrixXd theta = linear_predictors(data.X, trial, predictor_scale(kind, data));
    double quad = 0.125 * (((state.Z - theta).array().square()).colwise() * w.array()).sum();
    return quad + state.surrogate_constant;
}

MatrixXd update_v(const MatrixXd& G) {
    const Eigen::Index m = G.rows(), r = G.cols();
    if (m < r) throw DimensionError("update_v: G must have at least as many rows as columns");
    if (!G.allFinite()) throw NumericError("update_v: non-finite input");
    Eigen::JacobiSVD<MatrixXd> svd(G, Eigen::ComputeThinU | Eigen::ComputeThinV);
    MatrixXd K = svd.matrixU();
    MatrixXd L = svd.matrixV();
    const VectorXd& sv = svd.singularValues();
    double cutoff = static_cast<double>(m) * std::numeric_limits<double>::epsilon() *
                    (sv.size() > 0 ? sv(0) : 0.0);
    // Complete zero-singular-value directions from the canonical basis in
    // index order so rank-deficient inputs stay deterministic.
    for (Eigen::Index k = 0; k < r; ++k) {
        if (sv(k) > cutoff) continue;
        for (Eigen::Index e = 0; e < m; ++e) {
            VectorXd cand = VectorXd::Unit(m, e);
            for (Eigen::Index j = 0; j < r; ++j) {
                if (j == k) continue;
                cand -= K.col(j).dot(cand) * K.col(j);
            }
            double nrm = cand.norm();
            if (nrm > 1e-3) {
                K.col(k) = cand / nrm;
                break;
            }
        }
    }
    for (Eigen::Index k = 0; k < r; ++k) {
        Eigen::Index imax = 0;
        K.col(k).cwiseAbs().maxCoeff(&imax);
        if (K(imax, k) < 0.0) {
            K.col(k) = -K.col(k);
            L.col(k) = -L.col(k);
        }
    }
    return K * L.transpose();
}

MatrixXd update_w_wmethod(const TrialData& data, const MatrixXd& Z, const MatrixXd& V,
                          double ridge) {
    if (Z.rows() != data.n() || Z.cols() != data.m())
        throw DimensionError("update_w_wmethod: Z shape does not match data");
    if (V.rows() != data.m()) throw DimensionError("update_w_wmethod: V rows must equal m");
    VectorXd a = w_weights(data.t, data.pi);
    MatrixXd gram = data.X.transpose() * a.asDiagonal() * data.X;
    MatrixXd rhs =
        data.X.transpose() * ((data.t.array() * a.array()).matrix().asDiagonal() * Z) * V;
    return solve_normal_system(gram, rhs, ridge, "update_w_wmethod");
}

MatrixXd update_w_alearner(const TrialData& data, const MatrixXd& Zdag, const MatrixXd& V,
                           double ridge) {
    if (Zdag.rows() != data.n() || Zdag.cols() != data.m())
        throw DimensionError("update_w_alearner: Z shape does not match data");
    if (V.rows() != data.m()) throw DimensionError("update_w_alearner: V rows must equal m");
    VectorXd q = a_scalings(data.t, data.pi);
    MatrixXd gram = data.X.transpose() * q.array().square().matrix().asDiagonal() * data.X;
    MatrixXd rhs = data.X.transpose() * (q.asDiagonal() * Zdag) * V;
    return solve_normal_system(gram, rhs, ridge, "update_w_alearner");
}

namespace {

FactorizedCoefficients seeded_init(Eigen::Index p, Eigen::Index m, int rank,
                                   std::uint64_t seed) {
    auto eng = make_engine(seed);
    MatrixXd g = gaussian_matrix(m, rank, eng);
    Eigen::HouseholderQR<MatrixXd> qr(g);
    MatrixXd V = qr.householderQ() * MatrixXd::Identity(m, rank);
    MatrixXd R = qr.matrixQR().topRows(rank).triangularView<Eigen::Upper>();
    for (int k = 0; k < rank; ++k)
        if (R(k, k) < 0.0) V.col(k) = -V.col(k);
    MatrixXd W = 0.01 * gaussian_matrix(p, rank, eng);
    return {W, V};
}

FitResult fit_mm(const TrialData& data, const SolverOptions& options, LossKind kind) {
    const Eigen::Index p = data.p(), m = data.m();
    if (options.rank < 1 || options.rank > std::min(p, m))
        throw ValidationError("solver: rank must lie in [1, min(p, m)]");
    if (!(options.tol > 0.0)) throw ValidationError("solver: tol must be positive");
    if (options.max_iter < 1) throw ValidationError("solver: max_iter must be at least 1");

    VectorXd normal_weights;
    if (kind == LossKind::WMethod) {
        normal_weights = w_weights(data.t, data.pi);
    } else {
        normal_weights = a_scalings(data.t, data.pi).array().square();
    }
    double ridge = options.ridge;
    if (ridge == 0.0) {
        MatrixXd gram = data.X.transpose() * normal_weights.asDiagonal() * data.X;
        if (sym_condition(gram) > kIllConditionedThreshold) {
            ridge = 1e-8 * gram.trace() / static_cast<double>(p);
            if (!options.quiet)
                std::cerr << "warning: ill-conditioned normal system, retrying with ridge "
                          << ridge << "\n";
        }
    }

    FactorizedCoefficients coeffs;
    if (options.init) {
        coeffs = *options.init;
        if (coeffs.W.rows() != p || coeffs.V.rows() != m || coeffs.rank() != options.rank ||
            coeffs.V.cols() != options.rank)
            throw DimensionError("solver: supplied initial factors have wrong shape");
    } else {
        coeffs = seeded_init(p, m, options.rank, options.init_seed);
    }

    auto true_loss = [&](const FactorizedCoefficients& c) {
        return kind == LossKind::WMethod ? loss_w(c, data) : loss_a(c, data);
    };

    FitResult result;
    double loss_prev = true_loss(coeffs);
    result.objective_trace.push_back(loss_prev);
    VectorXd scale = predictor_scale(kind, data);
    VectorXd w = loss_weights(kind, data);
    VectorXd g_scale = (w.array() * scale.array()).matrix();  // a.*t or q
    for (int it = 1; it <= options.max_iter; ++it) {
        MajorizationState state = majorize(kind, coeffs, data);
        MatrixXd G = 2.0 * state.Z.transpose() * (g_scale.asDiagonal() * (data.X * coeffs.W));
        coeffs.V = update_v(G);
        coeffs.W = kind == LossKind::WMethod
                       ? update_w_wmethod(data, state.Z, coeffs.V, ridge)
                       : update_w_alearner(data, state.Z, coeffs.V, ridge);
        double loss = true_loss(coeffs);
        result.objective_trace.push_back(loss);
        result.iterations = it;
        if (loss_prev - loss < options.tol) {
            result.converged = true;
            break;
        }
        loss_prev = loss;
    }
    result.coeffs = std::move(coeffs);
    return result;
}

}  // namespace

FitResult fit_r3w(const TrialData& data, const SolverOptions& options) {
    return fit_mm(data, options, LossKind::WMethod);
}

FitResult fit_r3a(const TrialData& data, const SolverOptions& options) {
    return fit_mm(data, options, LossKind::ALearner);
}

}  // namespace rrhte
