#include "rrhte/simulation.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>

#include <Eigen/Cholesky>
#include <Eigen/QR>

#include "rrhte/rng.hpp"

namespace rrhte {

std::string to_string(Assignment a) {
    return a == Assignment::Rct ? "rct" : "observational";
}

std::optional<Assignment> assignment_from_string(const std::string& name) {
    std::string lower(name);
    std::transform(lower.begin(), lower.end(), lower.begin(),
                   [](unsigned char c) { return std::tolower(c); });
    if (lower == "rct") return Assignment::Rct;
    if (lower == "observational" || lower == "obs") return Assignment::Observational;
    return std::nullopt;
}

MatrixXd equicorrelation_cov(int dim, double rho) {
    if (dim < 1) throw ValidationError("equicorrelation_cov: dim must be positive");
    if (!(rho >= 0.0 && rho < 1.0))
        throw ValidationError("equicorrelation_cov: rho must lie in [0, 1)");
    MatrixXd cov = MatrixXd::Constant(dim, dim, rho);
    cov.diagonal().setOnes();
    return cov;
}

Truth sample_truth(int p, int m, int r, std::uint64_t seed) {
    if (r < 1 || r > std::min(p, m))
        throw ValidationError("sample_truth: rank must lie in [1, min(p, m)]");
    auto eng = make_engine(seed);
    Truth truth;
    truth.D = gaussian_matrix(p, m, eng);
    truth.W = gaussian_matrix(p, r, eng);
    MatrixXd g = gaussian_matrix(m, r, eng);
    Eigen::HouseholderQR<MatrixXd> qr(g);
    truth.V = qr.householderQ() * MatrixXd::Identity(m, r);
    MatrixXd R = qr.matrixQR().topRows(r).triangularView<Eigen::Upper>();
    for (int k = 0; k < r; ++k)
        if (R(k, k) < 0.0) truth.V.col(k) = -truth.V.col(k);
    return truth;
}

std::pair<VectorXd, VectorXd> assign_treatment(const MatrixXd& X, Assignment mode,
                                               std::uint64_t seed) {
    const Eigen::Index n = X.rows();
    if (mode == Assignment::Observational && X.cols() < 1)
        throw DimensionError("assign_treatment: observational mode needs at least one covariate");
    auto eng = make_engine(seed);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    VectorXd t(n), pi(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        double prob = mode == Assignment::Rct ? 0.5 : 1.0 / (1.0 + std::exp(1.0 - X(i, 0)));
        pi(i) = prob;
        t(i) = unif(eng) < prob ? 1.0 : -1.0;
    }
    return {t, pi};
}

SimulatedDataset generate_scenario(const ScenarioConfig& config, int replication_index) {
    if (config.n < 2) throw ValidationError("generate_scenario: n must be at least 2");
    if (config.p < 1 || config.m < 1) throw ValidationError("generate_scenario: p, m must be positive");
    if (config.r < 1 || config.r > std::min(config.p, config.m))
        throw ValidationError("generate_scenario: rank must lie in [1, min(p, m)]");
    if (replication_index < 0) throw ValidationError("generate_scenario: replication index < 0");

    const auto rep = static_cast<std::uint64_t>(replication_index);
    const auto truth_rep = config.freeze_truth ? std::uint64_t{0} : rep;
    Truth truth = sample_truth(config.p, config.m, config.r,
                               derive_seed(config.master_seed, {1, truth_rep}));

    MatrixXd L1 = equicorrelation_cov(config.p, config.rho1).llt().matrixL();
    auto eng_x = make_engine(derive_seed(config.master_seed, {2, rep}));
    MatrixXd X_raw = gaussian_matrix(config.n, config.p, eng_x) * L1.transpose();

    auto [t, pi] =
        assign_treatment(X_raw, config.assignment, derive_seed(config.master_seed, {3, rep}));

    MatrixXd L2 = equicorrelation_cov(config.m, config.rho2).llt().matrixL();
    auto eng_e = make_engine(derive_seed(config.master_seed, {4, rep}));
    MatrixXd E = gaussian_matrix(config.n, config.m, eng_e) * L2.transpose();

    MatrixXd main_term = (X_raw * truth.D).cwiseProduct(X_raw * truth.D);
    MatrixXd treat_term = t.asDiagonal() * (X_raw * truth.W * truth.V.transpose());
    MatrixXd Y = ((main_term + treat_term + E).array() > 0.0).cast<double>();

    MatrixXd X = center_columns(X_raw);
    MatrixXd H_true = X * truth.W * truth.V.transpose();
    return {TrialData(std::move(X), std::move(Y), std::move(t), std::move(pi)),
            std::move(X_raw),
            std::move(truth.D),
            std::move(truth.W),
            std::move(truth.V),
            std::move(E),
            std::move(H_true)};
}

}  // namespace rrhte
