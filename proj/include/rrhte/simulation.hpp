#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>

#include <Eigen/Core>

#include "rrhte/trial_data.hpp"

namespace rrhte {

enum class Assignment { Rct, Observational };

std::string to_string(Assignment a);
std::optional<Assignment> assignment_from_string(const std::string& name);

struct ScenarioConfig {
    int n = 100;
    int p = 10;
    int m = 5;
    int r = 3;
    double rho1 = 0.0;
    double rho2 = 0.0;
    Assignment assignment = Assignment::Rct;
    int replications = 100;
    std::uint64_t master_seed = 0;
    bool freeze_truth = false;  // reuse the replication-0 truth for all replications
};

struct SimulatedDataset {
    TrialData data;
    MatrixXd X_raw;   // n x p covariates as drawn, before centering
    MatrixXd D;       // p x m main-effect coefficients
    MatrixXd W_true;  // p x r
    MatrixXd V_true;  // m x r, orthonormal columns
    MatrixXd E;       // n x m errors
    MatrixXd H_true;  // n x m effects from the centered covariates
};

/// Equicorrelation matrix: 1 on the diagonal, rho off it. Positive definite
/// for rho in [0, 1).
MatrixXd equicorrelation_cov(int dim, double rho);

struct Truth {
    MatrixXd D;
    MatrixXd W;
    MatrixXd V;
};

/// D and W are iid standard Gaussian; V is the Q factor of a seeded Gaussian
/// m x r matrix with the R diagonal made nonnegative.
Truth sample_truth(int p, int m, int r, std::uint64_t seed);

/// Returns (t, pi) with pi the true assignment probability: 0.5 under Rct,
/// 1/(1 + exp(1 - x_1)) under Observational.
std::pair<VectorXd, VectorXd> assign_treatment(const MatrixXd& X, Assignment mode,
                                               std::uint64_t seed);

/// Draws one replication: X rows from N(0, Sigma(rho1)), latent outcomes
/// XD .* XD + t-signed X W V' + E with E rows from N(0, Sigma(rho2)),
/// thresholded at zero. The TrialData view carries the empirically centered
/// X, and H_true is computed from that same centered matrix.
SimulatedDataset generate_scenario(const ScenarioConfig& config, int replication_index);

}  // namespace rrhte
