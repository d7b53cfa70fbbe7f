#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "rrhte/effects.hpp"
#include "rrhte/simulation.hpp"
#include "rrhte/solver.hpp"
#include "rrhte/trial_data.hpp"

namespace rrhte {

/// Scenario grid x methods x replications. The grid is the cross product of
/// the lists with cells violating r <= min(p, m) dropped.
struct StudyConfig {
    std::vector<int> n_list{100};
    std::vector<int> p_list{10};
    std::vector<int> m_list{5};
    std::vector<int> r_list{3};
    std::vector<double> rho1_list{0.0};
    std::vector<double> rho2_list{0.0};
    std::vector<Assignment> assignment_list{Assignment::Rct};
    std::vector<Method> methods{Method::R3W};
    int replications = 100;
    std::uint64_t master_seed = 0;
    std::string out_dir;
    int jobs = 1;
    double solver_tol = 1e-6;
    int solver_max_iter = 1000;
    bool quiet = false;
};

/// One grid cell in enumeration order; scenario_id is its index.
struct ScenarioCell {
    int scenario_id;
    ScenarioConfig config;
};

std::vector<ScenarioCell> enumerate_grid(const StudyConfig& config);

/// Runs the full study and writes results.csv, errors.csv, summary.csv and
/// per-method pooled roc_<METHOD>.csv under out_dir. Per-task failures go to
/// errors.csv and the study continues. Output bytes are a pure function of
/// the config (timing column aside), independent of jobs.
void run_simulation_study(const StudyConfig& config);

/// Real-data analysis of a user-supplied trial CSV.
struct RealDataConfig {
    std::string csv_path;
    std::string treatment_column;
    std::string treatment_positive_level;
    std::vector<std::string> outcome_columns;
    std::vector<bool> dichotomize;  // parallel to outcome_columns
    std::vector<std::string> covariate_columns;
    int rank = 2;
    PropensitySpec propensity = PropensitySpec::Constant(0.5);
    double loading_threshold = 0.1;
    bool standardize = false;
    bool with_r3amod = false;
    std::string out_dir;
    SolverOptions solver;
};

/// Parses and validates the CSV: flagged outcomes are median-dichotomized
/// (value > median -> 1), covariates centered (and optionally standardized),
/// treatment mapped to -1/+1, propensity attached per config.
TrialData load_dataset_csv(const RealDataConfig& config);

/// Rank-r weighted fit plus V.csv, W.csv, W_thresholded.csv, effects.csv and
/// fit_meta.csv; optionally the bias-corrected q-scaled fit alongside
/// (same files with an _r3amod suffix).
void run_real_data(const RealDataConfig& config);

/// gen-data: one CSV per replication (id,t,pi,y1..ym,x1..xp) plus a truth
/// sidecar (id,h1..hm) under out_dir.
void dump_datasets(const ScenarioConfig& config, const std::string& out_dir);

}  // namespace rrhte
