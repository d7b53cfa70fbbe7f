#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "rrhte/study.hpp"

namespace {

std::vector<rrhte::Method> parse_methods(const std::vector<std::string>& names) {
    std::vector<rrhte::Method> methods;
    for (const std::string& name : names) {
        auto method = rrhte::method_from_string(name);
        if (!method)
            throw rrhte::ValidationError(
                "unknown method '" + name +
                "' (expected Full, MA, MAmod, MW, R3A, R3Amod or R3W)");
        methods.push_back(*method);
    }
    return methods;
}

std::vector<rrhte::Assignment> parse_assignments(const std::vector<std::string>& names) {
    std::vector<rrhte::Assignment> modes;
    for (const std::string& name : names) {
        auto mode = rrhte::assignment_from_string(name);
        if (!mode)
            throw rrhte::ValidationError("unknown assignment '" + name +
                                         "' (expected rct or observational)");
        modes.push_back(*mode);
    }
    return modes;
}

rrhte::PropensitySpec parse_propensity(const std::string& mode, double constant) {
    if (mode == "constant") return rrhte::PropensitySpec::Constant(constant);
    if (mode == "empirical") return rrhte::PropensitySpec::EmpiricalRct();
    if (mode == "logistic") return rrhte::PropensitySpec::Logistic();
    throw rrhte::ValidationError("unknown propensity mode '" + mode +
                                 "' (expected constant, empirical or logistic)");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Reduced-rank logistic estimation of heterogeneous treatment effects "
                 "for multiple binary outcomes"};
    app.set_config("--config", "", "Read options from a key=value config file; flags override");
    app.require_subcommand(1);

    rrhte::StudyConfig study;
    std::vector<std::string> study_methods;
    std::vector<std::string> study_assignments{"rct"};
    auto* sim = app.add_subcommand("simulate", "Run a seeded simulation study over a scenario grid");
    sim->add_option("--n", study.n_list, "Sample sizes")->delimiter(',')->capture_default_str();
    sim->add_option("--p", study.p_list, "Covariate counts")->delimiter(',')->capture_default_str();
    sim->add_option("--m", study.m_list, "Outcome counts")->delimiter(',')->capture_default_str();
    sim->add_option("--r", study.r_list, "Effect ranks")->delimiter(',')->capture_default_str();
    sim->add_option("--rho1", study.rho1_list, "Covariate equicorrelations")
        ->delimiter(',')
        ->capture_default_str();
    sim->add_option("--rho2", study.rho2_list, "Error equicorrelations")
        ->delimiter(',')
        ->capture_default_str();
    sim->add_option("--assignment", study_assignments, "rct and/or observational")
        ->delimiter(',')
        ->capture_default_str();
    sim->add_option("--methods", study_methods, "Methods to run (Full,MA,MAmod,MW,R3A,R3Amod,R3W)")
        ->delimiter(',')
        ->required();
    sim->add_option("--replications", study.replications, "Replications per grid cell")
        ->capture_default_str();
    sim->add_option("--seed", study.master_seed, "Master seed")->required();
    sim->add_option("--out", study.out_dir, "Output directory")->required();
    sim->add_option("--jobs", study.jobs, "Worker threads")->required();
    sim->add_option("--tol", study.solver_tol, "Solver tolerance")->capture_default_str();
    sim->add_option("--max-iter", study.solver_max_iter, "Solver iteration cap")
        ->capture_default_str();

    rrhte::RealDataConfig real;
    std::vector<std::string> outcomes_plain, outcomes_median;
    std::string propensity_mode = "constant";
    double propensity_constant = 0.5;
    auto* analyze = app.add_subcommand("analyze", "Fit a trial CSV and write loading/effect tables");
    analyze->add_option("--input", real.csv_path, "Input CSV path")->required();
    analyze->add_option("--treatment", real.treatment_column, "Treatment column")->required();
    analyze->add_option("--treatment-positive", real.treatment_positive_level,
                        "Treatment level mapped to +1")
        ->required();
    analyze->add_option("--outcome", outcomes_plain, "0/1 outcome column (repeatable)")
        ->delimiter(',');
    analyze
        ->add_option("--outcome-median", outcomes_median,
                     "Outcome column to median-dichotomize (repeatable)")
        ->delimiter(',');
    analyze->add_option("--covariate", real.covariate_columns, "Covariate column (repeatable)")
        ->delimiter(',')
        ->required();
    analyze->add_option("--rank", real.rank, "Factorization rank")->capture_default_str();
    analyze->add_option("--propensity", propensity_mode, "constant|empirical|logistic")
        ->capture_default_str();
    analyze->add_option("--propensity-constant", propensity_constant, "Value for constant mode")
        ->capture_default_str();
    analyze->add_option("--threshold", real.loading_threshold, "Loading display threshold")
        ->capture_default_str();
    analyze->add_flag("--standardize", real.standardize, "Scale covariates to unit variance");
    analyze->add_flag("--with-r3amod", real.with_r3amod,
                      "Also fit the bias-corrected A-learner variant");
    analyze->add_option("--out", real.out_dir, "Output directory")->required();
    analyze->add_option("--seed", real.solver.init_seed, "Solver init seed")
        ->capture_default_str();
    analyze->add_option("--tol", real.solver.tol, "Solver tolerance")->capture_default_str();
    analyze->add_option("--max-iter", real.solver.max_iter, "Solver iteration cap")
        ->capture_default_str();

    rrhte::ScenarioConfig gen;
    std::string gen_assignment = "rct";
    std::string gen_out;
    auto* gen_data = app.add_subcommand("gen-data", "Dump simulated replication CSVs");
    gen_data->add_option("--n", gen.n, "Sample size")->capture_default_str();
    gen_data->add_option("--p", gen.p, "Covariate count")->capture_default_str();
    gen_data->add_option("--m", gen.m, "Outcome count")->capture_default_str();
    gen_data->add_option("--r", gen.r, "Effect rank")->capture_default_str();
    gen_data->add_option("--rho1", gen.rho1, "Covariate equicorrelation")->capture_default_str();
    gen_data->add_option("--rho2", gen.rho2, "Error equicorrelation")->capture_default_str();
    gen_data->add_option("--assignment", gen_assignment, "rct|observational")
        ->capture_default_str();
    gen_data->add_option("--replications", gen.replications, "Replication count")
        ->capture_default_str();
    gen_data->add_flag("--freeze-truth", gen.freeze_truth,
                       "Reuse the replication-0 truth for all replications");
    gen_data->add_option("--seed", gen.master_seed, "Master seed")->required();
    gen_data->add_option("--out", gen_out, "Output directory")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        if (sim->parsed()) {
            study.methods = parse_methods(study_methods);
            study.assignment_list = parse_assignments(study_assignments);
            rrhte::run_simulation_study(study);
        } else if (analyze->parsed()) {
            for (const std::string& name : outcomes_plain) {
                real.outcome_columns.push_back(name);
                real.dichotomize.push_back(false);
            }
            for (const std::string& name : outcomes_median) {
                real.outcome_columns.push_back(name);
                real.dichotomize.push_back(true);
            }
            real.propensity = parse_propensity(propensity_mode, propensity_constant);
            rrhte::run_real_data(real);
        } else if (gen_data->parsed()) {
            auto mode = rrhte::assignment_from_string(gen_assignment);
            if (!mode)
                throw rrhte::ValidationError("unknown assignment '" + gen_assignment + "'");
            gen.assignment = *mode;
            rrhte::dump_datasets(gen, gen_out);
        }
    } catch (const rrhte::ValidationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
