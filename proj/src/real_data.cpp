#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <set>
#include <string>

#include "rrhte/csv.hpp"
#include "rrhte/study.hpp"

namespace rrhte {

namespace fs = std::filesystem;

namespace {

double median_of(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    std::size_t n = v.size();
    return n % 2 == 1 ? v[n / 2] : (v[n / 2 - 1] + v[n / 2]) / 2.0;
}

std::string cell_context(const std::string& column, std::size_t row) {
    return "row " + std::to_string(row + 1) + ", column '" + column + "'";
}

std::ofstream open_out(const fs::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ValidationError("cannot write '" + path.string() + "'");
    return out;
}

void write_loadings(const fs::path& path, const std::vector<std::string>& labels,
                    const std::string& label_name, const MatrixXd& M, const char* prefix,
                    double blank_below = -1.0) {
    auto out = open_out(path);
    std::string header = label_name;
    for (Eigen::Index k = 1; k <= M.cols(); ++k)
        header += "," + std::string(prefix) + std::to_string(k);
    out << header << '\n';
    for (Eigen::Index i = 0; i < M.rows(); ++i) {
        std::string row = labels[static_cast<std::size_t>(i)];
        for (Eigen::Index k = 0; k < M.cols(); ++k) {
            row += ',';
            if (!(blank_below >= 0.0 && std::abs(M(i, k)) < blank_below))
                row += csv::format(M(i, k));
        }
        out << row << '\n';
    }
}

void write_fit_outputs(const RealDataConfig& config, const std::string& suffix,
                       const FitResult& fit, const MatrixXd& effects) {
    fs::path dir(config.out_dir);
    write_loadings(dir / ("V" + suffix + ".csv"), config.outcome_columns, "outcome", fit.coeffs.V,
                   "v");
    write_loadings(dir / ("W" + suffix + ".csv"), config.covariate_columns, "covariate",
                   fit.coeffs.W, "w");
    write_loadings(dir / ("W_thresholded" + suffix + ".csv"), config.covariate_columns,
                   "covariate", fit.coeffs.W, "w", config.loading_threshold);

    auto eff = open_out(dir / ("effects" + suffix + ".csv"));
    std::string header = "id";
    for (const std::string& name : config.outcome_columns) header += ',' + name;
    header += ",score";
    eff << header << '\n';
    for (Eigen::Index i = 0; i < effects.rows(); ++i) {
        std::string row = std::to_string(i + 1);
        double score = 0.0;
        for (Eigen::Index j = 0; j < effects.cols(); ++j) {
            row += ',' + csv::format(effects(i, j));
            score += effects(i, j);
        }
        row += ',' + csv::format(score);
        eff << row << '\n';
    }

    auto meta = open_out(dir / ("fit_meta" + suffix + ".csv"));
    meta << "iteration,objective,converged\n";
    for (std::size_t k = 0; k < fit.objective_trace.size(); ++k)
        meta << k << ',' << csv::format(fit.objective_trace[k]) << ','
             << (fit.converged ? "1" : "0") << '\n';
}

}  // namespace

TrialData load_dataset_csv(const RealDataConfig& config) {
    if (config.outcome_columns.empty())
        throw ValidationError("analyze: at least one outcome column required");
    if (config.covariate_columns.empty())
        throw ValidationError("analyze: at least one covariate column required");
    if (config.dichotomize.size() != config.outcome_columns.size())
        throw ValidationError("analyze: dichotomize flags must match outcome columns");
    std::set<std::string> seen{config.treatment_column};
    for (const auto& list : {config.outcome_columns, config.covariate_columns})
        for (const std::string& name : list)
            if (!seen.insert(name).second)
                throw ValidationError("analyze: column '" + name + "' used in two roles");

    csv::Table table = csv::read_file(config.csv_path);
    const std::size_t n = table.rows.size();
    if (n < 2) throw DegenerateInputError("analyze: need at least 2 data rows");

    // treatment: exactly two levels, the configured one maps to +1
    std::size_t t_col = table.column(config.treatment_column);
    std::set<std::string> levels;
    for (const auto& row : table.rows) levels.insert(row[t_col]);
    if (levels.size() != 2)
        throw ValidationError("analyze: treatment column '" + config.treatment_column + "' has " +
                              std::to_string(levels.size()) + " distinct values, expected 2");
    if (!levels.count(config.treatment_positive_level))
        throw ValidationError("analyze: treatment level '" + config.treatment_positive_level +
                              "' not present in column '" + config.treatment_column + "'");
    VectorXd t(n);
    for (std::size_t i = 0; i < n; ++i)
        t(static_cast<Eigen::Index>(i)) =
            table.rows[i][t_col] == config.treatment_positive_level ? 1.0 : -1.0;

    MatrixXd Y(n, config.outcome_columns.size());
    for (std::size_t j = 0; j < config.outcome_columns.size(); ++j) {
        const std::string& name = config.outcome_columns[j];
        std::size_t col = table.column(name);
        std::vector<double> values(n);
        for (std::size_t i = 0; i < n; ++i)
            values[i] = csv::parse_double(table.rows[i][col], cell_context(name, i));
        if (config.dichotomize[j]) {
            double med = median_of(values);
            for (std::size_t i = 0; i < n; ++i)
                Y(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
                    values[i] > med ? 1.0 : 0.0;
        } else {
            for (std::size_t i = 0; i < n; ++i) {
                if (values[i] != 0.0 && values[i] != 1.0)
                    throw ValidationError(cell_context(name, i) +
                                          ": outcome must be 0/1 (or use median dichotomization)");
                Y(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = values[i];
            }
        }
        double lo = Y.col(static_cast<Eigen::Index>(j)).minCoeff();
        double hi = Y.col(static_cast<Eigen::Index>(j)).maxCoeff();
        if (lo == hi)
            throw ValidationError("analyze: outcome '" + name +
                                  "' is constant after dichotomization");
    }

    MatrixXd X_raw(n, config.covariate_columns.size());
    for (std::size_t c = 0; c < config.covariate_columns.size(); ++c) {
        const std::string& name = config.covariate_columns[c];
        std::size_t col = table.column(name);
        for (std::size_t i = 0; i < n; ++i)
            X_raw(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(c)) =
                csv::parse_double(table.rows[i][col], cell_context(name, i));
    }
    MatrixXd X = center_columns(X_raw);
    if (config.standardize) {
        for (Eigen::Index c = 0; c < X.cols(); ++c) {
            double sd = std::sqrt(X.col(c).squaredNorm() / static_cast<double>(n - 1));
            if (sd == 0.0)
                throw ValidationError("analyze: covariate '" +
                                      config.covariate_columns[static_cast<std::size_t>(c)] +
                                      "' is constant, cannot standardize");
            X.col(c) /= sd;
        }
    }

    PropensityModel model = estimate_propensity(X, t, config.propensity);
    VectorXd pi = model.predict(X);
    return TrialData(std::move(X), std::move(Y), std::move(t), std::move(pi));
}

void run_real_data(const RealDataConfig& config) {
    if (config.out_dir.empty()) throw ValidationError("analyze: output directory required");
    TrialData data = load_dataset_csv(config);
    const auto p = data.p(), m = data.m();
    if (config.rank < 1 || config.rank > std::min(p, m))
        throw ValidationError("analyze: rank must lie in [1, min(p, m)]");
    if (!(config.loading_threshold >= 0.0))
        throw ValidationError("analyze: loading threshold must be nonnegative");
    fs::create_directories(config.out_dir);

    SolverOptions opt = config.solver;
    opt.rank = config.rank;
    FitResult fit = fit_r3w(data, opt);
    write_fit_outputs(config, "", fit, raw_effect(fit.coeffs, data.X));

    if (config.with_r3amod) {
        FitResult fit_a = fit_r3a(data, opt);
        write_fit_outputs(config, "_r3amod", fit_a,
                          corrected_effect(fit_a.coeffs, data.X, data.pi));
    }
}

}  // namespace rrhte
