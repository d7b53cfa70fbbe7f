#include "rrhte/study.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <thread>

#include "rrhte/baselines.hpp"
#include "rrhte/csv.hpp"
#include "rrhte/evaluation.hpp"
#include "rrhte/rng.hpp"

namespace rrhte {

namespace fs = std::filesystem;

std::vector<ScenarioCell> enumerate_grid(const StudyConfig& config) {
    if (config.n_list.empty() || config.p_list.empty() || config.m_list.empty() ||
        config.r_list.empty() || config.rho1_list.empty() || config.rho2_list.empty() ||
        config.assignment_list.empty())
        throw ValidationError("study: every grid list must be non-empty");
    std::vector<ScenarioCell> grid;
    int id = 0;
    for (int n : config.n_list)
        for (int p : config.p_list)
            for (int m : config.m_list)
                for (int r : config.r_list)
                    for (double rho1 : config.rho1_list)
                        for (double rho2 : config.rho2_list)
                            for (Assignment assignment : config.assignment_list) {
                                if (r > std::min(p, m)) continue;  // e.g. r=5 pairs with m=10
                                ScenarioConfig sc;
                                sc.n = n;
                                sc.p = p;
                                sc.m = m;
                                sc.r = r;
                                sc.rho1 = rho1;
                                sc.rho2 = rho2;
                                sc.assignment = assignment;
                                sc.replications = config.replications;
                                sc.master_seed = config.master_seed;
                                grid.push_back({id++, sc});
                            }
    if (grid.empty()) throw ValidationError("study: grid is empty after dropping r > min(p, m)");
    return grid;
}

namespace {

struct MethodRun {
    MatrixXd H;
    int iterations = 0;
    bool converged = true;
};

MethodRun run_method(const SimulatedDataset& ds, Method method, SolverOptions opt) {
    opt.quiet = true;
    auto columnwise = [](const ColumnwiseFit& fit) {
        int iters = 0;
        bool conv = true;
        for (std::size_t j = 0; j < fit.iterations.size(); ++j) {
            iters = std::max(iters, fit.iterations[j]);
            conv = conv && fit.converged[j];
        }
        return std::pair<int, bool>{iters, conv};
    };
    switch (method) {
        case Method::R3W: {
            FitResult fit = fit_r3w(ds.data, opt);
            return {raw_effect(fit.coeffs, ds.data.X), fit.iterations, fit.converged};
        }
        case Method::R3A: {
            FitResult fit = fit_r3a(ds.data, opt);
            return {raw_effect(fit.coeffs, ds.data.X), fit.iterations, fit.converged};
        }
        case Method::R3Amod: {
            FitResult fit = fit_r3a(ds.data, opt);
            return {corrected_effect(fit.coeffs, ds.data.X, ds.data.pi), fit.iterations,
                    fit.converged};
        }
        case Method::MW: {
            ColumnwiseFit fit = fit_mw(ds.data, opt);
            auto [iters, conv] = columnwise(fit);
            return {ds.data.X * fit.Gamma, iters, conv};
        }
        case Method::MA: {
            ColumnwiseFit fit = fit_ma(ds.data, opt);
            auto [iters, conv] = columnwise(fit);
            return {ds.data.X * fit.Gamma, iters, conv};
        }
        case Method::MAmod: {
            ColumnwiseFit fit = fit_ma(ds.data, opt);
            auto [iters, conv] = columnwise(fit);
            return {corrected_effect_univariate(fit.Gamma, ds.data.X, ds.data.pi), iters, conv};
        }
        case Method::Full: {
            FullModelFit fit = fit_full(ds.data);
            int iters = 0;
            for (int k : fit.irls_iterations) iters = std::max(iters, k);
            return {full_effect(fit, ds.data.X), iters, true};
        }
    }
    throw ValidationError("study: unknown method");
}

struct TaskOutcome {
    bool ok = false;
    double mse_value = 0, fpr = 0, fnr = 0, auc = 0;
    int iterations = 0;
    bool converged = false;
    double seconds = 0;
    std::string error;
    VectorXd s_hat, s_true;
};

struct Task {
    int cell_index;
    int replication;
    Method method;
};

TaskOutcome run_task(const StudyConfig& config, const ScenarioCell& cell, const Task& task) {
    TaskOutcome out;
    auto t0 = std::chrono::steady_clock::now();
    try {
        SimulatedDataset ds = generate_scenario(cell.config, task.replication);
        SolverOptions opt;
        opt.rank = cell.config.r;
        opt.tol = config.solver_tol;
        opt.max_iter = config.solver_max_iter;
        opt.init_seed =
            derive_seed(config.master_seed,
                        {5, static_cast<std::uint64_t>(cell.scenario_id),
                         static_cast<std::uint64_t>(task.replication),
                         static_cast<std::uint64_t>(task.method)});
        MethodRun run = run_method(ds, task.method, opt);
        out.s_hat = subject_scores(run.H);
        out.s_true = subject_scores(ds.H_true);
        out.mse_value = mse(run.H, ds.H_true);
        ClassificationRates rates = classification_rates(out.s_hat, out.s_true, 0.0);
        out.fpr = rates.fpr;
        out.fnr = rates.fnr;
        out.auc = roc_and_auc(out.s_hat, out.s_true).auc;
        out.iterations = run.iterations;
        out.converged = run.converged;
        out.ok = true;
    } catch (const std::exception& e) {
        out.error = e.what();
    } catch (...) {
        out.error = "unknown error";
    }
    out.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return out;
}

std::string sanitize_message(std::string msg) {
    for (char& c : msg)
        if (c == ',' || c == '\n' || c == '\r') c = ';';
    return msg;
}

// Type-7 (linear interpolation) sample quantile of a non-empty sample.
double quantile(std::vector<double> v, double q) {
    std::sort(v.begin(), v.end());
    double h = q * static_cast<double>(v.size() - 1);
    auto lo = static_cast<std::size_t>(h);
    if (lo + 1 >= v.size()) return v.back();
    double frac = h - static_cast<double>(lo);
    return v[lo] + frac * (v[lo + 1] - v[lo]);
}

std::ofstream open_out(const fs::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ValidationError("cannot write '" + path.string() + "'");
    return out;
}

void write_scenario_columns(std::string& row, const ScenarioCell& cell) {
    row += std::to_string(cell.scenario_id) + ',' + std::to_string(cell.config.n) + ',' +
           std::to_string(cell.config.p) + ',' + std::to_string(cell.config.m) + ',' +
           std::to_string(cell.config.r) + ',' + csv::format(cell.config.rho1) + ',' +
           csv::format(cell.config.rho2) + ',' + to_string(cell.config.assignment);
}

}  // namespace

void run_simulation_study(const StudyConfig& config) {
    if (config.methods.empty()) throw ValidationError("study: method set must be non-empty");
    if (config.replications < 1) throw ValidationError("study: replications must be positive");
    if (config.jobs < 1) throw ValidationError("study: jobs must be positive");
    if (config.out_dir.empty()) throw ValidationError("study: output directory required");
    std::vector<ScenarioCell> grid = enumerate_grid(config);
    fs::create_directories(config.out_dir);

    std::vector<Task> tasks;
    for (const ScenarioCell& cell : grid)
        for (int rep = 0; rep < config.replications; ++rep)
            for (Method method : config.methods)
                tasks.push_back({cell.scenario_id, rep, method});

    std::vector<TaskOutcome> outcomes(tasks.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        while (true) {
            std::size_t i = next.fetch_add(1);
            if (i >= tasks.size()) break;
            outcomes[i] = run_task(config, grid[static_cast<std::size_t>(tasks[i].cell_index)],
                                   tasks[i]);
        }
    };
    if (config.jobs == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        std::size_t count = std::min<std::size_t>(static_cast<std::size_t>(config.jobs),
                                                  tasks.size());
        pool.reserve(count);
        for (std::size_t k = 0; k < count; ++k) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }

    // results.csv / errors.csv in task enumeration order
    auto results = open_out(fs::path(config.out_dir) / "results.csv");
    results << "scenario_id,n,p,m,r,rho1,rho2,assignment,replication,method,"
               "mse,fpr,fnr,auc,iterations,converged,seconds\n";
    auto errors = open_out(fs::path(config.out_dir) / "errors.csv");
    errors << "scenario_id,replication,method,error\n";
    for (std::size_t i = 0; i < tasks.size(); ++i) {
        const Task& task = tasks[i];
        const TaskOutcome& out = outcomes[i];
        const ScenarioCell& cell = grid[static_cast<std::size_t>(task.cell_index)];
        if (!out.ok) {
            errors << cell.scenario_id << ',' << task.replication << ',' << to_string(task.method)
                   << ',' << sanitize_message(out.error) << '\n';
            continue;
        }
        std::string row;
        write_scenario_columns(row, cell);
        row += ',' + std::to_string(task.replication) + ',' + to_string(task.method) + ',' +
               csv::format(out.mse_value) + ',' + csv::format(out.fpr) + ',' +
               csv::format(out.fnr) + ',' + csv::format(out.auc) + ',' +
               std::to_string(out.iterations) + ',' + (out.converged ? "1" : "0") + ',' +
               csv::format(out.seconds);
        results << row << '\n';
    }
    results.close();
    errors.close();

    // summary.csv: per-cell, per-method medians and interquartile ranges
    auto summary = open_out(fs::path(config.out_dir) / "summary.csv");
    summary << "scenario_id,n,p,m,r,rho1,rho2,assignment,method,replications_ok,"
               "mse_median,mse_iqr,fpr_median,fpr_iqr,fnr_median,fnr_iqr,auc_median,auc_iqr\n";
    for (const ScenarioCell& cell : grid) {
        for (Method method : config.methods) {
            std::vector<double> mses, fprs, fnrs, aucs;
            for (std::size_t i = 0; i < tasks.size(); ++i) {
                if (tasks[i].cell_index != cell.scenario_id || tasks[i].method != method ||
                    !outcomes[i].ok)
                    continue;
                mses.push_back(outcomes[i].mse_value);
                fprs.push_back(outcomes[i].fpr);
                fnrs.push_back(outcomes[i].fnr);
                aucs.push_back(outcomes[i].auc);
            }
            std::string row;
            write_scenario_columns(row, cell);
            row += ',' + to_string(method) + ',' + std::to_string(mses.size());
            if (mses.empty()) {
                row += ",,,,,,,,";
                row.pop_back();
            } else {
                for (auto* v : {&mses, &fprs, &fnrs, &aucs}) {
                    row += ',' + csv::format(quantile(*v, 0.5)) + ',' +
                           csv::format(quantile(*v, 0.75) - quantile(*v, 0.25));
                }
            }
            summary << row << '\n';
        }
    }
    summary.close();

    // per-method ROC points pooled over replications within each scenario
    for (Method method : config.methods) {
        auto roc_out = open_out(fs::path(config.out_dir) / ("roc_" + to_string(method) + ".csv"));
        roc_out << "scenario_id,threshold,fpr,tpr\n";
        for (const ScenarioCell& cell : grid) {
            std::vector<double> pooled_hat, pooled_true;
            for (std::size_t i = 0; i < tasks.size(); ++i) {
                if (tasks[i].cell_index != cell.scenario_id || tasks[i].method != method ||
                    !outcomes[i].ok)
                    continue;
                const TaskOutcome& out = outcomes[i];
                pooled_hat.insert(pooled_hat.end(), out.s_hat.begin(), out.s_hat.end());
                pooled_true.insert(pooled_true.end(), out.s_true.begin(), out.s_true.end());
            }
            if (pooled_hat.empty()) continue;
            VectorXd s_hat = Eigen::Map<VectorXd>(pooled_hat.data(),
                                                  static_cast<Eigen::Index>(pooled_hat.size()));
            VectorXd s_true = Eigen::Map<VectorXd>(pooled_true.data(),
                                                   static_cast<Eigen::Index>(pooled_true.size()));
            RocCurve curve;
            try {
                curve = roc_and_auc(s_hat, s_true);
            } catch (const UndefinedRateError&) {
                continue;  // one-sided pooled truth; nothing to plot
            }
            for (const RocPoint& pt : curve.points)
                roc_out << cell.scenario_id << ',' << csv::format(pt.threshold) << ','
                        << csv::format(pt.fpr) << ',' << csv::format(pt.tpr) << '\n';
        }
    }
}

void dump_datasets(const ScenarioConfig& config, const std::string& out_dir) {
    if (out_dir.empty()) throw ValidationError("gen-data: output directory required");
    if (config.replications < 1) throw ValidationError("gen-data: replications must be positive");
    fs::create_directories(out_dir);
    for (int rep = 0; rep < config.replications; ++rep) {
        SimulatedDataset ds = generate_scenario(config, rep);
        auto data_out = open_out(fs::path(out_dir) / ("rep_" + std::to_string(rep) + ".csv"));
        std::string header = "id,t,pi";
        for (int j = 1; j <= config.m; ++j) header += ",y" + std::to_string(j);
        for (int c = 1; c <= config.p; ++c) header += ",x" + std::to_string(c);
        data_out << header << '\n';
        for (Eigen::Index i = 0; i < ds.data.n(); ++i) {
            std::string row = std::to_string(i + 1) + ',' +
                              std::to_string(static_cast<int>(ds.data.t(i))) + ',' +
                              csv::format(ds.data.pi(i));
            for (Eigen::Index j = 0; j < ds.data.m(); ++j)
                row += ',' + std::to_string(static_cast<int>(ds.data.Y(i, j)));
            for (Eigen::Index c = 0; c < ds.data.p(); ++c)
                row += ',' + csv::format(ds.data.X(i, c));
            data_out << row << '\n';
        }
        auto truth_out =
            open_out(fs::path(out_dir) / ("rep_" + std::to_string(rep) + "_truth.csv"));
        std::string theader = "id";
        for (int j = 1; j <= config.m; ++j) theader += ",h" + std::to_string(j);
        truth_out << theader << '\n';
        for (Eigen::Index i = 0; i < ds.H_true.rows(); ++i) {
            std::string row = std::to_string(i + 1);
            for (Eigen::Index j = 0; j < ds.H_true.cols(); ++j)
                row += ',' + csv::format(ds.H_true(i, j));
            truth_out << row << '\n';
        }
    }
}

}  // namespace rrhte
