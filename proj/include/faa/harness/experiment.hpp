// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "faa/ao_driver.hpp"
#include "faa/harness/config.hpp"
#include "faa/harness/csv.hpp"
#include "faa/harness/parallel.hpp"
#include "faa/rng.hpp"

#include <cmath>
#include <cstdint>
#include <map>
#include <ostream>
#include <string>
#include <tuple>
#include <vector>

namespace faa {

// Draw order from the per-trial generator: Bob's paths, each eavesdropper's
// paths in order, then one CSI error direction per eavesdropper. Eavesdropper
// i therefore sees the same paths for every M >= i.
inline Scenario make_scenario(const ExperimentConfig &cell, DeformationModel model, int trial) {
    const std::uint64_t seed = cell.base_seed + static_cast<std::uint64_t>(trial);
    Xoshiro256 rng(seed);
    PathStatistics stats;
    stats.g0_linear = cell.g0_linear();
    stats.pathloss_exponent = cell.alpha_pl;

    ArrayLayout layout(cell.n_h, cell.n_v, cell.spacing_m(), model);
    Scenario sc{layout,
                cell.omni ? ElementPattern::omni() : ElementPattern::directional(cell.kappa),
                cell.lambda_m,
                cell.p_max_w(),
                cell.sigma2_w(),
                sample_paths(rng, cell.d_bob_m, cell.num_paths, stats),
                {},
                cell.xi,
                {},
                seed};
    for (int i = 0; i < cell.m_eves; ++i) sc.eves.push_back(sample_paths(rng, cell.d_eve_m, cell.num_paths, stats));
    for (int i = 0; i < cell.m_eves; ++i) sc.error_directions.push_back(draw_error_direction(rng, layout.size()));
    return sc;
}

struct ResultRow {
    DeformationModel model;
    Scheme scheme;
    SweepAxis axis;
    double value;
    int trial;
    std::uint64_t seed;
    double r_s;
    bool converged;
    int outer_iterations;
    bool failed;
};

struct SummaryRow {
    DeformationModel model;
    Scheme scheme;
    SweepAxis axis;
    double value;
    int n;
    double mean_r_s;
    double std_err;
};

// One unit of work: a (model, scheme, value, trial) cell, in output order.
struct TrialTask {
    DeformationModel model;
    Scheme scheme;
    double value;
    int trial;
};

inline std::vector<TrialTask> enumerate_tasks(const ExperimentConfig &cfg) {
    std::vector<TrialTask> tasks;
    for (auto model : cfg.models)
        for (auto scheme : cfg.schemes)
            for (double value : cfg.axis_values())
                for (int t = 0; t < cfg.n_mc; ++t) tasks.push_back({model, scheme, value, t});
    return tasks;
}

inline AoTrace run_task(const ExperimentConfig &cfg, const TrialTask &task) {
    const ExperimentConfig cell = cfg.at(task.value);
    try {
        return run_ao(make_scenario(cell, task.model, task.trial), task.scheme, cell.ao, cell.pga);
    } catch (const std::exception &e) {
        AoTrace failed;
        failed.failed = true;
        failed.diagnostic = e.what();
        return failed;
    }
}

inline std::vector<ResultRow> run_simulation(const ExperimentConfig &cfg, int jobs = 1) {
    const auto tasks = enumerate_tasks(cfg);
    std::vector<ResultRow> rows(tasks.size());
    parallel_for(tasks.size(), jobs, [&](std::size_t i) {
        const auto &t = tasks[i];
        const AoTrace trace = run_task(cfg, t);
        rows[i] = {t.model,
                   t.scheme,
                   cfg.sweep.axis,
                   t.value,
                   t.trial,
                   cfg.base_seed + static_cast<std::uint64_t>(t.trial),
                   trace.final_rate(),
                   trace.converged,
                   trace.outer_iterations(),
                   trace.failed};
    });
    return rows;
}

// Mean and standard error (sample standard deviation / sqrt(n)) per
// (model, scheme, value) over rows that did not fail. Cell order follows the
// first appearance in `rows`.
inline std::vector<SummaryRow> summarize(const std::vector<ResultRow> &rows) {
    using Key = std::tuple<int, int, double>;
    std::map<Key, std::size_t> index;
    std::vector<SummaryRow> out;
    std::vector<std::vector<double>> samples;
    for (const auto &r : rows) {
        const Key key{static_cast<int>(r.model), static_cast<int>(r.scheme), r.value};
        auto [it, inserted] = index.try_emplace(key, out.size());
        if (inserted) {
            out.push_back({r.model, r.scheme, r.axis, r.value, 0, 0.0, 0.0});
            samples.emplace_back();
        }
        if (!r.failed) samples[it->second].push_back(r.r_s);
    }
    for (std::size_t c = 0; c < out.size(); ++c) {
        const auto &x = samples[c];
        const auto n = static_cast<double>(x.size());
        out[c].n = static_cast<int>(x.size());
        if (x.empty()) {
            out[c].mean_r_s = std::nan("");
            out[c].std_err = std::nan("");
            continue;
        }
        double sum = 0.0;
        for (double v : x) sum += v;
        const double mean = sum / n;
        double ss = 0.0;
        for (double v : x) ss += (v - mean) * (v - mean);
        out[c].mean_r_s = mean;
        out[c].std_err = x.size() > 1 ? std::sqrt(ss / (n - 1.0)) / std::sqrt(n) : 0.0;
    }
    return out;
}

inline void write_results(std::ostream &out, const std::vector<ResultRow> &rows) {
    csv::Writer w(out);
    w.row("model", "scheme", "axis", "value", "trial", "seed", "r_s", "converged", "outer_iterations", "status");
    for (const auto &r : rows)
        w.row(to_string(r.model), to_string(r.scheme), to_string(r.axis), r.value, r.trial, r.seed, r.r_s, r.converged,
              r.outer_iterations, r.failed ? "failed" : "ok");
}

inline void write_summary(std::ostream &out, const std::vector<SummaryRow> &rows) {
    csv::Writer w(out);
    w.row("model", "scheme", "axis", "value", "n", "mean_r_s", "std_err");
    for (const auto &r : rows)
        w.row(to_string(r.model), to_string(r.scheme), to_string(r.axis), r.value, r.n, r.mean_r_s, r.std_err);
}

struct ConvergenceRow {
    DeformationModel model;
    Scheme scheme;
    SweepAxis axis;
    double value;
    int trial;
    std::uint64_t seed;
    AoIterate iterate;
    bool converged;
};

struct ConvergenceRun {
    std::vector<ConvergenceRow> rows;
    int failed_trials = 0;
};

inline ConvergenceRun run_convergence(const ExperimentConfig &cfg, int jobs = 1) {
    const auto tasks = enumerate_tasks(cfg);
    std::vector<AoTrace> traces(tasks.size());
    parallel_for(tasks.size(), jobs, [&](std::size_t i) { traces[i] = run_task(cfg, tasks[i]); });
    ConvergenceRun out;
    for (std::size_t i = 0; i < tasks.size(); ++i) {
        const auto &t = tasks[i];
        if (traces[i].failed) ++out.failed_trials;
        for (const auto &it : traces[i].iterations)
            out.rows.push_back({t.model, t.scheme, cfg.sweep.axis, t.value, t.trial,
                                cfg.base_seed + static_cast<std::uint64_t>(t.trial), it, traces[i].converged});
    }
    return out;
}

inline void write_convergence(std::ostream &out, const std::vector<ConvergenceRow> &rows) {
    csv::Writer w(out);
    w.row("model", "scheme", "axis", "value", "trial", "seed", "k", "psi", "r_s", "r_s_design", "pga_evaluations",
          "converged");
    for (const auto &r : rows)
        w.row(to_string(r.model), to_string(r.scheme), to_string(r.axis), r.value, r.trial, r.seed, r.iterate.k,
              r.iterate.psi, r.iterate.r_s, r.iterate.r_s_design, r.iterate.pga_evaluations, r.converged);
}

} // namespace faa
