// SPDX-License-Identifier: Apache-2.0
#include "faa/faa.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

namespace {

constexpr int kExitOk = 0;
constexpr int kExitValidation = 1;
constexpr int kExitNumerical = 2;

struct CommonFlags {
    std::string config;
    std::string out;
    std::optional<std::uint64_t> seed;
    std::optional<int> trials;
    int jobs = 1;
};

void add_common(CLI::App *cmd, CommonFlags &flags) {
    cmd->add_option("--config", flags.config, "JSON experiment configuration (reference defaults if omitted)");
    cmd->add_option("--out", flags.out, "output CSV path")->required();
    cmd->add_option("--seed", flags.seed, "override base_seed");
    cmd->add_option("--trials", flags.trials, "override N_MC (number of cases for gradcheck)")->check(CLI::PositiveNumber);
    cmd->add_option("--jobs", flags.jobs, "worker threads (0 = hardware concurrency)")->check(CLI::NonNegativeNumber);
}

faa::ExperimentConfig resolve(const CommonFlags &flags) {
    faa::ExperimentConfig cfg = flags.config.empty() ? faa::parse_config(nlohmann::json::object())
                                                     : faa::load_config(flags.config);
    if (flags.seed) cfg.base_seed = *flags.seed;
    if (flags.trials) cfg.n_mc = *flags.trials;
    cfg.validate();
    return cfg;
}

std::ofstream open_out(const std::string &path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw faa::ConfigError("--out: cannot open " + path);
    return out;
}

std::string summary_path(const std::string &out) {
    const std::string ext = ".csv";
    if (out.size() >= ext.size() && out.compare(out.size() - ext.size(), ext.size(), ext) == 0)
        return out.substr(0, out.size() - ext.size()) + "_summary.csv";
    return out + "_summary.csv";
}

int simulate(const CommonFlags &flags) {
    const auto cfg = resolve(flags);
    const auto rows = faa::run_simulation(cfg, flags.jobs);
    {
        auto out = open_out(flags.out);
        faa::write_results(out, rows);
    }
    {
        auto out = open_out(summary_path(flags.out));
        faa::write_summary(out, faa::summarize(rows));
    }
    const auto failed = std::count_if(rows.begin(), rows.end(), [](const auto &r) { return r.failed; });
    if (failed > 0) {
        std::cerr << "simulate: " << failed << " of " << rows.size() << " trials failed (status=failed)\n";
        return kExitNumerical;
    }
    return kExitOk;
}

int convergence(const CommonFlags &flags) {
    const auto cfg = resolve(flags);
    const auto run = faa::run_convergence(cfg, flags.jobs);
    auto out = open_out(flags.out);
    faa::write_convergence(out, run.rows);
    if (run.failed_trials > 0) {
        std::cerr << "convergence: " << run.failed_trials << " trials failed\n";
        return kExitNumerical;
    }
    return kExitOk;
}

int gradcheck(const CommonFlags &flags, double step, double threshold) {
    auto cfg = resolve(flags);
    if (flags.config.empty())
        cfg.models = {faa::DeformationModel::Rotate, faa::DeformationModel::Bend, faa::DeformationModel::Fold};
    const int cases = flags.trials.value_or(100);
    const auto rows = faa::run_gradcheck(cfg, cases, step, flags.jobs);
    {
        auto out = open_out(flags.out);
        faa::write_gradcheck(out, rows);
    }
    int violations = 0;
    for (auto model : cfg.models) {
        for (auto q : {faa::GradQuantity::Bob, faa::GradQuantity::Eve, faa::GradQuantity::Ratio}) {
            const faa::GradcheckRow *worst = nullptr;
            for (const auto &r : rows)
                if (r.model == model && r.quantity == q && (!worst || r.rel_err > worst->rel_err)) worst = &r;
            if (!worst) continue;
            const bool bad = !(worst->rel_err < threshold);
            violations += bad;
            std::cout << (bad ? "FAIL " : "ok   ") << faa::to_string(model) << ' ' << faa::to_string(q)
                      << " max_rel_err=" << worst->rel_err << " (case " << worst->case_index << ", psi=" << worst->psi
                      << ")\n";
        }
    }
    return violations == 0 ? kExitOk : kExitNumerical;
}

} // namespace

int main(int argc, char **argv) {
    CLI::App app{"Flexible-array secrecy experiments"};
    app.require_subcommand(1);

    CommonFlags sim_flags, conv_flags, grad_flags;
    double step = 1e-6;
    double threshold = 1e-5;
    auto *sim = app.add_subcommand("simulate", "Monte Carlo sweep; writes raw and _summary CSVs");
    add_common(sim, sim_flags);
    auto *conv = app.add_subcommand("convergence", "per-iteration AO traces");
    add_common(conv, conv_flags);
    auto *grad = app.add_subcommand("gradcheck", "analytic vs central-difference shape gradients");
    add_common(grad, grad_flags);
    grad->add_option("--step", step, "central-difference step, rad")->check(CLI::PositiveNumber);
    grad->add_option("--threshold", threshold, "maximum accepted relative error")->check(CLI::PositiveNumber);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError &e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitValidation;
    }

    try {
        if (*sim) return simulate(sim_flags);
        if (*conv) return convergence(conv_flags);
        if (*grad) return gradcheck(grad_flags, step, threshold);
    } catch (const faa::NumericalError &e) {
        std::cerr << "numerical failure: " << e.what() << '\n';
        return kExitNumerical;
    } catch (const faa::DomainError &e) {
        std::cerr << "invalid input: " << e.what() << '\n';
        return kExitValidation;
    } catch (const std::exception &e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitNumerical;
    }
    return kExitValidation;
}
