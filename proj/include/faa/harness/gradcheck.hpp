// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "faa/closed_form.hpp"
#include "faa/harness/csv.hpp"
#include "faa/harness/experiment.hpp"
#include "faa/shape_optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <string_view>
#include <vector>

namespace faa {

// |a - b| / max(|a|, |b|, 1e-3 |f|): the floor keeps stationary points, where
// both slopes are tiny relative to the function value, from inflating the ratio.
inline double gradient_relative_error(double a, double b, double f) {
    const double scale = std::max({std::abs(a), std::abs(b), 1e-3 * std::abs(f)});
    return scale == 0.0 ? 0.0 : std::abs(a - b) / scale;
}

enum class GradQuantity { Bob, Eve, Ratio };

inline std::string_view to_string(GradQuantity q) {
    switch (q) {
    case GradQuantity::Bob: return "S_B";
    case GradQuantity::Eve: return "S_E";
    case GradQuantity::Ratio: return "F";
    }
    return "?";
}

struct GradcheckRow {
    DeformationModel model;
    int case_index;
    GradQuantity quantity;
    double psi;
    double value;
    double analytic;
    double finite_difference;
    double rel_err;
    // Ratio rows only: per-model closed form against the assembled gradient.
    double closed_form = std::nan("");
    double closed_form_rel_err = std::nan("");
};

struct GradcheckCase {
    ShapeObjectiveContext ctx;
    double psi;
};

// Scenario from the trial generator plus an independent generator for the
// evaluation point and a random full-power beamformer. psi keeps a margin of
// `step` from both bounds so the central difference stays feasible.
inline GradcheckCase make_gradcheck_case(const ExperimentConfig &cfg, DeformationModel model, int index, double step) {
    const ExperimentConfig cell = cfg.at(cfg.axis_values().front());
    const Scenario sc = make_scenario(cell, model, index);
    Xoshiro256 rng(~(cell.base_seed + static_cast<std::uint64_t>(index)));
    const double lo = sc.layout.psi_min_rad() + step;
    const double hi = sc.layout.psi_max_rad() - step;
    if (!(lo < hi)) throw DomainError("gradcheck: step too large for the shape interval");
    const double psi = rng.uniform(lo, hi);
    CVector w(sc.layout.size());
    for (Eigen::Index n = 0; n < w.size(); ++n) w(n) = rng.complex_normal(1.0);
    w *= std::sqrt(sc.p_max_w) / w.norm();
    ShapeObjectiveContext ctx{sc.layout, sc.pattern, sc.wavelength_m, w, sc.bob, sc.eves, sc.sigma2_w, {}, false};
    return {std::move(ctx), psi};
}

inline std::vector<GradcheckRow> run_gradcheck(const ExperimentConfig &cfg, int n_cases, double step, int jobs = 1) {
    if (n_cases < 1) throw DomainError("gradcheck: n_cases must be >= 1");
    if (!(step > 0.0)) throw DomainError("gradcheck: step must be > 0");
    const auto n_models = cfg.models.size();
    std::vector<std::vector<GradcheckRow>> per(n_models * static_cast<std::size_t>(n_cases));
    parallel_for(per.size(), jobs, [&](std::size_t i) {
        const auto model = cfg.models[i / static_cast<std::size_t>(n_cases)];
        const int index = static_cast<int>(i % static_cast<std::size_t>(n_cases));
        const auto gc = make_gradcheck_case(cfg, model, index, step);
        const auto at = evaluate_shape(gc.ctx, gc.psi);
        const auto up = evaluate_shape(gc.ctx, gc.psi + step);
        const auto down = evaluate_shape(gc.ctx, gc.psi - step);
        auto row = [&](GradQuantity q, double value, double analytic, double hi, double lo) {
            const double fd = (hi - lo) / (2.0 * step);
            return GradcheckRow{model, index, q, gc.psi, value, analytic, fd, gradient_relative_error(analytic, fd, value)};
        };
        auto &out = per[i];
        out.push_back(row(GradQuantity::Bob, at.s_b, at.ds_b, up.s_b, down.s_b));
        out.push_back(row(GradQuantity::Eve, at.s_e, at.ds_e, up.s_e, down.s_e));
        auto ratio = row(GradQuantity::Ratio, at.F, at.dF, up.F, down.F);
        if (!gc.ctx.pattern.is_omni() && gc.ctx.eves.size() == 1) {
            const closed_form::Setup setup{model, gc.ctx.layout.n_h(), gc.ctx.layout.n_v(), gc.ctx.layout.spacing_m(),
                                           gc.ctx.wavelength_m, gc.ctx.pattern.kappa};
            ratio.closed_form =
                closed_form::gradient(setup, gc.ctx.w, gc.ctx.bob, gc.ctx.eves[0], gc.ctx.sigma2, gc.psi);
            ratio.closed_form_rel_err = gradient_relative_error(at.dF, ratio.closed_form, at.F);
        }
        out.push_back(ratio);
    });
    std::vector<GradcheckRow> rows;
    for (auto &v : per) rows.insert(rows.end(), v.begin(), v.end());
    return rows;
}

inline void write_gradcheck(std::ostream &out, const std::vector<GradcheckRow> &rows) {
    csv::Writer w(out);
    w.row("model", "case", "quantity", "psi", "value", "analytic", "finite_difference", "rel_err", "closed_form",
          "closed_form_rel_err");
    for (const auto &r : rows)
        w.row(to_string(r.model), r.case_index, to_string(r.quantity), r.psi, r.value, r.analytic, r.finite_difference,
              r.rel_err, r.closed_form, r.closed_form_rel_err);
}

} // namespace faa
