// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "faa/channel.hpp"
#include "faa/common.hpp"
#include "faa/geometry.hpp"
#include "faa/radiation.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <vector>

namespace faa {

enum class StepRule { Adam, AdaGrad };

struct PgaOptions {
    double learning_rate = 0.01; // radians per unit normalized step
    double beta1 = 0.9;
    double beta2 = 0.999;
    int max_iter = 100;
    double tol_psi_rad = 1e-3 * kPi / 180.0;
    int n_starts = 4;
    double grad_cap = 1e6;
    StepRule rule = StepRule::Adam;
    double epsilon = 1e-8;
    // After the trajectories, locate the nearby root of the slope by
    // bracketing and bisection; the returned point then satisfies the
    // first-order condition instead of sitting inside the step oscillation.
    bool polish = true;
    double polish_tol_rad = 1e-12;
    bool record_trace = true;

    void validate() const {
        if (!(learning_rate > 0.0)) throw DomainError("PgaOptions: learning_rate must be > 0");
        if (!(beta1 > 0.0 && beta1 < 1.0) || !(beta2 > 0.0 && beta2 < 1.0))
            throw DomainError("PgaOptions: beta1, beta2 must lie in (0, 1)");
        if (max_iter < 1) throw DomainError("PgaOptions: max_iter must be >= 1");
        if (!(tol_psi_rad > 0.0)) throw DomainError("PgaOptions: tol_psi_rad must be > 0");
        if (n_starts < 1) throw DomainError("PgaOptions: n_starts must be >= 1");
        if (!(grad_cap > 0.0)) throw DomainError("PgaOptions: grad_cap must be > 0");
    }
};

// Everything F(psi) needs with the beamformer held fixed. When csi_errors is
// non-empty (one per eavesdropper) the optimizer only sees the estimates.
struct ShapeObjectiveContext {
    ArrayLayout layout;
    ElementPattern pattern;
    double wavelength_m;
    CVector w;
    PathSet bob;
    std::vector<PathSet> eves;
    double sigma2;
    std::vector<CsiError> csi_errors;
    bool force_colluding_path = false;
};

struct ShapeEvaluation {
    double F = 1.0;
    double dF = 0.0;
    double s_b = 0.0;
    double s_e = 0.0;
    double ds_b = 0.0;
    double ds_e = 0.0;
};

namespace detail {

inline double power_slope(const ChannelRealization &ch, const CVector &w) {
    // dS/dpsi = 2 Re{ (dh^H w) (w^H h) }
    return 2.0 * (ch.dh_dpsi.dot(w) * std::conj(ch.h.dot(w))).real();
}

inline ShapeEvaluation assemble_quotient(double sigma2, double s_b, double ds_b, double s_e, double ds_e) {
    ShapeEvaluation ev;
    ev.s_b = s_b;
    ev.s_e = s_e;
    ev.ds_b = ds_b;
    ev.ds_e = ds_e;
    const double num = sigma2 + s_b;
    const double den = sigma2 + s_e;
    ev.F = num / den;
    ev.dF = (ds_b * den - num * ds_e) / (den * den);
    return ev;
}

} // namespace detail

// Channels the optimizer designs against at psi: Bob's true channel and each
// eavesdropper's (possibly estimated) channel.
struct DesignChannels {
    ChannelRealization bob;
    std::vector<ChannelRealization> eves;
};

inline DesignChannels design_channels(const ShapeObjectiveContext &ctx, double psi) {
    const ArrayState state = array_state(ctx.layout, psi);
    DesignChannels out;
    out.bob = synthesize_channel(ctx.layout, state, ctx.pattern, ctx.bob, ctx.wavelength_m);
    out.eves.reserve(ctx.eves.size());
    for (std::size_t i = 0; i < ctx.eves.size(); ++i) {
        auto real = synthesize_channel(ctx.layout, state, ctx.pattern, ctx.eves[i], ctx.wavelength_m);
        if (!ctx.csi_errors.empty()) real = apply_csi_error(real, ctx.csi_errors.at(i));
        out.eves.push_back(std::move(real));
    }
    return out;
}

// F(psi) = (sigma2 + S_B) / (sigma2 + S_E) and dF/dpsi by the quotient rule.
inline ShapeEvaluation evaluate_shape(const ShapeObjectiveContext &ctx, double psi) {
    if (ctx.eves.empty()) throw DomainError("ShapeObjectiveContext: at least one eavesdropper required");
    const DesignChannels ch = design_channels(ctx, psi);
    const double s_b = std::norm(ch.bob.h.dot(ctx.w));
    const double ds_b = detail::power_slope(ch.bob, ctx.w);

    if (ch.eves.size() == 1 && !ctx.force_colluding_path) {
        const double s_e = std::norm(ch.eves[0].h.dot(ctx.w));
        const double ds_e = detail::power_slope(ch.eves[0], ctx.w);
        return detail::assemble_quotient(ctx.sigma2, s_b, ds_b, s_e, ds_e);
    }

    // Colluding: S_E = ||H_E^H w||^2, dS_E = 2 Re{ sum_i (dh_i^H w)(w^H h_i) }.
    const auto m = static_cast<Eigen::Index>(ch.eves.size());
    CMatrix h_e(ctx.layout.size(), m);
    CMatrix dh_e(ctx.layout.size(), m);
    for (Eigen::Index i = 0; i < m; ++i) {
        h_e.col(i) = ch.eves[i].h;
        dh_e.col(i) = ch.eves[i].dh_dpsi;
    }
    const CVector v = h_e.adjoint() * ctx.w;
    const CVector dv = dh_e.adjoint() * ctx.w;
    const double s_e = v.squaredNorm();
    const double ds_e = 2.0 * v.dot(dv).real();
    return detail::assemble_quotient(ctx.sigma2, s_b, ds_b, s_e, ds_e);
}

inline double objective_F(const ShapeObjectiveContext &ctx, double psi) { return evaluate_shape(ctx, psi).F; }

inline double gradient_F(const ShapeObjectiveContext &ctx, double psi, double grad_cap = 1e6) {
    return std::clamp(evaluate_shape(ctx, psi).dF, -grad_cap, grad_cap);
}

struct ObjectiveSample {
    double value;
    double slope;
};

struct PgaIterate {
    int start;
    int t;
    double psi;
    double F;
};

struct PgaResult {
    double psi_star = 0.0;
    double F_star = 0.0;
    double slope_star = 0.0;
    int best_start = 0;
    int evaluations = 0;
    std::vector<double> starts;
    std::vector<PgaIterate> trace;
};

// Start set: the warm start (if any), the interval midpoint, then n_starts
// cell centers of [psi_min, psi_max]. Duplicates are dropped.
inline std::vector<double> pga_start_points(double psi_min, double psi_max, int n_starts,
                                            std::optional<double> warm_start = std::nullopt) {
    std::vector<double> starts;
    auto push = [&](double p) {
        p = std::max(psi_min, std::min(p, psi_max));
        for (double q : starts)
            if (std::abs(q - p) <= 1e-12) return;
        starts.push_back(p);
    };
    if (warm_start) push(*warm_start);
    push(0.5 * (psi_min + psi_max));
    for (int i = 0; i < n_starts; ++i) push(psi_min + (2.0 * i + 1.0) * (psi_max - psi_min) / (2.0 * n_starts));
    return starts;
}

// Multi-start projected gradient ascent on a scalar objective. Each start runs
// the configured step rule with the iterate projected onto the interval; the
// best point visited over all trajectories is returned, ties resolved in favour
// of the earlier start.
template <class Objective>
PgaResult pga_maximize(Objective &&objective, double psi_min, double psi_max, const PgaOptions &options,
                       std::optional<double> warm_start = std::nullopt) {
    options.validate();
    PgaResult out;
    out.starts = pga_start_points(psi_min, psi_max, options.n_starts, warm_start);
    bool have_best = false;
    auto project = [&](double p) { return std::max(psi_min, std::min(p, psi_max)); };
    auto consider = [&](int start, int t, double psi, const ObjectiveSample &sample) {
        if (options.record_trace) out.trace.push_back({start, t, psi, sample.value});
        if (!have_best || sample.value > out.F_star) {
            out.F_star = sample.value;
            out.psi_star = psi;
            out.slope_star = sample.slope;
            out.best_start = start;
            have_best = true;
        }
    };

    for (int s = 0; s < static_cast<int>(out.starts.size()); ++s) {
        double psi = out.starts[s];
        ObjectiveSample sample = objective(psi);
        ++out.evaluations;
        consider(s, 0, psi, sample);
        double m = 0.0;
        double v = 0.0;
        double b1t = 1.0;
        double b2t = 1.0;
        for (int t = 1; t <= options.max_iter; ++t) {
            const double g = std::clamp(sample.slope, -options.grad_cap, options.grad_cap);
            double step = 0.0;
            if (options.rule == StepRule::Adam) {
                m = options.beta1 * m + (1.0 - options.beta1) * g;
                v = options.beta2 * v + (1.0 - options.beta2) * g * g;
                b1t *= options.beta1;
                b2t *= options.beta2;
                const double m_hat = m / (1.0 - b1t);
                const double v_hat = v / (1.0 - b2t);
                step = options.learning_rate * m_hat / (std::sqrt(v_hat) + options.epsilon);
            } else {
                v += g * g;
                step = options.learning_rate * g / (std::sqrt(v) + options.epsilon);
            }
            const double next = project(psi + step);
            sample = objective(next);
            ++out.evaluations;
            consider(s, t, next, sample);
            const bool settled = std::abs(next - psi) < options.tol_psi_rad;
            psi = next;
            if (settled) break;
        }
    }

    if (options.polish) {
        // Uphill from the best point until the slope changes sign or a bound
        // is reached, then bisect the sign change. Points only replace the
        // incumbent when strictly better, so F_star never decreases.
        const int polish_start = static_cast<int>(out.starts.size());
        int t = 0;
        auto probe = [&](double p) {
            const ObjectiveSample s = objective(p);
            ++out.evaluations;
            consider(polish_start, ++t, p, s);
            return s;
        };
        double a = out.psi_star;
        double ga = out.slope_star;
        const double dir = ga > 0.0 ? 1.0 : -1.0;
        double step = 0.1 * options.learning_rate;
        bool bracketed = false;
        double b = a;
        while (ga != 0.0 && t < 60) {
            b = project(a + dir * step);
            if (b == a) break; // on the bound with the slope pointing outward
            const ObjectiveSample sb = probe(b);
            if (sb.slope * dir <= 0.0) {
                bracketed = true;
                break;
            }
            a = b;
            ga = sb.slope;
            step *= 2.0;
        }
        while (bracketed && std::abs(b - a) > options.polish_tol_rad && t < 120) {
            const double mid = 0.5 * (a + b);
            const ObjectiveSample sm = probe(mid);
            if (sm.slope * dir > 0.0) a = mid;
            else if (sm.slope * dir < 0.0) b = mid;
            else break;
        }
    }
    return out;
}

inline PgaResult pga_maximize(const ShapeObjectiveContext &ctx, const PgaOptions &options,
                              std::optional<double> warm_start = std::nullopt) {
    auto objective = [&](double psi) {
        const auto ev = evaluate_shape(ctx, psi);
        return ObjectiveSample{ev.F, ev.dF};
    };
    return pga_maximize(objective, ctx.layout.psi_min_rad(), ctx.layout.psi_max_rad(), options, warm_start);
}

} // namespace faa
