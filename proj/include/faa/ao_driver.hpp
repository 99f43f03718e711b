// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "faa/beamformer.hpp"
#include "faa/channel.hpp"
#include "faa/common.hpp"
#include "faa/secrecy.hpp"
#include "faa/shape_optimizer.hpp"

#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace faa {

enum class Scheme { Joint, OnlyW, OnlyPsi, RigidUPA };

inline std::string_view to_string(Scheme scheme) {
    switch (scheme) {
    case Scheme::Joint: return "Joint";
    case Scheme::OnlyW: return "OnlyW";
    case Scheme::OnlyPsi: return "OnlyPsi";
    case Scheme::RigidUPA: return "RigidUPA";
    }
    return "?";
}

inline std::optional<Scheme> parse_scheme(std::string_view name) {
    if (name == "Joint") return Scheme::Joint;
    if (name == "OnlyW") return Scheme::OnlyW;
    if (name == "OnlyPsi") return Scheme::OnlyPsi;
    if (name == "RigidUPA") return Scheme::RigidUPA;
    return std::nullopt;
}

// One Monte Carlo draw: geometry, propagation and (raw) CSI error directions.
struct Scenario {
    ArrayLayout layout;
    ElementPattern pattern;
    double wavelength_m;
    double p_max_w;
    double sigma2_w;
    PathSet bob;
    std::vector<PathSet> eves;
    double xi = 0.0;
    // CN(0, I) draws, one per eavesdropper; rescaled to ||h_E,i(psi0)|| at
    // the start of a run. May be empty when xi == 0.
    std::vector<CVector> error_directions;
    std::uint64_t seed = 0;

    void validate() const {
        if (!(wavelength_m > 0.0)) throw DomainError("Scenario: wavelength must be > 0");
        if (!(p_max_w > 0.0)) throw DomainError("Scenario: P_max must be > 0");
        if (!(sigma2_w > 0.0)) throw DomainError("Scenario: sigma2 must be > 0");
        if (eves.empty()) throw DomainError("Scenario: M must be >= 1");
        check_xi(xi);
        if (xi > 0.0 && error_directions.size() != eves.size())
            throw DomainError("Scenario: one CSI error direction per eavesdropper required");
    }
};

struct AoOptions {
    int k_ao = 100;
    double eps_ao = 1e-4;
    bool force_colluding_path = false;
    // Joint only: before each beamformer update, try moves of 1, 2, 4, ...
    // times the previous shape step (each with its own optimal beamformer)
    // and keep the best while the design rate improves. Zero disables.
    int max_extrapolations = 8;
};

struct AoIterate {
    int k;
    double psi;
    double r_s;        // true channels, clamped
    double r_s_design; // channels the transmitter designs against, unclamped
    int pga_evaluations;
};

struct AoTrace {
    std::vector<AoIterate> iterations;
    CVector w;
    double psi = 0.0;
    bool converged = false;
    bool failed = false;
    bool w0_fallback = false;
    std::string diagnostic;

    int outer_iterations() const { return iterations.empty() ? 0 : iterations.back().k; }
    double final_rate() const { return iterations.empty() ? 0.0 : iterations.back().r_s; }
};

struct Initialization {
    Beamformer w0;
    double psi0;
    bool fallback = false;
};

// psi0 = interval midpoint; w0 = maximum-ratio toward h_B(psi0) at full power.
inline Initialization initialize(const Scenario &sc, const ArrayLayout &layout) {
    Initialization init;
    init.psi0 = layout.psi_mid_rad();
    const auto hb = synthesize_channel(layout, sc.pattern, sc.bob, init.psi0, sc.wavelength_m);
    init.w0 = maximum_ratio(hb.h, sc.p_max_w, &init.fallback);
    return init;
}

inline Initialization initialize(const Scenario &sc) { return initialize(sc, sc.layout); }

namespace detail {

struct RatePair {
    double true_rate;
    double design_rate;
};

inline SecrecyResult rate_for(const CVector &hb, const std::vector<CVector> &he, const CVector &w,
                              double sigma2, bool force_colluding) {
    if (he.size() == 1 && !force_colluding) return secrecy_rate_single(hb, he[0], w, sigma2);
    CMatrix mat(hb.size(), static_cast<Eigen::Index>(he.size()));
    for (std::size_t i = 0; i < he.size(); ++i) mat.col(static_cast<Eigen::Index>(i)) = he[i];
    return secrecy_rate_colluding(hb, mat, w, sigma2);
}

} // namespace detail

// Alternating optimization of (w, psi). Decisions use the design channels
// (estimated eavesdropper CSI); the reported r_s uses the true channels.
inline AoTrace run_ao(const Scenario &sc, Scheme scheme, const AoOptions &ao = {},
                      const PgaOptions &pga = {}) {
    sc.validate();
    if (ao.k_ao < 1) throw DomainError("AoOptions: K_AO must be >= 1");
    pga.validate();

    const ArrayLayout layout =
        scheme == Scheme::RigidUPA ? sc.layout.with_model(DeformationModel::Rigid) : sc.layout;
    const bool update_w = scheme != Scheme::OnlyPsi;
    const bool update_psi = scheme == Scheme::Joint || scheme == Scheme::OnlyPsi;

    AoTrace trace;
    const Initialization init = initialize(sc, layout);
    trace.w0_fallback = init.fallback;
    double psi = init.psi0;
    CVector w = init.w0.w;

    ShapeObjectiveContext ctx{layout, sc.pattern, sc.wavelength_m, w, sc.bob, sc.eves, sc.sigma2_w, {},
                              ao.force_colluding_path};
    if (sc.xi > 0.0) {
        const ArrayState state0 = array_state(layout, init.psi0);
        for (std::size_t i = 0; i < sc.eves.size(); ++i) {
            const auto he = synthesize_channel(layout, state0, sc.pattern, sc.eves[i], sc.wavelength_m);
            ctx.csi_errors.push_back(make_csi_error(sc.xi, sc.error_directions[i], he.h.norm()));
        }
    }

    auto rates = [&](double at_psi, const CVector &weights) {
        const ArrayState state = array_state(layout, at_psi);
        const auto hb = synthesize_channel(layout, state, sc.pattern, sc.bob, sc.wavelength_m).h;
        std::vector<CVector> he_true, he_design;
        for (std::size_t i = 0; i < sc.eves.size(); ++i) {
            auto real = synthesize_channel(layout, state, sc.pattern, sc.eves[i], sc.wavelength_m);
            he_true.push_back(real.h);
            he_design.push_back(ctx.csi_errors.empty() ? real.h : apply_csi_error(real, ctx.csi_errors[i]).h);
        }
        const auto t = detail::rate_for(hb, he_true, weights, sc.sigma2_w, ao.force_colluding_path);
        const auto dsg = detail::rate_for(hb, he_design, weights, sc.sigma2_w, ao.force_colluding_path);
        return detail::RatePair{t.r_s, dsg.r_s_unclamped};
    };

    struct Candidate {
        double psi;
        CVector w;
        double design_rate;
    };
    // Optimal beamformer for the design channels at `at_psi`.
    auto beamform = [&](double at_psi) {
        const auto ch = design_channels(ctx, at_psi);
        CMatrix he(layout.size(), static_cast<Eigen::Index>(ch.eves.size()));
        std::vector<CVector> he_list;
        for (std::size_t i = 0; i < ch.eves.size(); ++i) {
            he.col(static_cast<Eigen::Index>(i)) = ch.eves[i].h;
            he_list.push_back(ch.eves[i].h);
        }
        CVector opt = optimal_beamformer(ch.bob.h, he, sc.sigma2_w, sc.p_max_w).w;
        const double rate = detail::rate_for(ch.bob.h, he_list, opt, sc.sigma2_w, ao.force_colluding_path).r_s_unclamped;
        return Candidate{at_psi, std::move(opt), rate};
    };

    try {
        double last_step = 0.0;
        auto r0 = rates(psi, w);
        trace.iterations.push_back({0, psi, r0.true_rate, r0.design_rate, 0});
        double previous = r0.design_rate;
        for (int k = 0; k < ao.k_ao; ++k) {
            if (update_w) {
                Candidate best = beamform(psi);
                if (update_psi && last_step != 0.0) {
                    double tried = psi;
                    double scale = 1.0;
                    for (int j = 0; j < ao.max_extrapolations; ++j, scale *= 2.0) {
                        const double target = layout.project(psi + scale * last_step);
                        if (target == tried) break;
                        tried = target;
                        Candidate c = beamform(target);
                        if (!(c.design_rate > best.design_rate)) break;
                        best = std::move(c);
                    }
                }
                psi = best.psi;
                w = std::move(best.w);
            }
            int evaluations = 0;
            if (update_psi) {
                ctx.w = w;
                PgaOptions inner = pga;
                inner.record_trace = false;
                const auto res = pga_maximize(ctx, inner, psi);
                last_step = res.psi_star - psi;
                psi = res.psi_star;
                evaluations = res.evaluations;
            }
            const auto r = rates(psi, w);
            trace.iterations.push_back({k + 1, psi, r.true_rate, r.design_rate, evaluations});
            trace.w = w;
            trace.psi = psi;
            if (!update_psi) {
                // psi is frozen, so a second beamformer update reproduces the first
                trace.converged = true;
                break;
            }
            const double change = std::abs(r.design_rate - previous) / std::max(std::abs(r.design_rate), 1e-300);
            previous = r.design_rate;
            if (change < ao.eps_ao) {
                trace.converged = true;
                break;
            }
        }
    } catch (const std::exception &ex) {
        trace.failed = true;
        trace.diagnostic = ex.what();
    }
    if (trace.w.size() == 0) {
        trace.w = w;
        trace.psi = psi;
    }
    return trace;
}

} // namespace faa
