// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "faa/common.hpp"

#include <cmath>
#include <optional>
#include <sstream>
#include <string_view>

namespace faa {

enum class DeformationModel { Rigid, Rotate, Bend, Fold };

inline std::string_view to_string(DeformationModel model) {
    switch (model) {
    case DeformationModel::Rigid: return "Rigid";
    case DeformationModel::Rotate: return "Rotate";
    case DeformationModel::Bend: return "Bend";
    case DeformationModel::Fold: return "Fold";
    }
    return "?";
}

inline std::optional<DeformationModel> parse_model(std::string_view name) {
    if (name == "Rigid") return DeformationModel::Rigid;
    if (name == "Rotate") return DeformationModel::Rotate;
    if (name == "Bend") return DeformationModel::Bend;
    if (name == "Fold") return DeformationModel::Fold;
    return std::nullopt;
}

// Smallest admissible bend parameter. The bend radius (N_h-1)d/(2 psi) is
// singular at psi = 0; the flat array is the limit.
inline constexpr double kBendEpsilon = 1e-4;

struct ElementIndex {
    int i_h; // 1-based horizontal index
    int i_v; // 1-based vertical index
    int flat;
};

class ArrayLayout {
  public:
    ArrayLayout(int n_h, int n_v, double spacing_m, DeformationModel model,
                std::optional<double> psi_min_rad = std::nullopt,
                std::optional<double> psi_max_rad = std::nullopt)
        : n_h_(n_h), n_v_(n_v), spacing_m_(spacing_m), model_(model) {
        if (n_h < 1 || n_v < 1) throw DomainError("ArrayLayout: n_h and n_v must be >= 1");
        if (!(spacing_m > 0.0) || !std::isfinite(spacing_m))
            throw DomainError("ArrayLayout: spacing_m must be > 0");
        const auto [lo, hi] = default_interval(model);
        psi_min_ = psi_min_rad.value_or(lo);
        psi_max_ = psi_max_rad.value_or(hi);
        if (!(psi_min_ <= psi_max_)) throw DomainError("ArrayLayout: psi_min_rad > psi_max_rad");
        if (model == DeformationModel::Bend && !(psi_min_ >= kBendEpsilon))
            throw DomainError("ArrayLayout: Bend requires psi_min_rad >= 1e-4 rad");
    }

    static std::pair<double, double> default_interval(DeformationModel model) {
        if (model == DeformationModel::Bend) return {kPi / 180.0, kPi / 2.0};
        return {-kPi / 3.0, kPi / 3.0};
    }

    int n_h() const { return n_h_; }
    int n_v() const { return n_v_; }
    int size() const { return n_h_ * n_v_; }
    double spacing_m() const { return spacing_m_; }
    DeformationModel model() const { return model_; }
    double psi_min_rad() const { return psi_min_; }
    double psi_max_rad() const { return psi_max_; }
    double psi_mid_rad() const { return 0.5 * (psi_min_ + psi_max_); }

    // Same dimensions and spacing, different deformation model (default interval).
    ArrayLayout with_model(DeformationModel model) const {
        return ArrayLayout(n_h_, n_v_, spacing_m_, model);
    }

    ElementIndex element(int flat) const {
        return {flat / n_v_ + 1, flat % n_v_ + 1, flat};
    }
    int flat_index(int i_h, int i_v) const { return (i_h - 1) * n_v_ + (i_v - 1); }

    // Centered coordinate (2i - n - 1)/2 of a 1-based index.
    static double centered(int i, int n) { return 0.5 * (2.0 * i - n - 1.0); }

    // Per-column bend factor K' = 2(i_h-1)/(N_h-1) - 1; zero for a single column.
    double bend_factor(int i_h) const {
        if (n_h_ == 1) return 0.0;
        return 2.0 * (i_h - 1) / (n_h_ - 1) - 1.0;
    }

    bool contains(double psi) const { return psi >= psi_min_ && psi <= psi_max_; }

    void check_feasible(double psi) const {
        if (std::isnan(psi)) throw DomainError("psi is NaN");
        if (psi < psi_min_ || psi > psi_max_) {
            std::ostringstream msg;
            msg.precision(17);
            if (psi < psi_min_)
                msg << "psi=" << psi << " violates lower bound psi_min_rad=" << psi_min_;
            else
                msg << "psi=" << psi << " violates upper bound psi_max_rad=" << psi_max_;
            throw DomainError(msg.str());
        }
    }

    double project(double psi) const { return std::max(psi_min_, std::min(psi, psi_max_)); }

  private:
    int n_h_;
    int n_v_;
    double spacing_m_;
    DeformationModel model_;
    double psi_min_;
    double psi_max_;
};

namespace detail {

// Bend-arc helper functions of u = K' psi. Series below |u| = 1e-2 keep full
// precision where the closed forms cancel.
struct ArcTerms {
    double q;      // (1 - cos u) / u^2
    double dq;     // d q / du
    double sinc;   // sin u / u
    double dsinc;  // d sinc / du
};

inline ArcTerms arc_terms(double u) {
    const double u2 = u * u;
    if (std::abs(u) < 1e-2) {
        return {0.5 - u2 / 24.0 + u2 * u2 / 720.0 - u2 * u2 * u2 / 40320.0,
                u * (-1.0 / 12.0 + u2 / 180.0 - u2 * u2 / 6720.0),
                1.0 - u2 / 6.0 + u2 * u2 / 120.0 - u2 * u2 * u2 / 5040.0,
                u * (-1.0 / 3.0 + u2 / 30.0 - u2 * u2 / 840.0)};
    }
    const double s = std::sin(u);
    const double c = std::cos(u);
    const double half = std::sin(0.5 * u);
    const double one_minus_cos = 2.0 * half * half;
    return {one_minus_cos / u2, (u * s - 2.0 * one_minus_cos) / (u2 * u), s / u, (u * c - s) / u2};
}

} // namespace detail

// Element positions r_n(psi), column n in flat order.
inline Positions element_positions(const ArrayLayout &layout, double psi) {
    layout.check_feasible(psi);
    const int n = layout.size();
    const double d = layout.spacing_m();
    Positions r(3, n);
    const double angle = layout.model() == DeformationModel::Rigid ? 0.0 : psi;
    const double s = std::sin(angle);
    const double c = std::cos(angle);
    const double half_span = 0.5 * (layout.n_h() - 1) * d;
    for (int k = 0; k < n; ++k) {
        const auto e = layout.element(k);
        const double ch = ArrayLayout::centered(e.i_h, layout.n_h());
        const double z = ArrayLayout::centered(e.i_v, layout.n_v()) * d;
        switch (layout.model()) {
        case DeformationModel::Rigid:
        case DeformationModel::Rotate:
            r.col(k) << -ch * d * s, ch * d * c, z;
            break;
        case DeformationModel::Fold:
            r.col(k) << -std::abs(ch) * d * s, ch * d * c, z;
            break;
        case DeformationModel::Bend: {
            const double kb = layout.bend_factor(e.i_h);
            const auto t = detail::arc_terms(kb * psi);
            // x = R(cos(K'psi) - 1), y = R sin(K'psi), R = half_span / psi
            r.col(k) << -half_span * kb * kb * psi * t.q, half_span * kb * t.sinc, z;
            break;
        }
        }
    }
    return r;
}

// d r_n / d psi; the z component is identically zero.
inline Positions position_derivatives(const ArrayLayout &layout, double psi) {
    layout.check_feasible(psi);
    const int n = layout.size();
    const double d = layout.spacing_m();
    Positions dr = Positions::Zero(3, n);
    if (layout.model() == DeformationModel::Rigid) return dr;
    const double s = std::sin(psi);
    const double c = std::cos(psi);
    const double half_span = 0.5 * (layout.n_h() - 1) * d;
    for (int k = 0; k < n; ++k) {
        const auto e = layout.element(k);
        const double ch = ArrayLayout::centered(e.i_h, layout.n_h());
        switch (layout.model()) {
        case DeformationModel::Rigid: break;
        case DeformationModel::Rotate:
            dr(0, k) = -ch * d * c;
            dr(1, k) = -ch * d * s;
            break;
        case DeformationModel::Fold:
            dr(0, k) = -std::abs(ch) * d * c;
            dr(1, k) = -ch * d * s;
            break;
        case DeformationModel::Bend: {
            const double kb = layout.bend_factor(e.i_h);
            const double u = kb * psi;
            const auto t = detail::arc_terms(u);
            dr(0, k) = -half_span * kb * kb * (t.q + u * t.dq);
            dr(1, k) = half_span * kb * kb * t.dsinc;
            break;
        }
        }
    }
    return dr;
}

// Fold half assignment: -1 for the first half, +1 for the second, 0 for the
// undeformed central column of an odd array.
inline double fold_sign(int i_h, int n_h) {
    if (2 * i_h <= n_h) return -1.0;
    if (2 * i_h == n_h + 1) return 0.0;
    return 1.0;
}

struct BoresightOffsets {
    RVector offset;  // effective azimuth = phi - offset(n)
    RVector doffset; // d offset / d psi
};

inline BoresightOffsets boresight_offsets(const ArrayLayout &layout, double psi) {
    layout.check_feasible(psi);
    const int n = layout.size();
    BoresightOffsets out{RVector::Zero(n), RVector::Zero(n)};
    for (int k = 0; k < n; ++k) {
        const int i_h = layout.element(k).i_h;
        double slope = 0.0;
        switch (layout.model()) {
        case DeformationModel::Rigid: slope = 0.0; break;
        case DeformationModel::Rotate: slope = 1.0; break;
        case DeformationModel::Bend: slope = layout.bend_factor(i_h); break;
        case DeformationModel::Fold: slope = fold_sign(i_h, layout.n_h()); break;
        }
        out.offset(k) = slope * psi;
        out.doffset(k) = slope;
    }
    return out;
}

// Everything about the array that depends on psi, evaluated once and shared
// by every user's channel synthesis.
struct ArrayState {
    double psi;
    Positions positions;
    Positions dpositions;
    BoresightOffsets offsets;
};

inline ArrayState array_state(const ArrayLayout &layout, double psi) {
    return {psi, element_positions(layout, psi), position_derivatives(layout, psi),
            boresight_offsets(layout, psi)};
}

} // namespace faa
