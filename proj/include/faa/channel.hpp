// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "faa/common.hpp"
#include "faa/geometry.hpp"
#include "faa/radiation.hpp"
#include "faa/rng.hpp"

#include <cmath>
#include <vector>

namespace faa {

struct Path {
    cplx alpha;   // complex gain, path loss and phase included
    double theta; // elevation, rad
    double phi;   // azimuth, rad
};

struct PathSet {
    std::vector<Path> paths;
    double user_distance_m = 1.0;

    int size() const { return static_cast<int>(paths.size()); }
};

// Per-path draw statistics. Angles are restricted to the element front sector.
struct PathStatistics {
    double g0_linear = 1e-4;       // reference gain at 1 m
    double pathloss_exponent = 2.8;
    double theta_min = kPi / 12.0;
    double theta_max = kPi / 2.0;
    double phi_min = -kPi / 3.0;
    double phi_max = kPi / 3.0;

    double path_gain_variance(double distance_m) const {
        return g0_linear * std::pow(distance_m, -pathloss_exponent);
    }
};

// Draw order per path: alpha, theta, phi.
inline PathSet sample_paths(Xoshiro256 &rng, double distance_m, int num_paths,
                            const PathStatistics &stats = {}) {
    if (num_paths < 1) throw DomainError("sample_paths: L must be >= 1");
    if (!(distance_m > 0.0)) throw DomainError("sample_paths: distance_m must be > 0");
    PathSet set;
    set.user_distance_m = distance_m;
    set.paths.reserve(num_paths);
    const double variance = stats.path_gain_variance(distance_m);
    for (int l = 0; l < num_paths; ++l) {
        Path p;
        p.alpha = rng.complex_normal(variance);
        p.theta = rng.uniform(stats.theta_min, stats.theta_max);
        p.phi = rng.uniform(stats.phi_min, stats.phi_max);
        set.paths.push_back(p);
    }
    return set;
}

// Wavevector k(phi, theta) = (2 pi / lambda) [sin t cos p, sin t sin p, cos t].
inline Vec3 wavevector(double theta, double phi, double wavelength_m) {
    const double k = 2.0 * kPi / wavelength_m;
    return {k * std::sin(theta) * std::cos(phi), k * std::sin(theta) * std::sin(phi),
            k * std::cos(theta)};
}

inline CVector steering_vector(const ArrayLayout &layout, double psi, double theta, double phi,
                               double wavelength_m) {
    const Positions r = element_positions(layout, psi);
    const Vec3 k = wavevector(theta, phi, wavelength_m);
    CVector a(layout.size());
    for (int n = 0; n < layout.size(); ++n) a(n) = std::polar(1.0, -k.dot(r.col(n)));
    return a;
}

// da/dpsi = a (-j k . dr/dpsi)
inline CVector steering_derivative(const ArrayLayout &layout, double psi, double theta, double phi,
                                   double wavelength_m) {
    const CVector a = steering_vector(layout, psi, theta, phi, wavelength_m);
    const Positions dr = position_derivatives(layout, psi);
    const Vec3 k = wavevector(theta, phi, wavelength_m);
    CVector da(layout.size());
    for (int n = 0; n < layout.size(); ++n) da(n) = a(n) * cplx(0.0, -k.dot(dr.col(n)));
    return da;
}

// k . dr_n/dpsi written out per deformation model, independent of the
// geometry module's derivative code.
inline RVector phase_rate_closed_form(const ArrayLayout &layout, double psi, double theta,
                                      double phi, double wavelength_m) {
    layout.check_feasible(psi);
    const double d = layout.spacing_m();
    const double k0 = 2.0 * kPi / wavelength_m;
    const double st = std::sin(theta);
    RVector rate = RVector::Zero(layout.size());
    for (int n = 0; n < layout.size(); ++n) {
        const int i_h = layout.element(n).i_h;
        const double c_lin = ArrayLayout::centered(i_h, layout.n_h());
        switch (layout.model()) {
        case DeformationModel::Rigid: break;
        case DeformationModel::Rotate:
            rate(n) = -k0 * d * c_lin * st * std::cos(phi - psi);
            break;
        case DeformationModel::Bend: {
            const double radius = (layout.n_h() - 1) * d / (2.0 * psi);
            const double kb = layout.bend_factor(i_h);
            const double dx = -radius / psi * (std::cos(kb * psi) - 1.0) - radius * kb * std::sin(kb * psi);
            const double dy = -radius / psi * std::sin(kb * psi) + radius * kb * std::cos(kb * psi);
            rate(n) = k0 * (st * std::cos(phi) * dx + st * std::sin(phi) * dy);
            break;
        }
        case DeformationModel::Fold: {
            const double c_abs = -std::abs(c_lin);
            rate(n) = k0 * d *
                      (st * std::cos(phi) * c_abs * std::cos(psi) - st * std::sin(phi) * c_lin * std::sin(psi));
            break;
        }
        }
    }
    return rate;
}

struct ChannelRealization {
    CVector h;
    CVector dh_dpsi;
    double psi_at = 0.0;
};

// h = L^{-1/2} sum_l alpha_l g_l (.) a_l and its psi-derivative by the
// Hadamard product rule, for an array state computed once per psi.
inline ChannelRealization synthesize_channel(const ArrayLayout &layout, const ArrayState &state,
                                             const ElementPattern &pattern, const PathSet &paths,
                                             double wavelength_m) {
    const int n_elem = layout.size();
    const int n_v = layout.n_v();
    ChannelRealization out{CVector::Zero(n_elem), CVector::Zero(n_elem), state.psi};
    if (paths.paths.empty()) return out;
    const double k0 = 2.0 * kPi / wavelength_m;
    for (const Path &p : paths.paths) {
        if (p.alpha == cplx(0.0, 0.0)) continue;
        const double st = std::sin(p.theta);
        const double kx = k0 * st * std::cos(p.phi);
        const double ky = k0 * st * std::sin(p.phi);
        const double kz = k0 * std::cos(p.theta);
        const double k_theta = elevation_amplitude(pattern, p.theta);
        for (int col = 0; col < layout.n_h(); ++col) {
            const int first = col * n_v;
            const auto amp = steered_amplitude(pattern, k_theta, p.phi, state.offsets.offset(first),
                                               state.offsets.doffset(first));
            if (amp.value == 0.0 && amp.slope == 0.0) continue;
            for (int n = first; n < first + n_v; ++n) {
                const double phase = kx * state.positions(0, n) + ky * state.positions(1, n) +
                                     kz * state.positions(2, n);
                const double rate = kx * state.dpositions(0, n) + ky * state.dpositions(1, n);
                const cplx a = std::polar(1.0, -phase);
                const cplx term = p.alpha * a;
                out.h(n) += term * amp.value;
                out.dh_dpsi(n) += term * cplx(amp.slope, -amp.value * rate);
            }
        }
    }
    const double scale = 1.0 / std::sqrt(static_cast<double>(paths.size()));
    out.h *= scale;
    out.dh_dpsi *= scale;
    return out;
}

inline ChannelRealization synthesize_channel(const ArrayLayout &layout, const ElementPattern &pattern,
                                             const PathSet &paths, double psi, double wavelength_m) {
    return synthesize_channel(layout, array_state(layout, psi), pattern, paths, wavelength_m);
}

// Frozen estimation error for one eavesdropper. error_vector is already
// power-matched to the channel it corrupts and does not depend on psi.
struct CsiError {
    double xi = 0.0;
    CVector error_vector;
};

inline void check_xi(double xi) {
    if (!(xi >= 0.0 && xi <= 1.0)) throw DomainError("CSI quality factor xi must lie in [0, 1]");
}

// N i.i.d. CN(0, 1) draws; the raw direction of an error vector.
inline CVector draw_error_direction(Xoshiro256 &rng, int n) {
    CVector e(n);
    for (int i = 0; i < n; ++i) e(i) = rng.complex_normal(1.0);
    return e;
}

// Rescales `raw` so that ||e|| equals reference_norm.
inline CsiError make_csi_error(double xi, const CVector &raw, double reference_norm) {
    check_xi(xi);
    const double norm = raw.norm();
    CsiError err{xi, raw};
    if (norm > 0.0) err.error_vector *= reference_norm / norm;
    return err;
}

// h_hat = sqrt(1 - xi^2) h + xi e; d h_hat / dpsi = sqrt(1 - xi^2) dh/dpsi.
inline ChannelRealization apply_csi_error(const ChannelRealization &real, const CsiError &err) {
    check_xi(err.xi);
    if (err.xi == 0.0) return real;
    const double keep = std::sqrt(1.0 - err.xi * err.xi);
    return {keep * real.h + err.xi * err.error_vector, keep * real.dh_dpsi, real.psi_at};
}

inline ChannelRealization corrupt_csi(const ChannelRealization &real, double xi, Xoshiro256 &rng) {
    check_xi(xi);
    const CVector raw = draw_error_direction(rng, static_cast<int>(real.h.size()));
    return apply_csi_error(real, make_csi_error(xi, raw, real.h.norm()));
}

} // namespace faa
