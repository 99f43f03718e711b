// SPDX-License-Identifier: Apache-2.0
#pragma once

// Per-model closed-form channel h_{u,n}(psi), its derivative and dF/dpsi,
// written as explicit scalar sums over paths and elements. This path shares no
// code with geometry/radiation/channel and serves as the second route for the
// assembled chain-rule gradient. Directional elements only.

#include "faa/channel.hpp"
#include "faa/common.hpp"
#include "faa/geometry.hpp"

#include <cmath>

namespace faa::closed_form {

struct Channel {
    CVector h;
    CVector hdot;
};

struct Setup {
    DeformationModel model;
    int n_h;
    int n_v;
    double spacing_m;
    double wavelength_m;
    double kappa;
};

namespace detail {

inline double cpow(double c, double e) { return c > 0.0 ? std::pow(c, e) : 0.0; }

} // namespace detail

inline Channel channel(const Setup &s, const PathSet &paths, double psi) {
    const int n = s.n_h * s.n_v;
    Channel out{CVector::Zero(n), CVector::Zero(n)};
    const double d = s.spacing_m;
    const double k0 = 2.0 * kPi / s.wavelength_m;
    const double big_g = 2.0 * (s.kappa + 1.0);
    const double half = 0.5 * s.kappa;
    const double sp = std::sin(psi);
    const double cp = std::cos(psi);
    const cplx j(0.0, 1.0);

    for (const Path &p : paths.paths) {
        const double st = std::sin(p.theta);
        const double ct = std::cos(p.theta);
        const double cph = std::cos(p.phi);
        const double sph = std::sin(p.phi);
        const double k_theta = std::sqrt(big_g) * std::pow(st, half);
        for (int ih = 1; ih <= s.n_h; ++ih) {
            const double c_h = (2.0 * ih - s.n_h - 1.0) / 2.0;
            // local azimuth shift slope and in-plane position / rate per model
            double slope = 0.0, x = 0.0, y = 0.0, dx = 0.0, dy = 0.0;
            switch (s.model) {
            case DeformationModel::Rigid:
                y = c_h * d;
                break;
            case DeformationModel::Rotate:
                slope = 1.0;
                x = -c_h * d * sp;
                y = c_h * d * cp;
                dx = -c_h * d * cp;
                dy = -c_h * d * sp;
                break;
            case DeformationModel::Bend: {
                slope = s.n_h == 1 ? 0.0 : 2.0 * (ih - 1.0) / (s.n_h - 1.0) - 1.0;
                const double r = (s.n_h - 1.0) * d / (2.0 * psi);
                const double ang = slope * psi;
                x = r * (std::cos(ang) - 1.0);
                y = r * std::sin(ang);
                dx = -r / psi * (std::cos(ang) - 1.0) - r * slope * std::sin(ang);
                dy = -r / psi * std::sin(ang) + r * slope * std::cos(ang);
                break;
            }
            case DeformationModel::Fold:
                slope = 2 * ih <= s.n_h ? -1.0 : (2 * ih == s.n_h + 1 ? 0.0 : 1.0);
                x = -std::abs(c_h) * d * sp;
                y = c_h * d * cp;
                dx = -std::abs(c_h) * d * cp;
                dy = -c_h * d * sp;
                break;
            }
            const double phi_eff = p.phi - slope * psi;
            const double c_eff = std::cos(phi_eff);
            const double gain = k_theta * detail::cpow(c_eff, half);
            const double gain_base = k_theta * detail::cpow(c_eff, half - 1.0);
            const double rate = k0 * (st * cph * dx + st * sph * dy);
            for (int iv = 1; iv <= s.n_v; ++iv) {
                const double c_v = (2.0 * iv - s.n_v - 1.0) / 2.0;
                const double phase = k0 * (st * cph * x + st * sph * y + ct * c_v * d);
                const cplx e = std::exp(-j * phase);
                const int idx = (ih - 1) * s.n_v + (iv - 1);
                out.h(idx) += p.alpha * gain * e;
                // K cos^(k/2-1)(phi') [ (k/2) slope sin(phi') - j rate cos(phi') ] e
                out.hdot(idx) += p.alpha * gain_base * (half * slope * std::sin(phi_eff) - j * rate * c_eff) * e;
            }
        }
    }
    const double scale = 1.0 / std::sqrt(static_cast<double>(paths.size()));
    out.h *= scale;
    out.hdot *= scale;
    return out;
}

// dF/dpsi = [2Re{(w^H h_B)^* w^H hdot_B}(s2 + |w^H h_E|^2)
//            - 2Re{(w^H h_E)^* w^H hdot_E}(s2 + |w^H h_B|^2)] / (s2 + |w^H h_E|^2)^2
inline double gradient(const Setup &s, const CVector &w, const PathSet &bob, const PathSet &eve,
                       double sigma2, double psi) {
    const Channel hb = channel(s, bob, psi);
    const Channel he = channel(s, eve, psi);
    cplx fb = 0.0, fb_dot = 0.0, fe = 0.0, fe_dot = 0.0;
    for (Eigen::Index n = 0; n < w.size(); ++n) {
        const cplx wc = std::conj(w(n));
        fb += wc * hb.h(n);
        fb_dot += wc * hb.hdot(n);
        fe += wc * he.h(n);
        fe_dot += wc * he.hdot(n);
    }
    const double sb = std::norm(fb);
    const double se = std::norm(fe);
    const double num = 2.0 * (std::conj(fb) * fb_dot).real() * (sigma2 + se) -
                       2.0 * (std::conj(fe) * fe_dot).real() * (sigma2 + sb);
    return num / ((sigma2 + se) * (sigma2 + se));
}

} // namespace faa::closed_form
