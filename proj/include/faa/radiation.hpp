// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "faa/common.hpp"
#include "faa/geometry.hpp"

#include <algorithm>
#include <cmath>

namespace faa {

// Per-element amplitude pattern. Directional elements radiate
// G sin^k(theta) cos^k(phi) into the front half-space (cos phi > 0,
// theta in [0, pi/2]) with G = 2(k + 1), and nothing elsewhere.
struct ElementPattern {
    enum class Kind { Omni, Directional };

    Kind kind = Kind::Directional;
    double kappa = 4.0;
    // |d g / d psi| ceiling; only reachable for kappa < 2 near the pattern edge.
    double derivative_cap = 1e6;

    static ElementPattern omni() { return {Kind::Omni, 0.0}; }
    static ElementPattern directional(double kappa) {
        if (!(kappa >= 0.0) || !std::isfinite(kappa))
            throw DomainError("ElementPattern: kappa must be finite and >= 0");
        return {Kind::Directional, kappa};
    }

    bool is_omni() const { return kind == Kind::Omni; }
    double normalization() const { return 2.0 * (kappa + 1.0); }
};

namespace detail {

// base^exponent for base > 0; exponent 0 gives 1 even at base 0.
inline double positive_power(double base, double exponent) {
    if (base > 0.0) return std::exp(exponent * std::log(base));
    return exponent == 0.0 ? 1.0 : 0.0;
}

inline bool in_front(double theta, double phi) {
    return theta >= 0.0 && theta <= 0.5 * kPi && std::cos(phi) > 0.0;
}

} // namespace detail

inline double element_power_gain(const ElementPattern &pattern, double theta, double phi) {
    if (pattern.is_omni()) return 1.0;
    if (!detail::in_front(theta, phi)) return 0.0;
    return pattern.normalization() * detail::positive_power(std::sin(theta), pattern.kappa) *
           detail::positive_power(std::cos(phi), pattern.kappa);
}

inline double element_amplitude(const ElementPattern &pattern, double theta, double phi) {
    return std::sqrt(element_power_gain(pattern, theta, phi));
}

// Elevation part of the amplitude, sqrt(G sin^k theta); zero outside [0, pi/2].
inline double elevation_amplitude(const ElementPattern &pattern, double theta) {
    if (pattern.is_omni()) return 1.0;
    if (theta < 0.0 || theta > 0.5 * kPi) return 0.0;
    return std::sqrt(pattern.normalization() * detail::positive_power(std::sin(theta), pattern.kappa));
}

// Amplitude A_E and its derivative with respect to psi for one element whose
// boresight is rotated by `offset` (rate `doffset`), given the elevation factor.
struct AmplitudeAndSlope {
    double value;
    double slope;
};

inline AmplitudeAndSlope steered_amplitude(const ElementPattern &pattern, double elevation_factor,
                                           double phi, double offset, double doffset) {
    if (pattern.is_omni()) return {1.0, 0.0};
    const double phi_eff = phi - offset;
    const double c = std::cos(phi_eff);
    if (!(c > 0.0) || elevation_factor == 0.0) return {0.0, 0.0};
    const double half = 0.5 * pattern.kappa;
    const double value = elevation_factor * detail::positive_power(c, half);
    if (doffset == 0.0) return {value, 0.0};
    // d/dpsi [K cos^(k/2)(phi - offset)] = K (k/2) cos^(k/2-1) sin(phi_eff) doffset
    double slope = elevation_factor * half * detail::positive_power(c, half - 1.0) *
                   std::sin(phi_eff) * doffset;
    slope = std::clamp(slope, -pattern.derivative_cap, pattern.derivative_cap);
    return {value, slope};
}

// g(theta, phi, psi): amplitude of every element toward (theta, phi), flat order.
inline RVector gain_vector(const ArrayLayout &layout, const ElementPattern &pattern, double theta,
                           double phi, double psi) {
    const auto off = boresight_offsets(layout, psi);
    const double k_theta = elevation_amplitude(pattern, theta);
    RVector g(layout.size());
    for (int n = 0; n < layout.size(); ++n)
        g(n) = steered_amplitude(pattern, k_theta, phi, off.offset(n), off.doffset(n)).value;
    return g;
}

inline RVector gain_vector_derivative(const ArrayLayout &layout, const ElementPattern &pattern,
                                      double theta, double phi, double psi) {
    const auto off = boresight_offsets(layout, psi);
    const double k_theta = elevation_amplitude(pattern, theta);
    RVector dg(layout.size());
    for (int n = 0; n < layout.size(); ++n)
        dg(n) = steered_amplitude(pattern, k_theta, phi, off.offset(n), off.doffset(n)).slope;
    return dg;
}

} // namespace faa
