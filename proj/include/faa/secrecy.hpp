// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "faa/common.hpp"

#include <algorithm>
#include <cmath>

namespace faa {

struct Beamformer {
    CVector w;
    double p_max_w = 1.0;

    bool feasible() const { return w.squaredNorm() <= p_max_w + 1e-12; }
};

struct SecrecyResult {
    double c_b = 0.0;           // bps/Hz
    double c_e = 0.0;           // bps/Hz
    double r_s = 0.0;           // max(c_b - c_e, 0)
    double r_s_unclamped = 0.0; // c_b - c_e
};

inline void check_noise(double sigma2) {
    if (!(sigma2 > 0.0)) throw DomainError("noise power sigma2 must be > 0");
}

// |h^H w|^2 / sigma2
inline double snr(const CVector &h, const CVector &w, double sigma2) {
    check_noise(sigma2);
    return std::norm(h.dot(w)) / sigma2;
}

inline SecrecyResult secrecy_from_snr(double snr_b, double snr_e) {
    SecrecyResult r;
    r.c_b = std::log2(1.0 + snr_b);
    r.c_e = std::log2(1.0 + snr_e);
    r.r_s_unclamped = r.c_b - r.c_e;
    r.r_s = std::max(r.r_s_unclamped, 0.0);
    return r;
}

inline SecrecyResult secrecy_rate_single(const CVector &h_b, const CVector &h_e, const CVector &w,
                                         double sigma2) {
    return secrecy_from_snr(snr(h_b, w, sigma2), snr(h_e, w, sigma2));
}

// Colluding eavesdroppers combine coherently (MRC): SNR_E = ||H_E^H w||^2 / sigma2.
inline SecrecyResult secrecy_rate_colluding(const CVector &h_b, const CMatrix &h_e, const CVector &w,
                                            double sigma2) {
    check_noise(sigma2);
    if (h_e.cols() == 0) throw DomainError("secrecy_rate_colluding: M must be >= 1");
    const double snr_e = (h_e.adjoint() * w).squaredNorm() / sigma2;
    return secrecy_from_snr(snr(h_b, w, sigma2), snr_e);
}

} // namespace faa
