// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "faa/common.hpp"
#include "faa/secrecy.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

#include <cmath>

namespace faa {

// A = h_B h_B^H + cI, B = H_E H_E^H + cI with c = sigma2 / P_max.
struct HermitianPair {
    CMatrix a_mat;
    CMatrix b_mat;
    double c = 0.0;
};

inline HermitianPair build_pair(const CVector &h_b, const CMatrix &h_e, double sigma2, double p_max) {
    if (!(p_max > 0.0)) throw DomainError("build_pair: p_max must be > 0");
    if (!(sigma2 > 0.0)) throw DomainError("build_pair: sigma2 must be > 0");
    const auto n = h_b.size();
    if (h_e.rows() != n) throw DomainError("build_pair: H_E row count differs from N");
    const double c = sigma2 / p_max;
    HermitianPair pair;
    pair.c = c;
    pair.a_mat = h_b * h_b.adjoint();
    pair.a_mat.diagonal().array() += c;
    pair.b_mat = h_e * h_e.adjoint();
    pair.b_mat.diagonal().array() += c;
    return pair;
}

struct GenEigResult {
    CVector direction; // unit norm
    double lambda_max = 0.0;
    int iterations = 0;
    double residual = 0.0; // ||C z - lambda z|| / lambda in whitened coordinates
};

// Dominant generalized eigenvector of (A, B) by power iteration on the
// whitened operator C = L^{-1} A L^{-H}, B = L L^H. The start vector is the
// normalized all-ones vector, so degenerate pairs resolve deterministically.
inline GenEigResult dominant_gen_eigvec(const HermitianPair &pair, double tol = 1e-10,
                                        int max_iter = 500) {
    const auto n = pair.a_mat.rows();
    Eigen::LLT<CMatrix> llt(pair.b_mat);
    if (llt.info() != Eigen::Success) throw NumericalError("dominant_gen_eigvec: B is not positive definite");
    const auto lower = llt.matrixL();
    const auto upper = llt.matrixU(); // L^H

    auto apply_c = [&](const CVector &z) -> CVector {
        CVector u = upper.solve(z);
        CVector y = pair.a_mat * u;
        return lower.solve(y);
    };

    CVector z = upper * CVector::Ones(n);
    z.normalize();
    GenEigResult out;
    double residual = 0.0;
    for (int it = 1; it <= max_iter; ++it) {
        const CVector cz = apply_c(z);
        const double lambda = z.dot(cz).real();
        residual = (cz - lambda * z).norm() / std::abs(lambda);
        out.iterations = it;
        if (residual <= tol) {
            out.lambda_max = lambda;
            out.residual = residual;
            CVector u = upper.solve(z);
            out.direction = u / u.norm();
            return out;
        }
        z = cz / cz.norm();
    }
    throw NumericalError("dominant_gen_eigvec: no convergence within max_iter", residual);
}

// Rotates w so its largest-modulus entry is real and nonnegative.
inline CVector normalize_phase(const CVector &w) {
    Eigen::Index idx = 0;
    w.cwiseAbs().maxCoeff(&idx);
    const double mag = std::abs(w(idx));
    if (mag == 0.0) return w;
    return w * (std::conj(w(idx)) / mag);
}

// Same eigenpair from a dense Hermitian eigensolve of the whitened operator.
inline GenEigResult dense_gen_eigvec(const HermitianPair &pair) {
    Eigen::LLT<CMatrix> llt(pair.b_mat);
    if (llt.info() != Eigen::Success) throw NumericalError("dense_gen_eigvec: B is not positive definite");
    const CMatrix half = llt.matrixL().solve(pair.a_mat);
    const CMatrix c = llt.matrixL().solve(half.adjoint()); // L^{-1} A L^{-H}, Hermitian
    Eigen::SelfAdjointEigenSolver<CMatrix> es(0.5 * (c + c.adjoint()));
    if (es.info() != Eigen::Success) throw NumericalError("dense_gen_eigvec: eigensolver failed");
    const auto last = c.rows() - 1;
    const CVector z = es.eigenvectors().col(last);
    const CVector u = llt.matrixU().solve(z);
    GenEigResult out;
    out.lambda_max = es.eigenvalues()(last);
    out.direction = u / u.norm();
    out.residual = (c * z - out.lambda_max * z).norm() / std::abs(out.lambda_max);
    return out;
}

// w* = sqrt(P_max) v_max / ||v_max||, always at full power. Power iteration
// contracts at rate 1 / lambda_max toward the unit eigenvalues that every
// pair has whenever N > M + 1, so it stalls when Bob barely clears the noise
// floor; the dense solve covers that case.
inline Beamformer optimal_beamformer(const CVector &h_b, const CMatrix &h_e, double sigma2, double p_max) {
    const HermitianPair pair = build_pair(h_b, h_e, sigma2, p_max);
    GenEigResult eig;
    try {
        eig = dominant_gen_eigvec(pair);
    } catch (const NumericalError &) {
        eig = dense_gen_eigvec(pair);
    }
    return {normalize_phase(eig.direction) * std::sqrt(p_max), p_max};
}

inline Beamformer optimal_beamformer(const CVector &h_b, const CVector &h_e, double sigma2, double p_max) {
    return optimal_beamformer(h_b, CMatrix(h_e), sigma2, p_max);
}

// sqrt(P_max) h / ||h||; the all-ones direction if h vanishes.
inline Beamformer maximum_ratio(const CVector &h, double p_max, bool *fell_back = nullptr) {
    const double norm = h.norm();
    const bool zero = !(norm > 0.0);
    if (fell_back) *fell_back = zero;
    CVector w = zero ? CVector(CVector::Ones(h.size()) / std::sqrt(double(h.size()))) : CVector(h / norm);
    return {w * std::sqrt(p_max), p_max};
}

} // namespace faa
