// SPDX-License-Identifier: Apache-2.0
#include "faa/rng.hpp"
#include "faa/secrecy.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace faa;

namespace {

CVector random_vector(Xoshiro256 &rng, int n, double variance = 1.0) {
    CVector v(n);
    for (int i = 0; i < n; ++i) v(i) = rng.complex_normal(variance);
    return v;
}

} // namespace

TEST(Secrecy, OrthogonalBeamformerHasZeroSnr) {
    CVector h(2), w(2);
    h << cplx(1, 0), cplx(0, 0);
    w << cplx(0, 0), cplx(0, 1);
    EXPECT_EQ(snr(h, w, 1.0), 0.0);
}

TEST(Secrecy, AlignedBeamformerAttainsCauchySchwarz) {
    Xoshiro256 rng(1);
    const CVector h = random_vector(rng, 5);
    const double p = 2.5;
    const CVector w = h / h.norm() * std::sqrt(p);
    EXPECT_NEAR(snr(h, w, 0.3), p * h.squaredNorm() / 0.3, 1e-12 * p * h.squaredNorm() / 0.3);
}

TEST(Secrecy, SnrMatchesDirectSummation) {
    Xoshiro256 rng(2);
    for (int i = 0; i < 50; ++i) {
        const CVector h = random_vector(rng, 7);
        const CVector w = random_vector(rng, 7);
        cplx acc = 0.0;
        for (int n = 0; n < 7; ++n) acc += std::conj(h(n)) * w(n);
        const double expected = std::norm(acc) / 0.7;
        EXPECT_NEAR(snr(h, w, 0.7), expected, 1e-12 * expected);
    }
}

TEST(Secrecy, ExactArithmetic) {
    const auto r = secrecy_from_snr(3.0, 1.0);
    EXPECT_DOUBLE_EQ(r.r_s, 1.0);
    const auto neg = secrecy_from_snr(1.0, 3.0);
    EXPECT_EQ(neg.r_s, 0.0);
    EXPECT_DOUBLE_EQ(neg.r_s_unclamped, -1.0);
}

TEST(Secrecy, IdenticalChannelsGiveZero) {
    Xoshiro256 rng(3);
    const CVector h = random_vector(rng, 4);
    const CVector w = random_vector(rng, 4);
    const auto r = secrecy_rate_single(h, h, w, 0.1);
    EXPECT_EQ(r.r_s, 0.0);
    EXPECT_EQ(r.r_s_unclamped, 0.0);
}

TEST(Secrecy, SilentEavesdropper) {
    Xoshiro256 rng(4);
    const CVector h = random_vector(rng, 4);
    const CVector w = random_vector(rng, 4);
    const auto r = secrecy_rate_single(h, CVector::Zero(4), w, 0.1);
    EXPECT_DOUBLE_EQ(r.r_s, std::log2(1.0 + std::norm(h.dot(w)) / 0.1));
}

TEST(Secrecy, ColludingWithOneEveIsSingle) {
    Xoshiro256 rng(5);
    for (int i = 0; i < 20; ++i) {
        const CVector hb = random_vector(rng, 6);
        const CVector he = random_vector(rng, 6);
        const CVector w = random_vector(rng, 6);
        const auto a = secrecy_rate_single(hb, he, w, 0.5);
        const auto b = secrecy_rate_colluding(hb, CMatrix(he), w, 0.5);
        EXPECT_NEAR(a.r_s_unclamped, b.r_s_unclamped, 1e-15 * std::max(1.0, std::abs(a.r_s_unclamped)));
    }
}

TEST(Secrecy, DuplicatedEveDoublesSnr) {
    Xoshiro256 rng(6);
    const CVector hb = random_vector(rng, 4, 4.0);
    const CVector he = random_vector(rng, 4);
    const CVector w = random_vector(rng, 4);
    CMatrix two(4, 2);
    two << he, he;
    const auto one = secrecy_rate_colluding(hb, CMatrix(he), w, 0.5);
    const auto dup = secrecy_rate_colluding(hb, two, w, 0.5);
    EXPECT_GT(dup.c_e, one.c_e);
    EXPECT_LT(dup.r_s_unclamped, one.r_s_unclamped);
    EXPECT_NEAR(std::exp2(dup.c_e) - 1.0, 2.0 * (std::exp2(one.c_e) - 1.0), 1e-12 * std::exp2(dup.c_e));
}

TEST(Secrecy, ColludingMatchesLoopOracle) {
    Xoshiro256 rng(7);
    for (int m = 1; m <= 5; ++m) {
        const CVector hb = random_vector(rng, 5);
        CMatrix he(5, m);
        for (int i = 0; i < m; ++i) he.col(i) = random_vector(rng, 5);
        const CVector w = random_vector(rng, 5);
        double snr_e = 0.0;
        for (int i = 0; i < m; ++i) snr_e += snr(he.col(i), w, 0.2);
        const auto expected = secrecy_from_snr(snr(hb, w, 0.2), snr_e);
        const auto got = secrecy_rate_colluding(hb, he, w, 0.2);
        EXPECT_NEAR(got.c_e, expected.c_e, 1e-12);
        EXPECT_NEAR(got.r_s, expected.r_s, 1e-12);
    }
    EXPECT_THROW(secrecy_rate_colluding(CVector::Ones(2), CMatrix(2, 0), CVector::Ones(2), 1.0), DomainError);
}

TEST(Secrecy, PhaseInvarianceAndClamping) {
    Xoshiro256 rng(8);
    for (int i = 0; i < 50; ++i) {
        const CVector hb = random_vector(rng, 4);
        const CVector he = random_vector(rng, 4);
        const CVector w = random_vector(rng, 4);
        const auto r = secrecy_rate_single(hb, he, w, 0.3);
        const auto rot = secrecy_rate_single(hb, he, w * std::polar(1.0, rng.uniform(0, 2 * kPi)), 0.3);
        EXPECT_NEAR(r.r_s_unclamped, rot.r_s_unclamped, 1e-12);
        EXPECT_GE(r.r_s, 0.0);
        if (r.c_e >= r.c_b) {
            EXPECT_EQ(r.r_s, 0.0);
        }
    }
    EXPECT_EQ(secrecy_rate_single(CVector::Ones(3), CVector::Ones(3) * 0.5, CVector::Zero(3), 1.0).r_s, 0.0);
}

TEST(Secrecy, RejectsNonPositiveNoise) {
    EXPECT_THROW(snr(CVector::Ones(2), CVector::Ones(2), 0.0), DomainError);
    EXPECT_THROW(snr(CVector::Ones(2), CVector::Ones(2), -1.0), DomainError);
}
