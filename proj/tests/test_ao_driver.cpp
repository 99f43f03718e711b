// SPDX-License-Identifier: Apache-2.0
#include "faa/ao_driver.hpp"
#include "faa/harness/experiment.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace faa;

namespace {

Scenario default_scenario(DeformationModel model, int trial, int m = 1, double xi = 0.0) {
    ExperimentConfig cfg;
    cfg.m_eves = m;
    cfg.xi = xi;
    return make_scenario(cfg, model, trial);
}

} // namespace

TEST(AoDriver, InitializationAtFullPowerAndMidpoint) {
    const auto rot = initialize(default_scenario(DeformationModel::Rotate, 0));
    EXPECT_NEAR(rot.w0.w.squaredNorm(), 1e-3, 1e-15);
    EXPECT_EQ(rot.psi0, 0.0);
    EXPECT_FALSE(rot.fallback);
    const auto bend = initialize(default_scenario(DeformationModel::Bend, 0));
    EXPECT_NEAR(bend.psi0, 0.79412, 5e-6);
}

TEST(AoDriver, JointTraceIsMonotoneAndConverges) {
    for (auto model : {DeformationModel::Rotate, DeformationModel::Bend, DeformationModel::Fold}) {
        for (int trial = 0; trial < 5; ++trial) {
            const auto tr = run_ao(default_scenario(model, trial), Scheme::Joint);
            ASSERT_FALSE(tr.failed) << tr.diagnostic;
            EXPECT_TRUE(tr.converged);
            for (std::size_t k = 1; k < tr.iterations.size(); ++k)
                EXPECT_GE(tr.iterations[k].r_s_design, tr.iterations[k - 1].r_s_design - 1e-9);
            EXPECT_NEAR(tr.w.squaredNorm(), 1e-3, 1e-15);
        }
    }
}

TEST(AoDriver, PlainAlternationIsMonotoneWithoutExtrapolation) {
    AoOptions plain;
    plain.max_extrapolations = 0;
    for (auto model : {DeformationModel::Rotate, DeformationModel::Fold}) {
        for (int trial = 0; trial < 3; ++trial) {
            const auto tr = run_ao(default_scenario(model, trial), Scheme::Joint, plain);
            ASSERT_FALSE(tr.failed) << tr.diagnostic;
            for (std::size_t k = 1; k < tr.iterations.size(); ++k)
                EXPECT_GE(tr.iterations[k].r_s_design, tr.iterations[k - 1].r_s_design - 1e-9);
        }
    }
}

TEST(AoDriver, ExtrapolationShortensRidgeCrawl) {
    // Plain alternation creeps along ridges of the joint objective; the
    // extrapolated run should need far fewer outer iterations on average and
    // end no worse by more than the convergence tolerance.
    AoOptions plain;
    plain.max_extrapolations = 0;
    int plain_iterations = 0, fast_iterations = 0;
    for (int trial = 0; trial < 10; ++trial) {
        const auto sc = default_scenario(DeformationModel::Rotate, trial);
        const auto slow = run_ao(sc, Scheme::Joint, plain);
        const auto fast = run_ao(sc, Scheme::Joint);
        plain_iterations += slow.outer_iterations();
        fast_iterations += fast.outer_iterations();
        EXPECT_LE(fast.outer_iterations(), 40);
    }
    EXPECT_LT(fast_iterations, plain_iterations);
}

TEST(AoDriver, AllSchemesAreMonotone) {
    for (auto scheme : {Scheme::OnlyW, Scheme::OnlyPsi, Scheme::RigidUPA}) {
        for (auto model : {DeformationModel::Rotate, DeformationModel::Bend, DeformationModel::Fold}) {
            const auto tr = run_ao(default_scenario(model, 3, 2), scheme);
            ASSERT_FALSE(tr.failed) << tr.diagnostic;
            for (std::size_t k = 1; k < tr.iterations.size(); ++k)
                EXPECT_GE(tr.iterations[k].r_s_design, tr.iterations[k - 1].r_s_design - 1e-9);
        }
    }
}

TEST(AoDriver, OnlyBeamformerConvergesAtFirstIteration) {
    const auto tr = run_ao(default_scenario(DeformationModel::Fold, 1), Scheme::OnlyW);
    EXPECT_TRUE(tr.converged);
    EXPECT_EQ(tr.outer_iterations(), 1);
}

TEST(AoDriver, RigidSchemeMatchesOnlyBeamformerOnRigidLayout) {
    auto sc = default_scenario(DeformationModel::Rotate, 2);
    const auto rigid_upa = run_ao(sc, Scheme::RigidUPA);
    sc.layout = sc.layout.with_model(DeformationModel::Rigid);
    const auto only_w = run_ao(sc, Scheme::OnlyW);
    EXPECT_EQ(rigid_upa.final_rate(), only_w.final_rate());
    for (const auto &it : rigid_upa.iterations) EXPECT_EQ(it.psi, rigid_upa.iterations.front().psi);
}

TEST(AoDriver, SingleEveMatchesColludingPath) {
    for (auto model : {DeformationModel::Rotate, DeformationModel::Bend, DeformationModel::Fold}) {
        const auto sc = default_scenario(model, 4);
        AoOptions forced;
        forced.force_colluding_path = true;
        const auto a = run_ao(sc, Scheme::Joint);
        const auto b = run_ao(sc, Scheme::Joint, forced);
        ASSERT_EQ(a.iterations.size(), b.iterations.size());
        for (std::size_t k = 0; k < a.iterations.size(); ++k)
            EXPECT_NEAR(a.iterations[k].r_s, b.iterations[k].r_s, 1e-12);
    }
}

TEST(AoDriver, ZeroXiEqualsPerfectCsi) {
    auto with_errors = default_scenario(DeformationModel::Bend, 5, 2, 0.0);
    auto without = with_errors;
    without.error_directions.clear();
    const auto a = run_ao(with_errors, Scheme::Joint);
    const auto b = run_ao(without, Scheme::Joint);
    ASSERT_EQ(a.iterations.size(), b.iterations.size());
    for (std::size_t k = 0; k < a.iterations.size(); ++k) {
        EXPECT_EQ(a.iterations[k].r_s, b.iterations[k].r_s);
        EXPECT_EQ(a.iterations[k].psi, b.iterations[k].psi);
    }
}

TEST(AoDriver, ImperfectCsiReportsTrueRate) {
    const auto tr = run_ao(default_scenario(DeformationModel::Rotate, 6, 1, 0.6), Scheme::Joint);
    ASSERT_FALSE(tr.failed);
    const auto &last = tr.iterations.back();
    EXPECT_NE(last.r_s, std::max(last.r_s_design, 0.0));
}

TEST(AoDriver, DeterministicTrace) {
    const auto sc = default_scenario(DeformationModel::Fold, 7, 2, 0.3);
    const auto a = run_ao(sc, Scheme::Joint);
    const auto b = run_ao(sc, Scheme::Joint);
    ASSERT_EQ(a.iterations.size(), b.iterations.size());
    for (std::size_t k = 0; k < a.iterations.size(); ++k) {
        EXPECT_EQ(a.iterations[k].psi, b.iterations[k].psi);
        EXPECT_EQ(a.iterations[k].r_s, b.iterations[k].r_s);
        EXPECT_EQ(a.iterations[k].r_s_design, b.iterations[k].r_s_design);
    }
    EXPECT_EQ(a.w, b.w);
}

TEST(AoDriver, ConvergedPointIsStationaryOrOnBoundary) {
    int checked = 0;
    for (auto model : {DeformationModel::Rotate, DeformationModel::Bend, DeformationModel::Fold}) {
        for (int trial = 0; trial < 10; ++trial) {
            const auto sc = default_scenario(model, 100 + trial);
            const auto tr = run_ao(sc, Scheme::Joint);
            if (!tr.converged) continue;
            const bool on_edge = tr.psi == sc.layout.psi_min_rad() || tr.psi == sc.layout.psi_max_rad();
            ShapeObjectiveContext ctx{sc.layout, sc.pattern, sc.wavelength_m, tr.w, sc.bob, sc.eves, sc.sigma2_w, {}, false};
            const auto ev = evaluate_shape(ctx, tr.psi);
            if (!on_edge) {
                EXPECT_LT(std::abs(ev.dF), 1e-3) << to_string(model) << " " << trial;
            }
            ++checked;
        }
    }
    EXPECT_GE(checked, 25);
}

TEST(AoDriver, RejectsInvalidScenario) {
    auto sc = default_scenario(DeformationModel::Rotate, 0);
    sc.eves.clear();
    EXPECT_THROW(run_ao(sc, Scheme::Joint), DomainError);
    sc = default_scenario(DeformationModel::Rotate, 0);
    sc.sigma2_w = 0.0;
    EXPECT_THROW(run_ao(sc, Scheme::Joint), DomainError);
    sc = default_scenario(DeformationModel::Rotate, 0);
    AoOptions bad;
    bad.k_ao = 0;
    EXPECT_THROW(run_ao(sc, Scheme::Joint, bad), DomainError);
}

TEST(AoDriver, SchemeNamesRoundTrip) {
    for (auto s : {Scheme::Joint, Scheme::OnlyW, Scheme::OnlyPsi, Scheme::RigidUPA})
        EXPECT_EQ(parse_scheme(to_string(s)), s);
    EXPECT_FALSE(parse_scheme("Both").has_value());
}
