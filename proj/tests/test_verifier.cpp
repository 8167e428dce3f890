// Copyright 2026 The semiglobal Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "semiglobal/crystal.hpp"
#include "semiglobal/decomposer.hpp"
#include "semiglobal/drivesynth.hpp"
#include "semiglobal/errors.hpp"
#include "semiglobal/verifier.hpp"

namespace sg = semiglobal;

namespace {

sg::IonCrystal chain(int n) {
    sg::TrapConfig config;
    config.num_ions = n;
    return sg::make_crystal(config);
}

sg::LayerPlan random_plan(int n, int layers, sg::Rng &rng) {
    sg::LayerPlan plan;
    plan.partition = sg::BeamPartition::contiguous(n, 1);
    for (int l = 0; l < layers; ++l) {
        sg::PlanLayer layer;
        layer.flip = sg::FlipLayer::random(n, rng);
        layer.phi_layer = sg::TargetGate::random(n, rng).phi;
        plan.layers.push_back(layer);
    }
    return plan;
}

struct Compiled {
    sg::ModeMatrixSet modes;
    sg::FlipBasis basis;
};

Compiled compiled(int n, int beams) {
    Compiled out;
    out.modes = sg::mode_matrices(chain(n));
    sg::SearchOptions options;
    options.pool_size = 4;
    out.basis = sg::search_flip_basis(out.modes, sg::BeamPartition::contiguous(n, beams), options);
    return out;
}

}  // namespace

TEST(Integrate, ZeroDrive) {
    const sg::IonCrystal c = chain(3);
    sg::DriveSolution drive;
    drive.grid = sg::make_frequency_grid(c);
    drive.partition = sg::BeamPartition::contiguous(3, 1);
    drive.amplitudes = sg::Matrix::Zero(1, drive.grid.size());
    drive.phases = sg::Matrix::Zero(1, drive.grid.size());
    const auto out = sg::integrate_drive(c, drive);
    EXPECT_EQ(out.achieved_phi, sg::Matrix::Zero(3, 3));
    EXPECT_EQ(out.residual_displacements, sg::Vector::Zero(3));
}

TEST(Integrate, TwoIonQuarterPiGate) {
    const sg::IonCrystal c = chain(2);
    const sg::FrequencyGrid grid = sg::make_frequency_grid(c);
    const sg::PhaseKernel k = sg::build_phase_kernel(c, grid);
    sg::Matrix phi = sg::Matrix::Zero(2, 2);
    phi(0, 1) = phi(1, 0) = std::numbers::pi / 4.0;
    const auto drive = sg::synthesize_drive(phi, c, grid, k, sg::BeamPartition::contiguous(2, 1), 0);
    const auto out = sg::integrate_drive(c, drive);
    EXPECT_NEAR(out.achieved_phi(0, 1), std::numbers::pi / 4.0, 1e-6);
    EXPECT_LE(out.residual_displacements.maxCoeff(), 1e-8);
}

TEST(Integrate, AgreesWithClosedFormKernel) {
    for (int beams : {1, 3}) {
        const int n = 6;
        const sg::IonCrystal c = chain(n);
        const sg::FrequencyGrid grid = sg::make_frequency_grid(c);
        const sg::PhaseKernel k = sg::build_phase_kernel(c, grid);
        const auto setup = compiled(n, beams);
        sg::Rng rng(beams);
        const auto plan = sg::decompose_target(sg::TargetGate::random(n, rng), setup.basis, setup.modes);
        const sg::Matrix &phi = plan.layers[0].phi_layer;
        const auto drive = sg::synthesize_drive(phi, c, grid, k, sg::BeamPartition::contiguous(n, beams), 3);
        const auto out = sg::integrate_drive(c, drive);
        const sg::Matrix closed = sg::kernel_phases(drive, c, k);
        EXPECT_LE((out.achieved_phi - closed).cwiseAbs().maxCoeff(), 1e-6 * closed.cwiseAbs().maxCoeff());
        EXPECT_LE((out.achieved_phi - phi).cwiseAbs().maxCoeff(), 1e-5);
        EXPECT_LE(out.residual_displacements.maxCoeff(), 1e-8);
        EXPECT_LE(sg::max_asymmetry(out.achieved_phi), 1e-12);
    }
}

TEST(Integrate, RejectsOversizedOrMismatchedDrives) {
    const sg::IonCrystal big = chain(13);
    sg::DriveSolution drive;
    drive.grid = sg::make_frequency_grid(big);
    drive.partition = sg::BeamPartition::contiguous(13, 1);
    drive.amplitudes = sg::Matrix::Zero(1, drive.grid.size());
    drive.phases = sg::Matrix::Zero(1, drive.grid.size());
    EXPECT_THROW(sg::integrate_drive(big, drive), sg::ValidationError);
    const sg::IonCrystal small = chain(3);
    EXPECT_THROW(sg::integrate_drive(small, drive), sg::ValidationError);
    drive.partition = sg::BeamPartition::contiguous(3, 1);
    drive.amplitudes(0, 0) = std::nan("");
    EXPECT_THROW(sg::integrate_drive(small, drive), sg::ValidationError);
}

TEST(Compose, TwoQubitQuarterPi) {
    sg::LayerPlan plan;
    plan.partition = sg::BeamPartition::contiguous(2, 1);
    sg::PlanLayer layer;
    layer.flip = sg::FlipLayer::none(2);
    layer.phi_layer = sg::Matrix::Zero(2, 2);
    layer.phi_layer(0, 1) = layer.phi_layer(1, 0) = std::numbers::pi / 4.0;
    plan.layers.push_back(layer);
    const sg::DiagonalUnitary expected{{0.0, -std::numbers::pi, -std::numbers::pi, 0.0}};
    EXPECT_LE(sg::max_phase_difference(sg::compose_plan(plan), expected), 1e-15);
    EXPECT_LE(sg::max_phase_difference(sg::compose_plan_dense(plan), expected), 1e-15);
}

TEST(Compose, ComplementFlipAndEmptyPlan) {
    sg::Rng rng(6);
    sg::LayerPlan plan = random_plan(5, 1, rng);
    sg::LayerPlan unflipped = plan;
    unflipped.layers[0].flip = sg::FlipLayer::none(5);
    sg::LayerPlan all = plan;
    all.layers[0].flip = sg::FlipLayer(std::vector<uint8_t>(5, 1));
    EXPECT_LE(sg::max_phase_difference(sg::compose_plan_dense(all), sg::compose_plan_dense(unflipped)), 1e-12);

    sg::LayerPlan empty;
    empty.partition = sg::BeamPartition::contiguous(4, 1);
    const auto phases = sg::compose_plan(empty).phases;
    ASSERT_EQ(phases.size(), 16u);
    for (double p : phases) {
        EXPECT_EQ(p, 0.0);
    }
}

TEST(Compose, SignRuleMatchesDenseConjugation) {
    sg::Rng rng(123);
    for (int trial = 0; trial < 50; ++trial) {
        const int n = 2 + static_cast<int>(rng.below(5));
        const sg::LayerPlan plan = random_plan(n, 1 + static_cast<int>(rng.below(3)), rng);
        EXPECT_LE(sg::max_phase_difference(sg::compose_plan(plan), sg::compose_plan_dense(plan)), 1e-10);
    }
}

TEST(Compose, RejectsUnenumerableSizes) {
    sg::LayerPlan plan;
    plan.partition = sg::BeamPartition::contiguous(11, 1);
    EXPECT_THROW(sg::compose_plan(plan), sg::ValidationError);
    EXPECT_THROW(sg::ideal_unitary(sg::Matrix::Zero(11, 11)), sg::ValidationError);
}

TEST(Certify, CompiledPlansPass) {
    for (int n = 3; n <= 8; ++n) {
        for (int beams : {1, 2, n}) {
            const auto setup = compiled(n, beams);
            sg::Rng rng(sg::derive_seed(n, beams));
            for (int trial = 0; trial < 5; ++trial) {
                const auto target = sg::TargetGate::random(n, rng);
                const auto plan = sg::decompose_target(target, setup.basis, setup.modes);
                const auto cert = sg::certify(plan, target);
                EXPECT_TRUE(cert.pass) << "N=" << n << " B=" << beams << " error " << cert.max_phase_error;
            }
        }
    }
}

TEST(Certify, PerturbedAlphaFails) {
    const auto setup = compiled(6, 1);
    sg::Rng rng(31);
    const auto target = sg::TargetGate::random(6, rng);
    auto plan = sg::decompose_target(target, setup.basis, setup.modes);
    plan.layers[0].alpha(1) += 1e-3;
    plan.layers[0].phi_layer = sg::layer_coupling(plan.layers[0].alpha, setup.modes, plan.partition);
    const auto cert = sg::certify(plan, target);
    EXPECT_FALSE(cert.pass);
    EXPECT_GE(cert.max_phase_error, 1e-4);
}

TEST(Certify, ZeroTargetEmptyPlan) {
    sg::LayerPlan plan;
    plan.partition = sg::BeamPartition::contiguous(4, 1);
    const auto cert = sg::certify(plan, sg::TargetGate::zero(4));
    EXPECT_TRUE(cert.pass);
    EXPECT_EQ(cert.max_phase_error, 0.0);
}

TEST(Certify, SizeMismatchRejected) {
    sg::LayerPlan plan;
    plan.partition = sg::BeamPartition::contiguous(4, 1);
    EXPECT_THROW(sg::certify(plan, sg::TargetGate::zero(5)), sg::ValidationError);
}
