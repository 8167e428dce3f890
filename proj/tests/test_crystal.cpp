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

#include "semiglobal/crystal.hpp"
#include "semiglobal/errors.hpp"
#include "semiglobal/flipbasis.hpp"

namespace sg = semiglobal;

namespace {

sg::IonCrystal chain(int n) {
    sg::TrapConfig config;
    config.num_ions = n;
    return sg::make_crystal(config);
}

}  // namespace

TEST(Equilibrium, TwoIonsMatchClosedForm) {
    sg::TrapConfig config;
    config.num_ions = 2;
    const sg::Vector u = sg::compute_equilibrium_positions(config);
    const double expected = std::pow(2.0, -2.0 / 3.0);
    EXPECT_NEAR(u(0), -expected, 1e-12);
    EXPECT_NEAR(u(1), expected, 1e-12);
}

TEST(Equilibrium, GradientVanishesAndChainIsSymmetric) {
    for (int n = 2; n <= 40; ++n) {
        sg::TrapConfig config;
        config.num_ions = n;
        const sg::Vector u = sg::compute_equilibrium_positions(config);
        EXPECT_LE(sg::chain_potential_gradient(u).norm(), 1e-10) << "N=" << n;
        for (int k = 0; k < n; ++k) {
            EXPECT_NEAR(u(k), -u(n - 1 - k), 1e-10);
        }
        for (int k = 1; k < n; ++k) {
            EXPECT_LT(u(k - 1), u(k));
        }
    }
}

TEST(Equilibrium, OddChainHasCentredMiddleIon) {
    sg::TrapConfig config;
    config.num_ions = 3;
    EXPECT_NEAR(sg::compute_equilibrium_positions(config)(1), 0.0, 1e-12);
}

TEST(NormalModes, TwoIonSpectrum) {
    const sg::IonCrystal c = chain(2);
    EXPECT_NEAR(c.mode_freqs(0), 1.0, 1e-12);
    EXPECT_NEAR(c.mode_freqs(1), std::sqrt(3.0), 1e-12);
    EXPECT_NEAR(std::abs(c.mode_vectors(0, 0)), 1.0 / std::sqrt(2.0), 1e-12);
    EXPECT_NEAR(c.mode_vectors(0, 0), c.mode_vectors(1, 0), 1e-12);
}

TEST(NormalModes, OrthonormalSortedWithUniformComMode) {
    for (int n : {2, 3, 5, 8, 12, 20, 36}) {
        const sg::IonCrystal c = chain(n);
        const sg::Matrix gram = c.mode_vectors.transpose() * c.mode_vectors;
        EXPECT_LE((gram - sg::Matrix::Identity(n, n)).cwiseAbs().maxCoeff(), 1e-10);
        for (int j = 1; j < n; ++j) {
            EXPECT_LT(c.mode_freqs(j - 1), c.mode_freqs(j));
        }
        EXPECT_GT(c.mode_freqs(0), 0.0);
        for (int k = 0; k < n; ++k) {
            EXPECT_NEAR(std::abs(c.mode_vectors(k, 0)), 1.0 / std::sqrt(n), 1e-10);
        }
    }
}

TEST(NormalModes, LambDickeScalesWithInverseRootFrequency) {
    sg::TrapConfig config;
    config.num_ions = 5;
    config.lamb_dicke_scale = 0.07;
    const sg::IonCrystal c = sg::make_crystal(config);
    for (int j = 0; j < 5; ++j) {
        EXPECT_NEAR(c.lamb_dicke(j), 0.07 / std::sqrt(c.mode_freqs(j)), 1e-14);
    }
}

TEST(ModeMatrices, CompletenessAndRank) {
    for (int n : {2, 4, 7, 12}) {
        const sg::ModeMatrixSet modes = sg::mode_matrices(chain(n));
        sg::Matrix sum = sg::Matrix::Zero(n, n);
        sg::Matrix columns(n * (n - 1) / 2, n);
        for (int j = 0; j < n; ++j) {
            sum += modes.matrices[j];
            EXPECT_LE(sg::max_asymmetry(modes.matrices[j]), 0.0);
            columns.col(j) = sg::vectorize_offdiag(modes.matrices[j]);
        }
        EXPECT_LE((sum - sg::Matrix::Identity(n, n)).cwiseAbs().maxCoeff(), 1e-10);
        EXPECT_EQ(modes.offdiag_rank, n - 1);
        EXPECT_EQ(sg::numerical_rank(columns), n - 1);
    }
}

TEST(ModeMatrices, ComModeIsConstant) {
    const sg::ModeMatrixSet modes = sg::mode_matrices(chain(6));
    EXPECT_LE((modes.matrices[0].array() - 1.0 / 6.0).abs().maxCoeff(), 1e-12);
}

TEST(LoadCrystal, AcceptsGeneratedDataAndRejectsPerturbedModes) {
    const sg::IonCrystal c = chain(5);
    const sg::IonCrystal same = sg::load_crystal(c.positions, c.mode_freqs, c.mode_vectors, c.lamb_dicke);
    EXPECT_EQ(same.mode_vectors, c.mode_vectors);
    sg::Matrix bad = c.mode_vectors;
    bad(0, 1) += 1e-3;
    EXPECT_THROW(sg::load_crystal(c.positions, c.mode_freqs, bad, c.lamb_dicke), sg::ValidationError);
}

TEST(LoadCrystal, RejectsUnsortedOrNonPositiveFrequencies) {
    const sg::IonCrystal c = chain(3);
    sg::Vector freqs = c.mode_freqs;
    std::swap(freqs(0), freqs(1));
    EXPECT_THROW(sg::load_crystal(c.positions, freqs, c.mode_vectors, c.lamb_dicke), sg::ValidationError);
    freqs = c.mode_freqs;
    freqs(0) = -1.0;
    EXPECT_THROW(sg::load_crystal(c.positions, freqs, c.mode_vectors, c.lamb_dicke), sg::ValidationError);
}

TEST(TrapConfig, RejectsInvalidParameters) {
    sg::TrapConfig one;
    one.num_ions = 1;
    EXPECT_THROW(sg::make_crystal(one), sg::ValidationError);
    sg::TrapConfig axial;
    axial.axial_frequency = 0.0;
    EXPECT_THROW(sg::make_crystal(axial), sg::ValidationError);
    sg::TrapConfig eta;
    eta.lamb_dicke_scale = -0.1;
    EXPECT_THROW(sg::make_crystal(eta), sg::ValidationError);
}

TEST(NormalModes, AxialFrequencyScalesSpectrum) {
    sg::TrapConfig config;
    config.num_ions = 4;
    config.axial_frequency = 2.5;
    const sg::IonCrystal scaled = sg::make_crystal(config);
    const sg::IonCrystal unit = chain(4);
    EXPECT_LE((scaled.mode_freqs - 2.5 * unit.mode_freqs).cwiseAbs().maxCoeff(), 1e-10);
}
