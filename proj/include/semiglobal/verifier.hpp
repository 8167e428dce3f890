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

#ifndef SEMIGLOBAL_VERIFIER_HPP
#define SEMIGLOBAL_VERIFIER_HPP

#include <vector>

#include "semiglobal/crystal.hpp"
#include "semiglobal/decomposer.hpp"
#include "semiglobal/drivesynth.hpp"

namespace semiglobal {

/// Largest basis-state phase error (radians) accepted by certify.
inline constexpr double kCertifyTolerance = 1e-8;
/// Largest ion count accepted by the 2^N phase enumeration.
inline constexpr int kMaxEnumeratedIons = 10;
/// Largest ion count accepted by integrate_drive.
inline constexpr int kMaxIntegratedIons = 12;

struct PhaseOutcome {
    Matrix achieved_phi;
    /// Per mode: sum over ions of |eta_j O_n^j alpha_{j, b(n)}(T)|.
    Vector residual_displacements;
};

struct IntegrationOptions {
    double abs_tolerance = 1e-12;
    double rel_tolerance = 1e-12;
    /// The gate time is split into this many independently checked pieces.
    int subintervals = 64;
};

/// Time-domain integration of the drive's displacement and phase integrals.
///
/// Independent of the closed-form kernels: it only evaluates f_b(t) and the mode
/// exponentials. Throws QuadratureError naming the failing subinterval.
PhaseOutcome integrate_drive(const IonCrystal &crystal, const DriveSolution &drive,
                             const IntegrationOptions &options = {});

/// Computational-basis phases; entry 0 (all qubits |0>, z = +1) is zero.
struct DiagonalUnitary {
    std::vector<double> phases;
};

/// Phases of sum_l phi^(l) o S^(l) under the 2 phi_nm Z_n Z_m convention.
DiagonalUnitary compose_plan(const LayerPlan &plan);

/// Same composition by explicit 2^N x 2^N matrices and X-flip conjugation.
DiagonalUnitary compose_plan_dense(const LayerPlan &plan);

/// Phases of the single ideal layer exp(i sum_{n<m} 2 phi_nm Z_n Z_m).
DiagonalUnitary ideal_unitary(const Matrix &phi);

/// Largest |a_k - b_k| with differences wrapped into (-pi, pi].
double max_phase_difference(const DiagonalUnitary &a, const DiagonalUnitary &b);

struct Certificate {
    bool pass = false;
    double max_phase_error = 0.0;
};

/// Compares compose_plan(plan) with ideal_unitary(target). Requires N <= kMaxEnumeratedIons.
Certificate certify(const LayerPlan &plan, const TargetGate &target, double tolerance = kCertifyTolerance);

}  // namespace semiglobal

#endif
