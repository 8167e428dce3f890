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

// Multi-tone drive synthesis.
//
// Beam b applies f_b(t) = sum_m r_{b,m} cos(w_m t + p_{b,m}) to all of its ions. To second
// order the gate is exp(i sum_{n<m} 2 phi_nm Z_n Z_m) with
//   phi_nm = sum_j eta_j^2 O_n^j O_m^j  r_{b(n)}^T K^j r_{b(m)},
// and mode j ends displaced by eta_j O_n^j D^j . r_{b(n)} for each ion n.

#ifndef SEMIGLOBAL_DRIVESYNTH_HPP
#define SEMIGLOBAL_DRIVESYNTH_HPP

#include <array>
#include <cstdint>
#include <optional>
#include <vector>

#include "semiglobal/crystal.hpp"
#include "semiglobal/decomposer.hpp"
#include "semiglobal/flipbasis.hpp"

namespace semiglobal {

/// Relative max-abs pair-phase error accepted from synthesize_drive.
inline constexpr double kDriveTolerance = 1e-6;
/// Tones closer than this to a mode frequency are rejected.
inline constexpr double kToneCollisionTolerance = 1e-9;

struct FrequencyGrid {
    double gate_time = 0.0;
    std::vector<double> tones;

    int size() const { return static_cast<int>(tones.size()); }
    void validate() const;
};

/// Default overhang of the tone grid on each side, as a fraction of the mode bandwidth.
inline constexpr double kGridMarginFraction = 0.25;

/// Uniform grid of `num_tones` (default 4N + 4) tones at the midpoints of equal cells covering
/// [nu_min - w, nu_max + w] with w = margin_fraction * (nu_max - nu_min).
/// Gate time 2 pi / spacing makes every tone pair commensurate.
FrequencyGrid make_frequency_grid(const IonCrystal &crystal, int num_tones = 0,
                                  double margin_fraction = kGridMarginFraction);

struct PhaseKernel {
    /// kernel[j](p, q): symmetric tone-pair phase integral for mode j.
    std::vector<Matrix> kernel;
    /// displacement[j](p) = int_0^T cos(w_p t) exp(i nu_j t) dt.
    std::vector<ComplexVector> displacement;
};

/// Closed-form kernels for zero tone phases. Throws SingularKernelError on a tone-mode collision.
PhaseKernel build_phase_kernel(const IonCrystal &crystal, const FrequencyGrid &grid);

/// Orthonormal per-beam amplitude bases that close every motional loop.
struct DisplacementNullspace {
    /// bases[b] is M x d_b; columns r with D^j . r = 0 for every mode beam b couples to.
    std::vector<Matrix> bases;
    /// Largest per-mode displacement of any basis column.
    double max_residual = 0.0;
};

/// Throws InfeasibleGridError when some beam has no admissible amplitudes.
DisplacementNullspace displacement_nullspace(const PhaseKernel &kernel, const IonCrystal &crystal,
                                             const BeamPartition &partition);

struct DriveSolution {
    FrequencyGrid grid;
    /// B x M amplitudes r_{b,m} (units of the Rabi frequency).
    Matrix amplitudes;
    /// B x M tone phases (radians).
    Matrix phases;
    BeamPartition partition;
    double constraint_residual = 0.0;
    uint64_t seed = 0;

    /// Euclidean norm over all tones and beams.
    double total_power() const { return amplitudes.norm(); }
};

struct SynthesisOptions {
    int restarts = 8;
    /// L-BFGS iteration cap per restart, summed over augmented-Lagrangian rounds.
    int max_iterations = 5000;
    double tolerance = kDriveTolerance;
};

/// Minimum-power amplitudes reproducing `layer_phi` subject to closed motional loops.
///
/// Augmented Lagrangian in nullspace coordinates with L-BFGS inner solves, seeded
/// restarts and a Gauss-Newton polish. The lowest-power restart within tolerance wins.
/// Throws SolverError with the best residual when no restart converges.
DriveSolution synthesize_drive(const Matrix &layer_phi, const IonCrystal &crystal, const FrequencyGrid &grid,
                               const PhaseKernel &kernel, const BeamPartition &partition, uint64_t seed,
                               const SynthesisOptions &options = {});

/// Pair phases of `drive` from the closed-form kernel. `drive` must use zero tone phases.
Matrix kernel_phases(const DriveSolution &drive, const IonCrystal &crystal, const PhaseKernel &kernel);

/// Per-mode worst-case displacement sum_n |eta_j O_n^j D^j . r_{b(n)}| from the closed form.
Vector kernel_displacements(const DriveSolution &drive, const IonCrystal &crystal, const PhaseKernel &kernel);

struct TwoBeamAmplitudes {
    /// Amplitudes of tones n1, n2, n3 in beam a.
    std::array<double, 3> beam_a{};
    /// Amplitudes of tones n2, n3, n4 in beam b.
    std::array<double, 3> beam_b{};
};

/// Adiabatic three-tone-per-beam construction. Phases are in units of phi0.
///
/// Beam a carries tones (n1, n2, n3), beam b carries (n2, n3, n4); each tone contributes
/// r r' / n. Requires n2 > 0, n3 < 0, sign(n1) = sign(phi_a), sign(n4) = sign(phi_b);
/// throws ValidationError otherwise.
TwoBeamAmplitudes adiabatic_two_beam(double phi_a, double phi_b, double phi_ab, std::array<int, 4> tone_indices,
                                     double phi0 = 1.0);

/// Sum of absolute eigenvalues of a symmetric matrix.
double nuclear_norm(const Matrix &phi);

struct PowerRow {
    int beams = 0;
    double mean_power_ratio = 0.0;
    int num_converged = 0;
    int num_layers = 0;
};

struct PowerReportOptions {
    int num_gates = 10;
    uint64_t seed = 0;
    int num_tones = 0;
    SynthesisOptions synthesis;
    SearchOptions search;
};

/// Mean of total_power / nuclear_norm(phi_layer) over every nonzero layer of
/// `num_gates` seeded random targets, per beam count. Layers that fail to converge
/// are counted in num_layers but not in num_converged or the mean.
std::vector<PowerRow> power_ratio_report(const IonCrystal &crystal, const std::vector<int> &beam_counts,
                                         const PowerReportOptions &options);

}  // namespace semiglobal

#endif
