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

#ifndef SEMIGLOBAL_CRYSTAL_HPP
#define SEMIGLOBAL_CRYSTAL_HPP

#include <vector>

#include "semiglobal/linalg.hpp"

namespace semiglobal {

/// Trap context for a linear chain in dimensionless units.
///
/// Lengths are measured in units of the Coulomb length, so that the axial potential is
/// sum_i u_i^2 / 2 + sum_{i<j} 1 / |u_i - u_j|. Frequencies are scaled so that the
/// centre-of-mass mode sits at `axial_frequency`.
struct TrapConfig {
    int num_ions = 2;
    double axial_frequency = 1.0;
    double lamb_dicke_scale = 0.1;

    void validate() const;
};

/// Mode data of an N-ion chain. Column j of `mode_vectors` is the participation vector O^(j).
struct IonCrystal {
    Vector positions;
    Vector mode_freqs;
    Matrix mode_vectors;
    Vector lamb_dicke;

    int size() const { return static_cast<int>(positions.size()); }

    /// Throws ValidationError naming the first violated invariant.
    void validate() const;
};

/// Rank-one mode matrices M^(j) = O^(j) O^(j)^T.
struct ModeMatrixSet {
    std::vector<Matrix> matrices;
    int offdiag_rank = 0;

    int size() const { return static_cast<int>(matrices.size()); }
};

/// Equilibrium of the harmonic Coulomb chain by damped Newton iteration.
/// Throws SolverError if the gradient norm is not below 1e-10 after 200 iterations.
Vector compute_equilibrium_positions(const TrapConfig &config);

/// Axial normal modes at `positions`. Lamb-Dicke parameters scale as 1/sqrt(nu_j).
IonCrystal compute_normal_modes(const TrapConfig &config, const Vector &positions);

/// compute_equilibrium_positions followed by compute_normal_modes.
IonCrystal make_crystal(const TrapConfig &config);

ModeMatrixSet mode_matrices(const IonCrystal &crystal);

/// Validates externally supplied mode data and returns it as a crystal.
IonCrystal load_crystal(Vector positions, Vector mode_freqs, Matrix mode_vectors, Vector lamb_dicke);

/// Gradient of the dimensionless chain potential; exposed for tests.
Vector chain_potential_gradient(const Vector &positions);

/// Hessian of the dimensionless chain potential; exposed for tests.
Matrix chain_potential_hessian(const Vector &positions);

}  // namespace semiglobal

#endif
