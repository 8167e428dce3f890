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

#ifndef SEMIGLOBAL_DECOMPOSER_HPP
#define SEMIGLOBAL_DECOMPOSER_HPP

#include <vector>

#include "semiglobal/flipbasis.hpp"

namespace semiglobal {

/// Relative max-abs reconstruction error accepted from a full-rank basis.
inline constexpr double kDecompositionTolerance = 1e-9;

/// Desired ZZ phase matrix (radians). Symmetric with exactly zero diagonal.
struct TargetGate {
    Matrix phi;

    int size() const { return static_cast<int>(phi.rows()); }
    /// Throws ValidationError on asymmetry above 1e-12 or a nonzero diagonal.
    void validate() const;

    static TargetGate zero(int num_ions);
    /// Off-diagonal entries drawn uniformly from [-1, 1).
    static TargetGate random(int num_ions, Rng &rng);
};

struct PlanLayer {
    FlipLayer flip;
    /// Mode coefficients, block-major: alpha[k * N + j] drives mode j inside coupling block k.
    Vector alpha;
    /// Coupling matrix the layer's drive must produce, before flips. Zero diagonal.
    Matrix phi_layer;
};

struct LayerPlan {
    std::vector<PlanLayer> layers;
    BeamPartition partition;
    double residual = 0.0;

    int num_ions() const { return partition.size(); }
};

/// Coefficients of one coupling block: coefficients(l, j) multiplies M^(j) o S^(l) on that block.
struct BlockCoefficients {
    int beam_a = 0;
    int beam_b = 0;
    Matrix coefficients;
    double residual = 0.0;
};

struct BlockPlan {
    std::vector<BlockCoefficients> blocks;

    /// Reassembles the per-block solutions into a layer plan over `basis`.
    LayerPlan to_layer_plan(const FlipBasis &basis, const ModeMatrixSet &modes) const;
};

/// Minimum-norm coefficients pinv(A) vec(target) over a complete basis.
///
/// Throws IncompleteBasisError for a rank-deficient basis and SolverError when the
/// reconstruction misses the target by more than kDecompositionTolerance * max|target|.
LayerPlan decompose_target(const TargetGate &target, const FlipBasis &basis, const ModeMatrixSet &modes);

/// Solves each coupling block independently on its own restricted columns.
/// Throws IncompleteBasisError naming the first rank-deficient block.
BlockPlan block_decompose(const TargetGate &target, const FlipBasis &basis, const ModeMatrixSet &modes,
                          const BeamPartition &partition);

/// sum_l phi^(l) o S^(l) with phi^(l) rebuilt from alpha; zero diagonal.
Matrix reconstruct(const LayerPlan &plan, const ModeMatrixSet &modes);

/// Layer coupling matrices implied by `alpha` on `partition`.
Matrix layer_coupling(const Vector &alpha, const ModeMatrixSet &modes, const BeamPartition &partition);

/// max |alpha| over all layers, blocks and modes.
double plan_power_proxy(const LayerPlan &plan);

}  // namespace semiglobal

#endif
