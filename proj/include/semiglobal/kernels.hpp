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

// Data-parallel inner loops. Every OpenMP kernel has a serial twin that computes the
// same values in the same per-element order; tests assert they agree exactly.

#ifndef SEMIGLOBAL_KERNELS_HPP
#define SEMIGLOBAL_KERNELS_HPP

#include <span>
#include <vector>

#include "semiglobal/flipbasis.hpp"
#include "semiglobal/linalg.hpp"

namespace semiglobal::kernels {

/// Span of the committed layers' collection columns, kept per coupling block.
class LayerSpan {
   public:
    LayerSpan(const ModeMatrixSet &modes, const BeamPartition &partition);

    int rank() const { return rank_; }
    int block_rank(int block) const { return ranks_[block]; }
    int num_blocks() const { return static_cast<int>(blocks_.size()); }
    int full_rank() const { return full_rank_; }
    /// Absolute singular-value cutoff currently in force.
    double tolerance() const { return tolerance_; }

    /// Rank increase of one block if `layer` were appended.
    int block_gain(int block, const FlipLayer &layer) const;
    /// Rank increase of the whole collection if `layer` were appended.
    int gain(const FlipLayer &layer) const;
    /// Per-block gains of `layer`.
    std::vector<int> block_gains(const FlipLayer &layer) const;

    void append(const FlipLayer &layer);

   private:
    struct BlockState {
        std::vector<int> rows;
        std::vector<int> row_ion_a;
        std::vector<int> row_ion_b;
        Matrix base;
        Matrix committed;
        Matrix basis;
    };

    Matrix block_columns(const BlockState &block, const FlipLayer &layer) const;

    std::vector<BlockState> blocks_;
    std::vector<int> ranks_;
    int rank_ = 0;
    int full_rank_ = 0;
    double base_scale_ = 0.0;
    double tolerance_ = 0.0;
};

/// Rank gain of each candidate layer. Serial reference.
std::vector<int> evaluate_gains_serial(const LayerSpan &span, std::span<const FlipLayer> candidates);
/// Rank gain of each candidate layer. OpenMP over candidates.
std::vector<int> evaluate_gains_parallel(const LayerSpan &span, std::span<const FlipLayer> candidates);

/// Single (b < 0) or double bit toggle of a working layer.
struct Toggle {
    int a = 0;
    int b = -1;
};

/// All single toggles in ion order followed by all pairs (a < b) in lexicographic order.
std::vector<Toggle> all_toggles(int num_ions);

/// Total rank gain of `working` with each toggle applied. Blocks a toggle cannot change
/// (no ion of either beam toggled, or a whole beam toggled) reuse `working_gains`.
std::vector<int> evaluate_toggles_serial(const LayerSpan &span, const FlipLayer &working,
                                         std::span<const int> working_gains, std::span<const Toggle> toggles,
                                         const BeamPartition &partition);
/// OpenMP twin of evaluate_toggles_serial.
std::vector<int> evaluate_toggles_parallel(const LayerSpan &span, const FlipLayer &working,
                                           std::span<const int> working_gains, std::span<const Toggle> toggles,
                                           const BeamPartition &partition);

/// Computational-basis phases 2 * sum_{n<m} coupling_nm z_n z_m for every z in {+1,-1}^N,
/// minus the all-(+1) value. State index bit (N-1-n) set means z_n = -1. Serial reference.
std::vector<double> basis_state_phases_serial(const Matrix &coupling);
/// Same as basis_state_phases_serial with OpenMP over basis states.
std::vector<double> basis_state_phases_parallel(const Matrix &coupling);

}  // namespace semiglobal::kernels

#endif
