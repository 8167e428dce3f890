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

#ifndef SEMIGLOBAL_FLIPBASIS_HPP
#define SEMIGLOBAL_FLIPBASIS_HPP

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "semiglobal/crystal.hpp"
#include "semiglobal/linalg.hpp"
#include "semiglobal/rng.hpp"

namespace semiglobal {

/// Pattern of single-qubit pi-flips applied around one entangling layer.
///
/// Stored in canonical form (first ion never flipped): a pattern and its complement
/// produce the same sign matrix, so only one representative is kept.
class FlipLayer {
   public:
    FlipLayer() = default;
    explicit FlipLayer(std::vector<uint8_t> bits);

    static FlipLayer none(int num_ions);
    /// Parses "0110"-style strings; character 0 is ion 1.
    static FlipLayer from_string(std::string_view bits);
    /// Canonical pattern with index `code` (bit k of code flips ion k + 1).
    static FlipLayer from_code(int num_ions, uint64_t code);
    static FlipLayer random(int num_ions, Rng &rng);

    int size() const { return static_cast<int>(bits_.size()); }
    bool flipped(int ion) const { return bits_[ion] != 0; }
    const std::vector<uint8_t> &bits() const { return bits_; }

    /// (-1)^{s_n} per ion.
    Vector signs() const;
    std::string to_string() const;

    /// Pattern with ions `a` and (if >= 0) `b` toggled, re-canonicalized.
    FlipLayer toggled(int a, int b = -1) const;

    bool operator==(const FlipLayer &other) const = default;

   private:
    std::vector<uint8_t> bits_;
};

/// S_nm = (-1)^{s_n + s_m}.
Matrix sign_matrix(const FlipLayer &layer);

/// Strict upper triangle in row-major order. Throws ValidationError on asymmetry above 1e-12.
Vector vectorize_offdiag(const Matrix &symmetric);

/// Inverse of vectorize_offdiag; the diagonal is zero.
Matrix devectorize_offdiag(const Vector &offdiag, int num_ions);

/// Row of pair (a, b), a != b, in the off-diagonal vectorization.
int pair_index(int a, int b, int num_ions);

/// Ion pairs whose couplings are controlled by the same pair of beams.
struct CouplingBlock {
    int beam_a = 0;
    int beam_b = 0;
    /// Rows of the off-diagonal vectorization, ascending.
    std::vector<int> pairs;

    bool intra() const { return beam_a == beam_b; }
};

/// Assignment of ions to semi-global beams as contiguous, near-equal segments.
class BeamPartition {
   public:
    BeamPartition() = default;

    /// Splits N ions into B segments; the first N mod B segments get one extra ion.
    static BeamPartition contiguous(int num_ions, int beams);
    /// Zero-based beam index per ion. Throws ValidationError unless it is a contiguous near-equal split.
    static BeamPartition from_assignment(std::vector<int> assignment);

    int size() const { return static_cast<int>(assignment_.size()); }
    int beams() const { return beams_; }
    int beam_of(int ion) const { return assignment_[ion]; }
    const std::vector<int> &assignment() const { return assignment_; }
    std::vector<int> ions_in(int beam) const;

    /// Blocks with at least one ion pair, ordered lexicographically by (beam_a, beam_b), beam_a <= beam_b.
    const std::vector<CouplingBlock> &blocks() const { return blocks_; }
    int num_blocks() const { return static_cast<int>(blocks_.size()); }
    /// Index into blocks() of the block holding pair (a, b).
    int block_of_pair(int a, int b) const;

    bool operator==(const BeamPartition &other) const { return assignment_ == other.assignment_; }

   private:
    explicit BeamPartition(std::vector<int> assignment);

    std::vector<int> assignment_;
    int beams_ = 0;
    std::vector<CouplingBlock> blocks_;
    std::vector<int> block_lookup_;
};

/// Degrees-of-freedom lower bound on the number of entangling layers.
/// ceil(N/2) for B = 1, ceil(N^2 / (B^2 (N - 1))) otherwise.
int layer_bound(int num_ions, int beams);

/// Number of independent couplings the basis has to reach: N(N-1)/2.
int block_dimension(int num_ions, const BeamPartition &partition);

/// Columns of sign-modulated mode matrices restricted to each coupling block.
///
/// Column (l, k, j) with index (l * num_blocks + k) * N + j holds the off-diagonal
/// vectorization of M^(j) o S^(l), zeroed outside block k. For a single beam this
/// is one column per (layer, mode).
struct CollectionMatrix {
    Matrix a;
    /// Pseudo-inverse of `a`.
    Matrix pinv;
    int rank = 0;
    double pinv_inf_norm = 0.0;
    std::vector<int> block_ranks;
};

CollectionMatrix build_collection_matrix(const ModeMatrixSet &modes, std::span<const FlipLayer> layers,
                                         const BeamPartition &partition);

enum class SearchStrategy { exhaustive, greedy };

std::string to_string(SearchStrategy strategy);
SearchStrategy parse_strategy(std::string_view name);

struct SearchOptions {
    SearchStrategy strategy = SearchStrategy::exhaustive;
    uint64_t seed = 0;
    /// Number of complete candidate bases compared by pinv_inf_norm.
    int pool_size = 32;
    /// Exhaustive strategy is refused above this many ions.
    int exhaustive_cap = 16;
    /// Zero selects 2 * layer_bound.
    int max_layers = 0;
};

struct FlipBasis {
    std::vector<FlipLayer> layers;
    CollectionMatrix collection;
    BeamPartition partition;
    uint64_t seed = 0;

    int num_ions() const { return partition.size(); }
    bool complete() const { return collection.rank == block_dimension(num_ions(), partition); }
};

/// Assembles a basis (collection matrix included) from explicit layers.
FlipBasis make_flip_basis(const ModeMatrixSet &modes, std::vector<FlipLayer> layers, const BeamPartition &partition,
                          uint64_t seed = 0);

/// Pre-computes a complete flip basis.
///
/// Runs `pool_size` seeded searches and keeps the complete result with the fewest layers,
/// then the smallest max-abs pseudo-inverse entry, then the lowest member index. Throws IncompleteBasisError when no search reaches
/// full rank within max_layers, and ValidationError for exhaustive searches above the cap.
FlipBasis search_flip_basis(const ModeMatrixSet &modes, const BeamPartition &partition, const SearchOptions &options);

/// One greedy move on the last ("working") layer of `current`.
///
/// Tries every single and double bit toggle of the working layer and keeps the one with
/// the largest rank; ties go to the lowest candidate index (single toggles in ion order,
/// then pairs in lexicographic order). If nothing raises the rank, a new seeded-random
/// layer is opened. A full-rank basis is returned unchanged.
FlipBasis greedy_step(const FlipBasis &current, const ModeMatrixSet &modes, const BeamPartition &partition, Rng &rng,
                      int max_layers = 0);

}  // namespace semiglobal

#endif
