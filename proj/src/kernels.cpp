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

#include "semiglobal/kernels.hpp"

#include <Eigen/QR>
#include <Eigen/SVD>
#include <algorithm>
#include <cstdint>

namespace semiglobal::kernels {

LayerSpan::LayerSpan(const ModeMatrixSet &modes, const BeamPartition &partition) {
    const int n = partition.size();
    full_rank_ = n * (n - 1) / 2;
    std::vector<int> pair_a(full_rank_);
    std::vector<int> pair_b(full_rank_);
    for (int a = 0; a < n; ++a) {
        for (int b = a + 1; b < n; ++b) {
            const int row = pair_index(a, b, n);
            pair_a[row] = a;
            pair_b[row] = b;
        }
    }
    for (const auto &block : partition.blocks()) {
        BlockState state;
        state.rows = block.pairs;
        const auto rows = static_cast<Eigen::Index>(block.pairs.size());
        state.base.resize(rows, n);
        for (Eigen::Index r = 0; r < rows; ++r) {
            const int a = pair_a[block.pairs[r]];
            const int b = pair_b[block.pairs[r]];
            state.row_ion_a.push_back(a);
            state.row_ion_b.push_back(b);
            for (int j = 0; j < n; ++j) {
                state.base(r, j) = modes.matrices[j](a, b);
            }
        }
        state.committed.resize(rows, 0);
        state.basis.resize(rows, 0);
        Eigen::JacobiSVD<Matrix> svd(state.base);
        base_scale_ = std::max(base_scale_, svd.singularValues()(0));
        blocks_.push_back(std::move(state));
    }
    ranks_.assign(blocks_.size(), 0);
    tolerance_ = kRelativeRankCutoff * base_scale_;
}

Matrix LayerSpan::block_columns(const BlockState &block, const FlipLayer &layer) const {
    Matrix c = block.base;
    for (Eigen::Index r = 0; r < c.rows(); ++r) {
        if (layer.flipped(block.row_ion_a[r]) != layer.flipped(block.row_ion_b[r])) {
            c.row(r) *= -1.0;
        }
    }
    return c;
}

int LayerSpan::block_gain(int block, const FlipLayer &layer) const {
    const BlockState &state = blocks_[block];
    const int rows = static_cast<int>(state.rows.size());
    const int room = rows - ranks_[block];
    if (room == 0) {
        return 0;
    }
    Matrix residual = block_columns(state, layer);
    if (state.basis.cols() > 0) {
        residual -= state.basis * (state.basis.transpose() * residual);
    }
    Eigen::ColPivHouseholderQR<Matrix> qr(residual);
    const auto diag = qr.matrixQR().diagonal();
    int count = 0;
    for (Eigen::Index k = 0; k < diag.size(); ++k) {
        if (std::abs(diag(k)) > tolerance_) {
            ++count;
        }
    }
    return std::min(count, room);
}

int LayerSpan::gain(const FlipLayer &layer) const {
    int total = 0;
    for (int k = 0; k < num_blocks(); ++k) {
        total += block_gain(k, layer);
    }
    return total;
}

std::vector<int> LayerSpan::block_gains(const FlipLayer &layer) const {
    std::vector<int> gains(blocks_.size());
    for (int k = 0; k < num_blocks(); ++k) {
        gains[k] = block_gain(k, layer);
    }
    return gains;
}

void LayerSpan::append(const FlipLayer &layer) {
    double scale = base_scale_;
    std::vector<Eigen::BDCSVD<Matrix>> svds;
    svds.reserve(blocks_.size());
    for (auto &state : blocks_) {
        Matrix grown(state.committed.rows(), state.committed.cols() + state.base.cols());
        grown << state.committed, block_columns(state, layer);
        state.committed = std::move(grown);
        svds.emplace_back(state.committed, Eigen::ComputeThinU);
        scale = std::max(scale, svds.back().singularValues()(0));
    }
    tolerance_ = kRelativeRankCutoff * scale;
    rank_ = 0;
    for (size_t k = 0; k < blocks_.size(); ++k) {
        const auto &s = svds[k].singularValues();
        int r = 0;
        while (r < s.size() && s(r) > tolerance_) {
            ++r;
        }
        ranks_[k] = r;
        blocks_[k].basis = svds[k].matrixU().leftCols(r);
        rank_ += r;
    }
}

std::vector<int> evaluate_gains_serial(const LayerSpan &span, std::span<const FlipLayer> candidates) {
    std::vector<int> gains(candidates.size());
    for (size_t k = 0; k < candidates.size(); ++k) {
        gains[k] = span.gain(candidates[k]);
    }
    return gains;
}

std::vector<int> evaluate_gains_parallel(const LayerSpan &span, std::span<const FlipLayer> candidates) {
    std::vector<int> gains(candidates.size());
    const auto count = static_cast<int64_t>(candidates.size());
#pragma omp parallel for schedule(dynamic, 16)
    for (int64_t k = 0; k < count; ++k) {
        gains[k] = span.gain(candidates[k]);
    }
    return gains;
}

std::vector<Toggle> all_toggles(int num_ions) {
    std::vector<Toggle> toggles;
    toggles.reserve(num_ions + num_ions * (num_ions - 1) / 2);
    for (int a = 0; a < num_ions; ++a) {
        toggles.push_back({a, -1});
    }
    for (int a = 0; a < num_ions; ++a) {
        for (int b = a + 1; b < num_ions; ++b) {
            toggles.push_back({a, b});
        }
    }
    return toggles;
}

namespace {

int toggle_gain(const LayerSpan &span, const FlipLayer &working, std::span<const int> working_gains, Toggle toggle,
                const BeamPartition &partition, const std::vector<int> &beam_sizes) {
    const FlipLayer candidate = working.toggled(toggle.a, toggle.b);
    if (candidate == working) {
        return -1;
    }
    const int beam_a = partition.beam_of(toggle.a);
    const int beam_b = toggle.b >= 0 ? partition.beam_of(toggle.b) : -1;
    auto proper = [&](int beam) {
        int hits = (beam == beam_a ? 1 : 0) + (beam == beam_b ? 1 : 0);
        return hits > 0 && hits < beam_sizes[beam];
    };
    int total = 0;
    const auto &blocks = partition.blocks();
    for (int k = 0; k < span.num_blocks(); ++k) {
        if (proper(blocks[k].beam_a) || proper(blocks[k].beam_b)) {
            total += span.block_gain(k, candidate);
        } else {
            total += working_gains[k];
        }
    }
    return total;
}

std::vector<int> beam_sizes_of(const BeamPartition &partition) {
    std::vector<int> sizes(partition.beams(), 0);
    for (int beam : partition.assignment()) {
        ++sizes[beam];
    }
    return sizes;
}

}  // namespace

std::vector<int> evaluate_toggles_serial(const LayerSpan &span, const FlipLayer &working,
                                         std::span<const int> working_gains, std::span<const Toggle> toggles,
                                         const BeamPartition &partition) {
    const auto sizes = beam_sizes_of(partition);
    std::vector<int> totals(toggles.size());
    for (size_t k = 0; k < toggles.size(); ++k) {
        totals[k] = toggle_gain(span, working, working_gains, toggles[k], partition, sizes);
    }
    return totals;
}

std::vector<int> evaluate_toggles_parallel(const LayerSpan &span, const FlipLayer &working,
                                           std::span<const int> working_gains, std::span<const Toggle> toggles,
                                           const BeamPartition &partition) {
    const auto sizes = beam_sizes_of(partition);
    std::vector<int> totals(toggles.size());
    const auto count = static_cast<int64_t>(toggles.size());
#pragma omp parallel for schedule(dynamic, 8)
    for (int64_t k = 0; k < count; ++k) {
        totals[k] = toggle_gain(span, working, working_gains, toggles[k], partition, sizes);
    }
    return totals;
}

namespace {

struct PairTerm {
    int a;
    int b;
    double weight;
};

std::vector<PairTerm> pair_terms(const Matrix &coupling, double &reference) {
    const auto n = static_cast<int>(coupling.rows());
    std::vector<PairTerm> terms;
    reference = 0.0;
    for (int a = 0; a < n; ++a) {
        for (int b = a + 1; b < n; ++b) {
            const double w = 2.0 * coupling(a, b);
            if (w != 0.0) {
                // Bit positions: ion n is bit (N-1-n) of the state index.
                terms.push_back({n - 1 - a, n - 1 - b, w});
                reference += w;
            }
        }
    }
    return terms;
}

inline double state_phase(uint64_t state, const std::vector<PairTerm> &terms, double reference) {
    double phase = 0.0;
    for (const auto &t : terms) {
        const bool odd = (((state >> t.a) ^ (state >> t.b)) & 1U) != 0;
        phase += odd ? -t.weight : t.weight;
    }
    return phase - reference;
}

}  // namespace

std::vector<double> basis_state_phases_serial(const Matrix &coupling) {
    double reference = 0.0;
    const auto terms = pair_terms(coupling, reference);
    const uint64_t dim = uint64_t{1} << coupling.rows();
    std::vector<double> phases(dim);
    for (uint64_t k = 0; k < dim; ++k) {
        phases[k] = state_phase(k, terms, reference);
    }
    return phases;
}

std::vector<double> basis_state_phases_parallel(const Matrix &coupling) {
    double reference = 0.0;
    const auto terms = pair_terms(coupling, reference);
    const auto dim = static_cast<int64_t>(uint64_t{1} << coupling.rows());
    std::vector<double> phases(dim);
#pragma omp parallel for schedule(static)
    for (int64_t k = 0; k < dim; ++k) {
        phases[k] = state_phase(static_cast<uint64_t>(k), terms, reference);
    }
    return phases;
}

}  // namespace semiglobal::kernels
