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

#include "semiglobal/flipbasis.hpp"

#include <Eigen/SVD>
#include <algorithm>
#include <map>
#include <optional>
#include <sstream>

#include "semiglobal/errors.hpp"
#include "semiglobal/kernels.hpp"

namespace semiglobal {

// ---- FlipLayer ----

FlipLayer::FlipLayer(std::vector<uint8_t> bits) : bits_(std::move(bits)) {
    for (auto &b : bits_) {
        if (b > 1) {
            throw ValidationError("flip bits must be 0 or 1");
        }
    }
    if (!bits_.empty() && bits_[0] == 1) {
        for (auto &b : bits_) {
            b ^= 1;
        }
    }
}

FlipLayer FlipLayer::none(int num_ions) { return FlipLayer(std::vector<uint8_t>(num_ions, 0)); }

FlipLayer FlipLayer::from_string(std::string_view text) {
    if (text.empty()) {
        throw ValidationError("empty flip string");
    }
    std::vector<uint8_t> bits;
    bits.reserve(text.size());
    for (char c : text) {
        if (c != '0' && c != '1') {
            throw ValidationError("flip string may only contain '0' and '1'");
        }
        bits.push_back(c == '1' ? 1 : 0);
    }
    return FlipLayer(std::move(bits));
}

FlipLayer FlipLayer::from_code(int num_ions, uint64_t code) {
    std::vector<uint8_t> bits(num_ions, 0);
    for (int k = 1; k < num_ions; ++k) {
        bits[k] = static_cast<uint8_t>((code >> (k - 1)) & 1U);
    }
    return FlipLayer(std::move(bits));
}

FlipLayer FlipLayer::random(int num_ions, Rng &rng) {
    std::vector<uint8_t> bits(num_ions, 0);
    for (int k = 1; k < num_ions; ++k) {
        bits[k] = rng.bit() ? 1 : 0;
    }
    return FlipLayer(std::move(bits));
}

Vector FlipLayer::signs() const {
    Vector s(size());
    for (int k = 0; k < size(); ++k) {
        s(k) = bits_[k] ? -1.0 : 1.0;
    }
    return s;
}

std::string FlipLayer::to_string() const {
    std::string out;
    out.reserve(bits_.size());
    for (auto b : bits_) {
        out.push_back(b ? '1' : '0');
    }
    return out;
}

FlipLayer FlipLayer::toggled(int a, int b) const {
    std::vector<uint8_t> bits = bits_;
    bits[a] ^= 1;
    if (b >= 0) {
        bits[b] ^= 1;
    }
    return FlipLayer(std::move(bits));
}

Matrix sign_matrix(const FlipLayer &layer) {
    const Vector s = layer.signs();
    return s * s.transpose();
}

// ---- off-diagonal vectorization ----

int pair_index(int a, int b, int num_ions) {
    if (a > b) {
        std::swap(a, b);
    }
    return a * num_ions - a * (a + 1) / 2 + (b - a - 1);
}

Vector vectorize_offdiag(const Matrix &symmetric) {
    if (symmetric.rows() != symmetric.cols()) {
        throw ValidationError("vectorize_offdiag needs a square matrix");
    }
    const double asym = max_asymmetry(symmetric);
    if (asym > 1e-12) {
        std::ostringstream msg;
        msg << "matrix is not symmetric (max asymmetry " << asym << ")";
        throw ValidationError(msg.str());
    }
    const auto n = static_cast<int>(symmetric.rows());
    Vector v(n * (n - 1) / 2);
    int row = 0;
    for (int a = 0; a < n; ++a) {
        for (int b = a + 1; b < n; ++b) {
            v(row++) = symmetric(a, b);
        }
    }
    return v;
}

Matrix devectorize_offdiag(const Vector &offdiag, int num_ions) {
    if (offdiag.size() != num_ions * (num_ions - 1) / 2) {
        throw ValidationError("off-diagonal vector has the wrong length");
    }
    Matrix m = Matrix::Zero(num_ions, num_ions);
    int row = 0;
    for (int a = 0; a < num_ions; ++a) {
        for (int b = a + 1; b < num_ions; ++b) {
            m(a, b) = offdiag(row);
            m(b, a) = offdiag(row);
            ++row;
        }
    }
    return m;
}

// ---- BeamPartition ----

BeamPartition::BeamPartition(std::vector<int> assignment) : assignment_(std::move(assignment)) {
    const int n = size();
    beams_ = n == 0 ? 0 : assignment_.back() + 1;
    block_lookup_.assign(static_cast<size_t>(beams_) * beams_, -1);
    std::map<std::pair<int, int>, std::vector<int>> grouped;
    for (int a = 0; a < n; ++a) {
        for (int b = a + 1; b < n; ++b) {
            grouped[{assignment_[a], assignment_[b]}].push_back(pair_index(a, b, n));
        }
    }
    for (auto &[key, pairs] : grouped) {
        block_lookup_[key.first * beams_ + key.second] = static_cast<int>(blocks_.size());
        block_lookup_[key.second * beams_ + key.first] = static_cast<int>(blocks_.size());
        std::sort(pairs.begin(), pairs.end());
        blocks_.push_back(CouplingBlock{key.first, key.second, std::move(pairs)});
    }
}

BeamPartition BeamPartition::contiguous(int num_ions, int beams) {
    if (num_ions < 1) {
        throw ValidationError("partition needs at least one ion");
    }
    if (beams < 1 || beams > num_ions) {
        throw ValidationError("beam count must lie in [1, N]; got B=" + std::to_string(beams) +
                              ", N=" + std::to_string(num_ions));
    }
    std::vector<int> assignment;
    assignment.reserve(num_ions);
    const int base = num_ions / beams;
    const int extra = num_ions % beams;
    for (int b = 0; b < beams; ++b) {
        const int count = base + (b < extra ? 1 : 0);
        assignment.insert(assignment.end(), count, b);
    }
    return BeamPartition(std::move(assignment));
}

BeamPartition BeamPartition::from_assignment(std::vector<int> assignment) {
    if (assignment.empty()) {
        throw ValidationError("partition needs at least one ion");
    }
    if (assignment.front() != 0) {
        throw ValidationError("beam assignment must start at beam 0");
    }
    std::vector<int> sizes{1};
    for (size_t k = 1; k < assignment.size(); ++k) {
        const int step = assignment[k] - assignment[k - 1];
        if (step == 1) {
            sizes.push_back(1);
        } else if (step == 0) {
            ++sizes.back();
        } else {
            throw ValidationError("beam segments must be contiguous and numbered in order");
        }
    }
    const auto [lo, hi] = std::minmax_element(sizes.begin(), sizes.end());
    if (*hi - *lo > 1) {
        throw ValidationError("beam segment sizes differ by more than one ion");
    }
    return BeamPartition(std::move(assignment));
}

std::vector<int> BeamPartition::ions_in(int beam) const {
    std::vector<int> ions;
    for (int k = 0; k < size(); ++k) {
        if (assignment_[k] == beam) {
            ions.push_back(k);
        }
    }
    return ions;
}

int BeamPartition::block_of_pair(int a, int b) const { return block_lookup_[assignment_[a] * beams_ + assignment_[b]]; }

// ---- counting ----

int layer_bound(int num_ions, int beams) {
    if (num_ions < 1) {
        throw ValidationError("layer_bound needs N >= 1");
    }
    if (beams < 1 || beams > num_ions) {
        throw ValidationError("layer_bound needs 1 <= B <= N; got B=" + std::to_string(beams) +
                              ", N=" + std::to_string(num_ions));
    }
    if (beams == 1) {
        return (num_ions + 1) / 2;
    }
    const int64_t n = num_ions;
    const int64_t b = beams;
    const int64_t numerator = n * n;
    const int64_t denominator = b * b * (n - 1);
    return static_cast<int>((numerator + denominator - 1) / denominator);
}

int block_dimension(int num_ions, const BeamPartition &partition) {
    if (partition.size() != num_ions) {
        throw ValidationError("partition size does not match the ion count");
    }
    return num_ions * (num_ions - 1) / 2;
}

// ---- collection matrix ----

CollectionMatrix build_collection_matrix(const ModeMatrixSet &modes, std::span<const FlipLayer> layers,
                                         const BeamPartition &partition) {
    const int n = partition.size();
    if (modes.size() != n) {
        throw ValidationError("mode set and partition disagree on the ion count");
    }
    for (const auto &layer : layers) {
        if (layer.size() != n) {
            throw ValidationError("flip layer length does not match the ion count");
        }
    }
    const int num_blocks = partition.num_blocks();
    const int num_layers = static_cast<int>(layers.size());
    const int pairs = n * (n - 1) / 2;

    CollectionMatrix out;
    out.a = Matrix::Zero(pairs, static_cast<Eigen::Index>(num_layers) * num_blocks * n);
    out.pinv = Matrix::Zero(out.a.cols(), pairs);
    out.block_ranks.assign(num_blocks, 0);

    std::vector<int> pair_a(pairs);
    std::vector<int> pair_b(pairs);
    for (int a = 0; a < n; ++a) {
        for (int b = a + 1; b < n; ++b) {
            pair_a[pair_index(a, b, n)] = a;
            pair_b[pair_index(a, b, n)] = b;
        }
    }

    std::vector<Matrix> restricted(num_blocks);
    for (int l = 0; l < num_layers; ++l) {
        const Vector s = layers[l].signs();
        for (int k = 0; k < num_blocks; ++k) {
            const auto &rows = partition.blocks()[k].pairs;
            for (int row : rows) {
                const int a = pair_a[row];
                const int b = pair_b[row];
                const double sign = s(a) * s(b);
                for (int j = 0; j < n; ++j) {
                    out.a(row, (static_cast<Eigen::Index>(l) * num_blocks + k) * n + j) = sign * modes.matrices[j](a, b);
                }
            }
        }
    }
    if (num_layers == 0) {
        return out;
    }

    // Column sets of different blocks have disjoint row supports, so the SVD (and the
    // pseudo-inverse) of `a` is the union of the per-block ones.
    std::vector<Eigen::BDCSVD<Matrix>> svds;
    svds.reserve(num_blocks);
    double scale = 0.0;
    for (int k = 0; k < num_blocks; ++k) {
        const auto &rows = partition.blocks()[k].pairs;
        Matrix sub(rows.size(), static_cast<Eigen::Index>(num_layers) * n);
        for (size_t r = 0; r < rows.size(); ++r) {
            for (int l = 0; l < num_layers; ++l) {
                sub.row(r).segment(static_cast<Eigen::Index>(l) * n, n) =
                    out.a.row(rows[r]).segment((static_cast<Eigen::Index>(l) * num_blocks + k) * n, n);
            }
        }
        svds.emplace_back(sub, Eigen::ComputeThinU | Eigen::ComputeThinV);
        scale = std::max(scale, svds.back().singularValues()(0));
    }
    const double cutoff = kRelativeRankCutoff * scale;
    for (int k = 0; k < num_blocks; ++k) {
        const auto &svd = svds[k];
        const auto &sv = svd.singularValues();
        Matrix block_pinv = Matrix::Zero(svd.matrixV().rows(), svd.matrixU().rows());
        int rank = 0;
        for (Eigen::Index q = 0; q < sv.size(); ++q) {
            if (sv(q) > cutoff) {
                block_pinv.noalias() += (svd.matrixV().col(q) / sv(q)) * svd.matrixU().col(q).transpose();
                ++rank;
            }
        }
        out.block_ranks[k] = rank;
        out.rank += rank;
        const auto &rows = partition.blocks()[k].pairs;
        for (int l = 0; l < num_layers; ++l) {
            for (int j = 0; j < n; ++j) {
                const Eigen::Index col = (static_cast<Eigen::Index>(l) * num_blocks + k) * n + j;
                for (size_t r = 0; r < rows.size(); ++r) {
                    out.pinv(col, rows[r]) = block_pinv(static_cast<Eigen::Index>(l) * n + j, r);
                }
            }
        }
    }
    out.pinv_inf_norm = out.pinv.size() == 0 ? 0.0 : out.pinv.cwiseAbs().maxCoeff();
    return out;
}

// ---- search ----

std::string to_string(SearchStrategy strategy) {
    return strategy == SearchStrategy::exhaustive ? "exhaustive" : "greedy";
}

SearchStrategy parse_strategy(std::string_view name) {
    if (name == "exhaustive") {
        return SearchStrategy::exhaustive;
    }
    if (name == "greedy") {
        return SearchStrategy::greedy;
    }
    throw ValidationError("unknown search strategy '" + std::string(name) + "'");
}

FlipBasis make_flip_basis(const ModeMatrixSet &modes, std::vector<FlipLayer> layers, const BeamPartition &partition,
                          uint64_t seed) {
    FlipBasis basis;
    basis.collection = build_collection_matrix(modes, layers, partition);
    basis.layers = std::move(layers);
    basis.partition = partition;
    basis.seed = seed;
    return basis;
}

namespace {

int resolve_max_layers(int requested, const BeamPartition &partition) {
    return requested > 0 ? requested : 2 * layer_bound(partition.size(), partition.beams());
}

std::vector<FlipLayer> exhaustive_member(const kernels::LayerSpan &initial, const std::vector<FlipLayer> &candidates,
                                         Rng &rng, int max_layers) {
    kernels::LayerSpan span = initial;
    std::vector<FlipLayer> layers;
    while (span.rank() < span.full_rank() && static_cast<int>(layers.size()) < max_layers) {
        const auto gains = kernels::evaluate_gains_parallel(span, candidates);
        const int best = *std::max_element(gains.begin(), gains.end());
        if (best <= 0) {
            break;
        }
        std::vector<size_t> ties;
        for (size_t k = 0; k < gains.size(); ++k) {
            if (gains[k] == best) {
                ties.push_back(k);
            }
        }
        const FlipLayer &pick = candidates[ties[rng.below(ties.size())]];
        span.append(pick);
        layers.push_back(pick);
    }
    return layers;
}

int sum(const std::vector<int> &v) {
    int total = 0;
    for (int x : v) {
        total += x;
    }
    return total;
}

/// Hill-climbs the working layer by single/double toggles. Returns true if it moved.
bool improve_working_layer(const kernels::LayerSpan &span, FlipLayer &working, std::vector<int> &gains,
                           const std::vector<kernels::Toggle> &toggles, const BeamPartition &partition) {
    const int current = sum(gains);
    const auto totals = kernels::evaluate_toggles_parallel(span, working, gains, toggles, partition);
    size_t best = 0;
    for (size_t k = 1; k < totals.size(); ++k) {
        if (totals[k] > totals[best]) {
            best = k;
        }
    }
    if (totals.empty() || totals[best] <= current) {
        return false;
    }
    working = working.toggled(toggles[best].a, toggles[best].b);
    gains = span.block_gains(working);
    return true;
}

std::vector<FlipLayer> greedy_member(const kernels::LayerSpan &initial, const BeamPartition &partition, Rng &rng,
                                     int max_layers) {
    const int n = partition.size();
    const auto toggles = kernels::all_toggles(n);
    kernels::LayerSpan span = initial;
    std::vector<FlipLayer> layers;
    while (span.rank() < span.full_rank() && static_cast<int>(layers.size()) < max_layers) {
        FlipLayer working = FlipLayer::random(n, rng);
        std::vector<int> gains = span.block_gains(working);
        while (span.rank() + sum(gains) < span.full_rank() &&
               improve_working_layer(span, working, gains, toggles, partition)) {
        }
        span.append(working);
        layers.push_back(working);
    }
    return layers;
}

}  // namespace

FlipBasis search_flip_basis(const ModeMatrixSet &modes, const BeamPartition &partition, const SearchOptions &options) {
    const int n = partition.size();
    if (modes.size() != n) {
        throw ValidationError("mode set and partition disagree on the ion count");
    }
    if (n < 2) {
        throw ValidationError("flip-basis search needs at least two ions");
    }
    if (options.pool_size < 1) {
        throw ValidationError("pool_size must be positive");
    }
    if (options.strategy == SearchStrategy::exhaustive && n > options.exhaustive_cap) {
        throw ValidationError("exhaustive search is limited to N <= " + std::to_string(options.exhaustive_cap) +
                              "; use the greedy strategy");
    }
    const int max_layers = resolve_max_layers(options.max_layers, partition);
    const int required = block_dimension(n, partition);

    const kernels::LayerSpan initial(modes, partition);
    std::vector<FlipLayer> candidates;
    if (options.strategy == SearchStrategy::exhaustive) {
        const uint64_t count = uint64_t{1} << (n - 1);
        candidates.reserve(count);
        for (uint64_t code = 0; code < count; ++code) {
            candidates.push_back(FlipLayer::from_code(n, code));
        }
    }

    std::map<std::string, double> seen;
    std::optional<FlipBasis> best;
    int best_rank = 0;
    for (int member = 0; member < options.pool_size; ++member) {
        Rng rng(derive_seed(options.seed, static_cast<uint64_t>(member)));
        std::vector<FlipLayer> layers = options.strategy == SearchStrategy::exhaustive
                                            ? exhaustive_member(initial, candidates, rng, max_layers)
                                            : greedy_member(initial, partition, rng, max_layers);
        std::string key;
        for (const auto &layer : layers) {
            key += layer.to_string() + ",";
        }
        if (seen.contains(key)) {
            continue;
        }
        FlipBasis basis = make_flip_basis(modes, std::move(layers), partition, options.seed);
        seen[key] = basis.collection.pinv_inf_norm;
        best_rank = std::max(best_rank, basis.collection.rank);
        if (basis.collection.rank != required) {
            continue;
        }
        if (!best || basis.layers.size() < best->layers.size() ||
            (basis.layers.size() == best->layers.size() &&
             basis.collection.pinv_inf_norm < best->collection.pinv_inf_norm)) {
            best = std::move(basis);
        }
    }
    if (!best) {
        throw IncompleteBasisError("no complete flip basis within " + std::to_string(max_layers) + " layers",
                                   best_rank, required);
    }
    return *std::move(best);
}

FlipBasis greedy_step(const FlipBasis &current, const ModeMatrixSet &modes, const BeamPartition &partition, Rng &rng,
                      int max_layers) {
    const int n = partition.size();
    const int required = block_dimension(n, partition);
    if (current.collection.rank == required && !current.layers.empty()) {
        return current;
    }
    max_layers = resolve_max_layers(max_layers, partition);
    std::vector<FlipLayer> layers = current.layers;
    if (layers.empty()) {
        layers.push_back(FlipLayer::random(n, rng));
        return make_flip_basis(modes, std::move(layers), partition, current.seed);
    }

    kernels::LayerSpan span(modes, partition);
    for (size_t l = 0; l + 1 < layers.size(); ++l) {
        span.append(layers[l]);
    }
    FlipLayer working = layers.back();
    std::vector<int> gains = span.block_gains(working);
    if (improve_working_layer(span, working, gains, kernels::all_toggles(n), partition)) {
        layers.back() = working;
    } else {
        if (static_cast<int>(layers.size()) >= max_layers) {
            throw IncompleteBasisError("greedy search exhausted its layer budget", current.collection.rank, required);
        }
        layers.push_back(FlipLayer::random(n, rng));
    }
    return make_flip_basis(modes, std::move(layers), partition, current.seed);
}

}  // namespace semiglobal
