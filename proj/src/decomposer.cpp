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

#include "semiglobal/decomposer.hpp"

#include <Eigen/SVD>
#include <algorithm>
#include <cmath>
#include <sstream>

#include "semiglobal/errors.hpp"

namespace semiglobal {

void TargetGate::validate() const {
    if (phi.rows() != phi.cols()) {
        throw ValidationError("target must be square");
    }
    if (phi.rows() < 2) {
        throw ValidationError("target needs at least two qubits");
    }
    if (!phi.allFinite()) {
        throw ValidationError("target contains non-finite entries");
    }
    const double asym = max_asymmetry(phi);
    if (asym > 1e-12) {
        std::ostringstream msg;
        msg << "target is not symmetric (max asymmetry " << asym << ")";
        throw ValidationError(msg.str());
    }
    for (Eigen::Index k = 0; k < phi.rows(); ++k) {
        if (phi(k, k) != 0.0) {
            throw ValidationError("target diagonal must be exactly zero (entry " + std::to_string(k) + ")");
        }
    }
}

TargetGate TargetGate::zero(int num_ions) { return TargetGate{Matrix::Zero(num_ions, num_ions)}; }

TargetGate TargetGate::random(int num_ions, Rng &rng) {
    Matrix phi = Matrix::Zero(num_ions, num_ions);
    for (int a = 0; a < num_ions; ++a) {
        for (int b = a + 1; b < num_ions; ++b) {
            phi(a, b) = rng.uniform(-1.0, 1.0);
            phi(b, a) = phi(a, b);
        }
    }
    return TargetGate{std::move(phi)};
}

Matrix layer_coupling(const Vector &alpha, const ModeMatrixSet &modes, const BeamPartition &partition) {
    const int n = partition.size();
    const int num_blocks = partition.num_blocks();
    if (alpha.size() != static_cast<Eigen::Index>(num_blocks) * n) {
        throw ValidationError("alpha length does not match N * num_blocks");
    }
    Matrix phi = Matrix::Zero(n, n);
    for (int a = 0; a < n; ++a) {
        for (int b = a + 1; b < n; ++b) {
            const int k = partition.block_of_pair(a, b);
            double v = 0.0;
            for (int j = 0; j < n; ++j) {
                v += alpha(static_cast<Eigen::Index>(k) * n + j) * modes.matrices[j](a, b);
            }
            phi(a, b) = v;
            phi(b, a) = v;
        }
    }
    return phi;
}

Matrix reconstruct(const LayerPlan &plan, const ModeMatrixSet &modes) {
    const int n = plan.num_ions();
    Matrix total = Matrix::Zero(n, n);
    for (const auto &layer : plan.layers) {
        total += layer_coupling(layer.alpha, modes, plan.partition).cwiseProduct(sign_matrix(layer.flip));
    }
    total.diagonal().setZero();
    return total;
}

double plan_power_proxy(const LayerPlan &plan) {
    double best = 0.0;
    for (const auto &layer : plan.layers) {
        if (layer.alpha.size() > 0) {
            best = std::max(best, layer.alpha.cwiseAbs().maxCoeff());
        }
    }
    return best;
}

namespace {

void check_inputs(const TargetGate &target, const FlipBasis &basis, const ModeMatrixSet &modes) {
    target.validate();
    if (target.size() != basis.num_ions() || modes.size() != basis.num_ions()) {
        throw ValidationError("target, basis and modes disagree on the ion count");
    }
}

double max_abs(const Matrix &m) { return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff(); }

}  // namespace

LayerPlan decompose_target(const TargetGate &target, const FlipBasis &basis, const ModeMatrixSet &modes) {
    check_inputs(target, basis, modes);
    const int n = basis.num_ions();
    const int required = block_dimension(n, basis.partition);
    if (basis.collection.rank != required) {
        throw IncompleteBasisError("cannot decompose onto an incomplete basis", basis.collection.rank, required);
    }
    const Vector coefficients = basis.collection.pinv * vectorize_offdiag(target.phi);
    const Eigen::Index per_layer = static_cast<Eigen::Index>(basis.partition.num_blocks()) * n;

    LayerPlan plan;
    plan.partition = basis.partition;
    for (size_t l = 0; l < basis.layers.size(); ++l) {
        PlanLayer layer;
        layer.flip = basis.layers[l];
        layer.alpha = coefficients.segment(static_cast<Eigen::Index>(l) * per_layer, per_layer);
        layer.phi_layer = layer_coupling(layer.alpha, modes, plan.partition);
        plan.layers.push_back(std::move(layer));
    }
    plan.residual = max_abs(reconstruct(plan, modes) - target.phi);
    const double tolerance = kDecompositionTolerance * max_abs(target.phi);
    if (plan.residual > tolerance) {
        throw SolverError("decomposition misses the target on a full-rank basis", plan.residual);
    }
    return plan;
}

BlockPlan block_decompose(const TargetGate &target, const FlipBasis &basis, const ModeMatrixSet &modes,
                          const BeamPartition &partition) {
    check_inputs(target, basis, modes);
    if (!(partition == basis.partition)) {
        throw ValidationError("partition does not match the basis partition");
    }
    const int n = basis.num_ions();
    const int num_layers = static_cast<int>(basis.layers.size());
    const auto &blocks = partition.blocks();
    const Vector rhs = vectorize_offdiag(target.phi);

    std::vector<int> pair_a(rhs.size());
    std::vector<int> pair_b(rhs.size());
    for (int a = 0; a < n; ++a) {
        for (int b = a + 1; b < n; ++b) {
            pair_a[pair_index(a, b, n)] = a;
            pair_b[pair_index(a, b, n)] = b;
        }
    }
    std::vector<Vector> signs;
    for (const auto &layer : basis.layers) {
        signs.push_back(layer.signs());
    }

    std::vector<Eigen::BDCSVD<Matrix>> svds(blocks.size());
    double scale = 0.0;
#pragma omp parallel for schedule(dynamic) reduction(max : scale)
    for (size_t k = 0; k < blocks.size(); ++k) {
        const auto &rows = blocks[k].pairs;
        Matrix sub(rows.size(), static_cast<Eigen::Index>(num_layers) * n);
        for (size_t r = 0; r < rows.size(); ++r) {
            const int a = pair_a[rows[r]];
            const int b = pair_b[rows[r]];
            for (int l = 0; l < num_layers; ++l) {
                for (int j = 0; j < n; ++j) {
                    sub(r, static_cast<Eigen::Index>(l) * n + j) = signs[l](a) * signs[l](b) * modes.matrices[j](a, b);
                }
            }
        }
        svds[k].compute(sub, Eigen::ComputeThinU | Eigen::ComputeThinV);
        scale = std::max(scale, svds[k].singularValues()(0));
    }

    const double cutoff = kRelativeRankCutoff * scale;
    BlockPlan plan;
    plan.blocks.resize(blocks.size());
    for (size_t k = 0; k < blocks.size(); ++k) {
        const auto &svd = svds[k];
        const auto &rows = blocks[k].pairs;
        Vector local(rows.size());
        for (size_t r = 0; r < rows.size(); ++r) {
            local(r) = rhs(rows[r]);
        }
        const auto &sv = svd.singularValues();
        Vector x = Vector::Zero(svd.matrixV().rows());
        int rank = 0;
        for (Eigen::Index q = 0; q < sv.size(); ++q) {
            if (sv(q) > cutoff) {
                x += svd.matrixV().col(q) * (svd.matrixU().col(q).dot(local) / sv(q));
                ++rank;
            }
        }
        if (rank != static_cast<int>(rows.size())) {
            throw IncompleteBasisError("coupling block (" + std::to_string(blocks[k].beam_a) + ", " +
                                           std::to_string(blocks[k].beam_b) + ") is rank deficient",
                                       rank, static_cast<int>(rows.size()));
        }
        BlockCoefficients &out = plan.blocks[k];
        out.beam_a = blocks[k].beam_a;
        out.beam_b = blocks[k].beam_b;
        out.coefficients = Eigen::Map<const Matrix>(x.data(), n, num_layers).transpose();
        Vector achieved = Vector::Zero(rows.size());
        for (Eigen::Index q = 0; q < rank; ++q) {
            achieved += svd.matrixU().col(q) * (svd.matrixV().col(q).dot(x) * sv(q));
        }
        out.residual = rows.empty() ? 0.0 : (achieved - local).cwiseAbs().maxCoeff();
    }
    return plan;
}

LayerPlan BlockPlan::to_layer_plan(const FlipBasis &basis, const ModeMatrixSet &modes) const {
    const int n = basis.num_ions();
    const int num_blocks = basis.partition.num_blocks();
    if (static_cast<int>(blocks.size()) != num_blocks) {
        throw ValidationError("block plan does not match the basis partition");
    }
    LayerPlan plan;
    plan.partition = basis.partition;
    for (size_t l = 0; l < basis.layers.size(); ++l) {
        PlanLayer layer;
        layer.flip = basis.layers[l];
        layer.alpha.resize(static_cast<Eigen::Index>(num_blocks) * n);
        for (int k = 0; k < num_blocks; ++k) {
            layer.alpha.segment(static_cast<Eigen::Index>(k) * n, n) =
                blocks[k].coefficients.row(static_cast<Eigen::Index>(l)).transpose();
        }
        layer.phi_layer = layer_coupling(layer.alpha, modes, plan.partition);
        plan.layers.push_back(std::move(layer));
    }
    for (const auto &block : blocks) {
        plan.residual = std::max(plan.residual, block.residual);
    }
    return plan;
}

}  // namespace semiglobal
