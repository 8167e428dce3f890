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

#include <benchmark/benchmark.h>

#include "semiglobal/crystal.hpp"
#include "semiglobal/decomposer.hpp"
#include "semiglobal/drivesynth.hpp"
#include "semiglobal/kernels.hpp"
#include "semiglobal/verifier.hpp"

namespace sg = semiglobal;
namespace kn = semiglobal::kernels;

namespace {

sg::IonCrystal chain(int n) {
    sg::TrapConfig config;
    config.num_ions = n;
    return sg::make_crystal(config);
}

std::vector<sg::FlipLayer> all_layers(int n) {
    std::vector<sg::FlipLayer> out;
    for (uint64_t code = 0; code < (uint64_t{1} << (n - 1)); ++code) {
        out.push_back(sg::FlipLayer::from_code(n, code));
    }
    return out;
}

template <bool Parallel>
void BM_EvaluateGains(benchmark::State &state) {
    const int n = static_cast<int>(state.range(0));
    kn::LayerSpan span(sg::mode_matrices(chain(n)), sg::BeamPartition::contiguous(n, 1));
    span.append(sg::FlipLayer::none(n));
    const auto candidates = all_layers(n);
    for (auto _ : state) {
        auto gains = Parallel ? kn::evaluate_gains_parallel(span, candidates) : kn::evaluate_gains_serial(span, candidates);
        benchmark::DoNotOptimize(gains);
    }
    state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(candidates.size()));
}

void BM_GreedyStep(benchmark::State &state) {
    const int n = static_cast<int>(state.range(0));
    const auto modes = sg::mode_matrices(chain(n));
    const auto partition = sg::BeamPartition::contiguous(n, 4);
    const auto start = sg::make_flip_basis(modes, {sg::FlipLayer::none(n)}, partition);
    for (auto _ : state) {
        sg::Rng rng(1);
        benchmark::DoNotOptimize(sg::greedy_step(start, modes, partition, rng));
    }
}

template <bool Parallel>
void BM_BasisStatePhases(benchmark::State &state) {
    const int n = static_cast<int>(state.range(0));
    sg::Rng rng(3);
    const sg::Matrix phi = sg::TargetGate::random(n, rng).phi;
    for (auto _ : state) {
        auto phases = Parallel ? kn::basis_state_phases_parallel(phi) : kn::basis_state_phases_serial(phi);
        benchmark::DoNotOptimize(phases);
    }
    state.SetItemsProcessed(state.iterations() * (int64_t{1} << n));
}

void BM_PhaseKernel(benchmark::State &state) {
    const sg::IonCrystal c = chain(static_cast<int>(state.range(0)));
    const sg::FrequencyGrid grid = sg::make_frequency_grid(c);
    for (auto _ : state) {
        benchmark::DoNotOptimize(sg::build_phase_kernel(c, grid));
    }
}

void BM_SynthesizeLayer(benchmark::State &state) {
    const int n = static_cast<int>(state.range(0));
    const sg::IonCrystal c = chain(n);
    const sg::FrequencyGrid grid = sg::make_frequency_grid(c);
    const sg::PhaseKernel k = sg::build_phase_kernel(c, grid);
    sg::Rng rng(5);
    sg::Vector alpha(n);
    for (int j = 0; j < n; ++j) {
        alpha(j) = rng.uniform(-1.0, 1.0);
    }
    const auto partition = sg::BeamPartition::contiguous(n, 2);
    const sg::Matrix phi = sg::layer_coupling(alpha, sg::mode_matrices(c), sg::BeamPartition::contiguous(n, 1));
    for (auto _ : state) {
        benchmark::DoNotOptimize(sg::synthesize_drive(phi, c, grid, k, partition, 1));
    }
}

void BM_Decompose(benchmark::State &state) {
    const int n = static_cast<int>(state.range(0));
    const auto modes = sg::mode_matrices(chain(n));
    sg::SearchOptions options;
    options.strategy = sg::SearchStrategy::greedy;
    options.pool_size = 1;
    const auto basis = sg::search_flip_basis(modes, sg::BeamPartition::contiguous(n, 1), options);
    sg::Rng rng(6);
    const auto target = sg::TargetGate::random(n, rng);
    for (auto _ : state) {
        benchmark::DoNotOptimize(sg::decompose_target(target, basis, modes));
    }
}

}  // namespace

BENCHMARK(BM_EvaluateGains<false>)->Arg(8)->Arg(12);
BENCHMARK(BM_EvaluateGains<true>)->Arg(8)->Arg(12);
BENCHMARK(BM_GreedyStep)->Arg(16)->Arg(36);
BENCHMARK(BM_BasisStatePhases<false>)->Arg(10);
BENCHMARK(BM_BasisStatePhases<true>)->Arg(10);
BENCHMARK(BM_PhaseKernel)->Arg(6)->Arg(12);
BENCHMARK(BM_SynthesizeLayer)->Arg(4)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Decompose)->Arg(10)->Arg(20);

BENCHMARK_MAIN();
