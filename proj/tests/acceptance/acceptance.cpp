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

// Acceptance checks. With no arguments every criterion runs; otherwise only the listed ones.
// Each criterion prints one line "criterion <k>: PASS|FAIL <details>".
// Exit status is 1 when any selected criterion fails.

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <functional>
#include <iostream>
#include <map>
#include <sstream>
#include <string>

#include "semiglobal/crystal.hpp"
#include "semiglobal/decomposer.hpp"
#include "semiglobal/drivesynth.hpp"
#include "semiglobal/errors.hpp"
#include "semiglobal/flipbasis.hpp"
#include "semiglobal/verifier.hpp"

namespace sg = semiglobal;

namespace {

using Clock = std::chrono::steady_clock;

struct Outcome {
    bool pass = true;
    std::ostringstream detail;
};

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

sg::IonCrystal chain(int n) {
    sg::TrapConfig config;
    config.num_ions = n;
    return sg::make_crystal(config);
}

int ceil_div(long a, long b) { return static_cast<int>((a + b - 1) / b); }

sg::FlipBasis default_basis(const sg::ModeMatrixSet &modes, int n, int beams) {
    sg::SearchOptions options;
    options.strategy = sg::SearchStrategy::exhaustive;
    return sg::search_flip_basis(modes, sg::BeamPartition::contiguous(n, beams), options);
}

// 1. Global layer counts by exhaustive search.
void layer_counts(Outcome &out) {
    constexpr double kBudgetSeconds = 60.0;
    double slowest = 0.0;
    for (int n = 3; n <= 12; ++n) {
        const auto modes = sg::mode_matrices(chain(n));
        const auto start = Clock::now();
        int layers = -1;
        bool complete = false;
        try {
            const auto basis = default_basis(modes, n, 1);
            layers = static_cast<int>(basis.layers.size());
            complete = basis.complete();
        } catch (const sg::IncompleteBasisError &e) {
            out.detail << " [N=" << n << " incomplete: " << e.what() << "]";
        }
        const double elapsed = seconds_since(start);
        slowest = std::max(slowest, elapsed);
        const int bound = ceil_div(n, 2);
        if (!complete || layers > bound || elapsed >= kBudgetSeconds) {
            out.pass = false;
            out.detail << " [N=" << n << " layers=" << layers << " bound=" << bound << " t=" << elapsed << "s]";
        }
    }
    out.detail << " slowest=" << slowest << "s";
}

// 2. N=36 with four beams, greedy search over seeds 0..7.
void semi_global_counts(Outcome &out) {
    constexpr int kMaxLayers = 5;
    constexpr double kBudgetSeconds = 600.0;
    const auto modes = sg::mode_matrices(chain(36));
    const auto partition = sg::BeamPartition::contiguous(36, 4);
    out.pass = false;
    for (uint64_t seed = 0; seed < 8 && !out.pass; ++seed) {
        sg::SearchOptions options;
        options.strategy = sg::SearchStrategy::greedy;
        options.seed = seed;
        const auto start = Clock::now();
        try {
            const auto basis = sg::search_flip_basis(modes, partition, options);
            const double elapsed = seconds_since(start);
            const int layers = static_cast<int>(basis.layers.size());
            out.detail << " [seed " << seed << ": layers=" << layers << " rank=" << basis.collection.rank
                       << " t=" << elapsed << "s]";
            out.pass = basis.complete() && layers <= kMaxLayers && elapsed < kBudgetSeconds;
        } catch (const sg::IncompleteBasisError &e) {
            out.detail << " [seed " << seed << ": " << e.what() << "]";
        }
    }
}

// 3. Bound calculator against integer arithmetic.
void bound_calculator(Outcome &out) {
    int checked = 0;
    for (int n = 2; n <= 64; ++n) {
        for (int b = 1; b <= n; ++b) {
            if (n % b != 0) {
                continue;
            }
            const int expected = b == 1 ? ceil_div(n, 2) : ceil_div(static_cast<long>(n) * n, static_cast<long>(b) * b * (n - 1));
            ++checked;
            if (sg::layer_bound(n, b) != expected) {
                out.pass = false;
                out.detail << " [N=" << n << " B=" << b << " got " << sg::layer_bound(n, b) << " want " << expected << "]";
            }
        }
    }
    out.detail << " cases=" << checked;
}

// 4 and 6. Round trip and certification over 100 seeded targets per (N, B).
void round_trip(Outcome &out, bool certify_plans) {
    constexpr int kTargets = 100;
    constexpr double kReconstruction = 1e-9;
    const int n_max = certify_plans ? 8 : 10;
    double worst = 0.0;
    int cases = 0;
    for (int n = 3; n <= n_max; ++n) {
        const auto modes = sg::mode_matrices(chain(n));
        for (int beams : {1, 2}) {
            const auto basis = default_basis(modes, n, beams);
            sg::Rng rng(sg::derive_seed(2024, static_cast<uint64_t>(n * 10 + beams)));
            for (int t = 0; t < kTargets; ++t) {
                const auto target = sg::TargetGate::random(n, rng);
                const auto plan = sg::decompose_target(target, basis, modes);
                ++cases;
                if (certify_plans) {
                    const auto cert = sg::certify(plan, target, sg::kCertifyTolerance);
                    worst = std::max(worst, cert.max_phase_error);
                    if (!cert.pass) {
                        out.pass = false;
                    }
                } else {
                    const double err = (sg::reconstruct(plan, modes) - target.phi).cwiseAbs().maxCoeff();
                    worst = std::max(worst, err);
                    if (err > kReconstruction) {
                        out.pass = false;
                    }
                }
            }
        }
    }
    out.detail << " cases=" << cases << (certify_plans ? " worst_phase_error=" : " worst_error=") << worst;
}

// 5. Sign-rule composition against dense conjugation.
void flip_oracle(Outcome &out) {
    constexpr double kTolerance = 1e-10;
    sg::Rng rng(55);
    double worst = 0.0;
    for (int c = 0; c < 50; ++c) {
        const int n = 2 + static_cast<int>(rng.below(5));
        sg::LayerPlan plan;
        plan.partition = sg::BeamPartition::contiguous(n, 1);
        const int layers = 1 + static_cast<int>(rng.below(4));
        for (int l = 0; l < layers; ++l) {
            sg::PlanLayer layer;
            layer.flip = sg::FlipLayer::random(n, rng);
            layer.phi_layer = sg::TargetGate::random(n, rng).phi;
            plan.layers.push_back(layer);
        }
        worst = std::max(worst, sg::max_phase_difference(sg::compose_plan(plan), sg::compose_plan_dense(plan)));
    }
    out.pass = worst <= kTolerance;
    out.detail << " cases=50 worst=" << worst;
}

// 7. Synthesized drives re-integrated by the time-domain oracle.
void drive_synthesis(Outcome &out) {
    constexpr double kPhase = 1e-5;
    constexpr double kDisplacement = 1e-8;
    double worst_phase = 0.0;
    double worst_disp = 0.0;
    int drives = 0;
    for (int n = 2; n <= 6; ++n) {
        const sg::IonCrystal crystal = chain(n);
        const auto modes = sg::mode_matrices(crystal);
        const sg::FrequencyGrid grid = sg::make_frequency_grid(crystal);
        const sg::PhaseKernel kernel = sg::build_phase_kernel(crystal, grid);
        std::vector<int> beam_list{1, 2, n};
        std::sort(beam_list.begin(), beam_list.end());
        beam_list.erase(std::unique(beam_list.begin(), beam_list.end()), beam_list.end());
        for (int beams : beam_list) {
            const auto basis = default_basis(modes, n, beams);
            sg::Rng rng(sg::derive_seed(700, static_cast<uint64_t>(n * 10 + beams)));
            const auto plan = sg::decompose_target(sg::TargetGate::random(n, rng), basis, modes);
            for (size_t l = 0; l < plan.layers.size(); ++l) {
                const auto &phi = plan.layers[l].phi_layer;
                try {
                    const auto drive =
                        sg::synthesize_drive(phi, crystal, grid, kernel, plan.partition, sg::derive_seed(7, l));
                    const auto outcome = sg::integrate_drive(crystal, drive);
                    const double phase = (outcome.achieved_phi - phi).cwiseAbs().maxCoeff();
                    const double disp = outcome.residual_displacements.maxCoeff();
                    worst_phase = std::max(worst_phase, phase);
                    worst_disp = std::max(worst_disp, disp);
                    ++drives;
                    if (phase > kPhase || disp > kDisplacement) {
                        out.pass = false;
                        out.detail << " [N=" << n << " B=" << beams << " layer " << l << " phase=" << phase
                                   << " disp=" << disp << "]";
                    }
                } catch (const sg::SolverError &e) {
                    out.pass = false;
                    out.detail << " [N=" << n << " B=" << beams << " layer " << l << ": " << e.what() << "]";
                }
            }
        }
    }
    out.detail << " drives=" << drives << " worst_phase=" << worst_phase << " worst_displacement=" << worst_disp;
}

// 8. Analytic three-tone construction.
void appendix_solver(Outcome &out) {
    constexpr double kTolerance = 1e-12;
    double worst = 0.0;
    auto check = [&](double pa, double pb, double pab, std::array<int, 4> n, double phi0) {
        const auto r = sg::adiabatic_two_beam(pa, pb, pab, n, phi0);
        const auto &a = r.beam_a;
        const auto &b = r.beam_b;
        worst = std::max(worst, std::abs(a[0] * a[0] / n[0] + a[1] * a[1] / n[1] + a[2] * a[2] / n[2] - pa / phi0));
        worst = std::max(worst, std::abs(b[0] * b[0] / n[1] + b[1] * b[1] / n[2] + b[2] * b[2] / n[3] - pb / phi0));
        worst = std::max(worst, std::abs(a[1] * b[0] / n[1] + a[2] * b[1] / n[2] - pab / phi0));
        return r;
    };
    const auto example = check(1.0, 1.0, 0.5, {1, 2, -3, 1}, 1.0);
    const std::array<double, 3> want_a{1.0, 0.70711, 0.86603};
    const std::array<double, 3> want_b{0.70711, -0.86603, 1.0};
    for (int k = 0; k < 3; ++k) {
        if (std::abs(example.beam_a[k] - want_a[k]) > 5e-6 || std::abs(example.beam_b[k] - want_b[k]) > 5e-6) {
            out.pass = false;
            out.detail << " [worked example entry " << k << " differs]";
        }
    }
    sg::Rng rng(88);
    for (int t = 0; t < 100; ++t) {
        const double pa = rng.uniform(-3, 3);
        const double pb = rng.uniform(-3, 3);
        const double pab = rng.uniform(-3, 3);
        const int n1 = (pa >= 0 ? 1 : -1) * static_cast<int>(1 + rng.below(6));
        const int n2 = static_cast<int>(1 + rng.below(6));
        const int n3 = -static_cast<int>(1 + rng.below(6));
        const int n4 = (pb >= 0 ? 1 : -1) * static_cast<int>(1 + rng.below(6));
        check(pa, pb, pab, {n1, n2, n3, n4}, rng.uniform(0.25, 4.0));
    }
    if (worst > kTolerance) {
        out.pass = false;
    }
    out.detail << " draws=100 worst=" << worst;
}

// 9. Mean power ratio trend across beam counts.
void power_trend(Outcome &out) {
    for (int n : {6, 8}) {
        sg::PowerReportOptions options;
        options.num_gates = 10;
        options.seed = 9;
        const std::vector<int> beams{1, 2, n / 2, n};
        const auto rows = sg::power_ratio_report(chain(n), beams, options);
        out.detail << " [N=" << n;
        double previous = std::numeric_limits<double>::infinity();
        for (const auto &row : rows) {
            out.detail << " B=" << row.beams << ":" << row.mean_power_ratio << " (" << row.num_converged << "/"
                       << row.num_layers << ")";
            if (row.num_converged == 0 || row.mean_power_ratio > previous) {
                out.pass = false;
            }
            previous = row.mean_power_ratio;
        }
        out.detail << "]";
    }
}

// 10. Semi-global layer counts between the bound and twice the bound.
void layer_count_band(Outcome &out) {
    int cases = 0;
    for (int n = 4; n <= 24; ++n) {
        const auto modes = sg::mode_matrices(chain(n));
        for (int beams : {2, 3, 4}) {
            if (n % beams != 0 || beams >= n) {
                continue;
            }
            sg::SearchOptions options;
            options.strategy = sg::SearchStrategy::greedy;
            options.pool_size = 8;
            const int bound = sg::layer_bound(n, beams);
            ++cases;
            try {
                const auto basis = sg::search_flip_basis(modes, sg::BeamPartition::contiguous(n, beams), options);
                const int layers = static_cast<int>(basis.layers.size());
                if (!basis.complete() || layers < bound || layers > 2 * bound) {
                    out.pass = false;
                    out.detail << " [N=" << n << " B=" << beams << " layers=" << layers << " bound=" << bound << "]";
                }
            } catch (const sg::IncompleteBasisError &e) {
                out.pass = false;
                out.detail << " [N=" << n << " B=" << beams << ": " << e.what() << "]";
            }
        }
    }
    out.detail << " cases=" << cases;
}

}  // namespace

int main(int argc, char **argv) {
    const std::map<int, std::function<void(Outcome &)>> criteria{
        {1, layer_counts},
        {2, semi_global_counts},
        {3, bound_calculator},
        {4, [](Outcome &o) { round_trip(o, false); }},
        {5, flip_oracle},
        {6, [](Outcome &o) { round_trip(o, true); }},
        {7, drive_synthesis},
        {8, appendix_solver},
        {9, power_trend},
        {10, layer_count_band},
    };
    std::vector<int> selected;
    for (int k = 1; k < argc; ++k) {
        const int id = std::atoi(argv[k]);
        if (criteria.count(id) == 0) {
            std::cerr << "unknown criterion " << argv[k] << "\n";
            return 2;
        }
        selected.push_back(id);
    }
    if (selected.empty()) {
        for (const auto &entry : criteria) {
            selected.push_back(entry.first);
        }
    }
    bool all = true;
    for (int id : selected) {
        Outcome out;
        const auto start = Clock::now();
        try {
            criteria.at(id)(out);
        } catch (const std::exception &e) {
            out.pass = false;
            out.detail << " error: " << e.what();
        }
        all = all && out.pass;
        std::cout << "criterion " << id << ": " << (out.pass ? "PASS" : "FAIL") << out.detail.str()
                  << " elapsed=" << seconds_since(start) << "s" << std::endl;
    }
    return all ? 0 : 1;
}
