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

// sgc: crystal, basis, compile, synthesize, certify and report subcommands.
// Exit codes: 0 success, 1 failure or non-convergence, 2 validation or usage error.

#include <CLI11.hpp>
#include <algorithm>
#include <iostream>
#include <sstream>

#include "semiglobal/crystal.hpp"
#include "semiglobal/decomposer.hpp"
#include "semiglobal/drivesynth.hpp"
#include "semiglobal/errors.hpp"
#include "semiglobal/flipbasis.hpp"
#include "semiglobal/io.hpp"
#include "semiglobal/rng.hpp"
#include "semiglobal/verifier.hpp"

namespace sg = semiglobal;
namespace io = semiglobal::io;
namespace fs = std::filesystem;

namespace {

constexpr int kExitFailure = 1;
constexpr int kExitInvalid = 2;

/// Phase error allowed between a re-integrated drive and its layer.
constexpr double kDrivePhaseTolerance = 1e-5;
/// Per-mode residual displacement allowed after re-integration.
constexpr double kDisplacementTolerance = 1e-8;

struct Loaded {
    std::string bytes;
    std::string hash;
    io::Json doc;
};

Loaded load(const fs::path &path) {
    Loaded out;
    out.bytes = io::read_file(path);
    out.hash = io::sha256_hex(out.bytes);
    out.doc = io::parse(out.bytes, path.string());
    return out;
}

/// Writes the document and returns the hash of the written bytes.
std::string save(const fs::path &path, const io::Json &doc) {
    const std::string text = io::dump(doc);
    io::write_file(path, text);
    return io::sha256_hex(text);
}

struct TrapFlags {
    int n = 0;
    double axial = 1.0;
    double eta_scale = 0.1;

    void add(CLI::App &cmd, bool required_n) {
        auto *opt = cmd.add_option("--n", n, "number of ions");
        if (required_n) {
            opt->required();
        }
        cmd.add_option("--axial", axial, "axial trap frequency")->capture_default_str();
        cmd.add_option("--eta-scale", eta_scale, "Lamb-Dicke scale of the axial mode")->capture_default_str();
    }

    sg::IonCrystal build() const {
        sg::TrapConfig config;
        config.num_ions = n;
        config.axial_frequency = axial;
        config.lamb_dicke_scale = eta_scale;
        return sg::make_crystal(config);
    }
};

struct ResolvedCrystal {
    sg::IonCrystal crystal;
    std::string hash;
};

/// Reads --crystal when given, otherwise builds the crystal from the trap flags.
/// The hash is always that of the canonical crystal file, so both routes agree.
ResolvedCrystal resolve_crystal(const std::string &path, const TrapFlags &trap) {
    if (!path.empty()) {
        const Loaded file = load(path);
        return {io::crystal_from_json(file.doc), file.hash};
    }
    if (trap.n == 0) {
        throw sg::ValidationError("either --crystal or --n is required");
    }
    sg::IonCrystal crystal = trap.build();
    const std::string hash = io::sha256_hex(io::dump(io::crystal_to_json(crystal)));
    return {std::move(crystal), hash};
}

sg::SearchStrategy pick_strategy(const std::string &name, int n) {
    if (name == "auto") {
        return n <= 16 ? sg::SearchStrategy::exhaustive : sg::SearchStrategy::greedy;
    }
    return sg::parse_strategy(name);
}

std::string format_double(double v) {
    std::ostringstream s;
    s.precision(17);
    s << v;
    return s.str();
}

// ---------------------------------------------------------------------------

struct CrystalCmd {
    TrapFlags trap;
    std::string out;

    int run() const {
        const sg::IonCrystal crystal = trap.build();
        const std::string hash = save(out, io::crystal_to_json(crystal));
        std::cout << "crystal n=" << crystal.size() << " sha256=" << hash << "\n";
        return 0;
    }
};

struct BasisCmd {
    std::string crystal_path;
    TrapFlags trap;
    int beams = 1;
    std::string strategy = "auto";
    uint64_t seed = 0;
    int pool = 32;
    int max_layers = 0;
    std::string out;

    int run() const {
        const ResolvedCrystal resolved = resolve_crystal(crystal_path, trap);
        const int n = resolved.crystal.size();
        sg::SearchOptions options;
        options.strategy = pick_strategy(strategy, n);
        options.seed = seed;
        options.pool_size = pool;
        options.max_layers = max_layers;
        const sg::FlipBasis basis = sg::search_flip_basis(sg::mode_matrices(resolved.crystal),
                                                          sg::BeamPartition::contiguous(n, beams), options);
        const std::string hash = save(out, io::basis_to_json(basis, resolved.hash));
        std::cout << "basis n=" << n << " b=" << beams << " layers=" << basis.layers.size()
                  << " rank=" << basis.collection.rank << " sha256=" << hash << "\n";
        return 0;
    }
};

struct CompileCmd {
    std::string crystal_path;
    std::string basis_path;
    std::string target_path;
    bool random = false;
    uint64_t seed = 0;
    std::string target_out;
    double tolerance = sg::kDecompositionTolerance;
    std::string out;

    int run() const {
        const Loaded crystal_file = load(crystal_path);
        const sg::IonCrystal crystal = io::crystal_from_json(crystal_file.doc);
        const Loaded basis_file = load(basis_path);
        io::require_ref(basis_file.doc, "crystal_ref", crystal_file.hash);
        const sg::ModeMatrixSet modes = sg::mode_matrices(crystal);
        const sg::FlipBasis basis = io::basis_from_json(basis_file.doc, modes);

        sg::TargetGate target;
        if (random == !target_path.empty()) {
            throw sg::ValidationError("give exactly one of --target and --random");
        }
        if (random) {
            sg::Rng rng(seed);
            target = sg::TargetGate::random(crystal.size(), rng);
            if (!target_out.empty()) {
                save(target_out, io::target_to_json(target));
            }
        } else {
            target = io::target_from_json(load(target_path).doc);
        }

        sg::LayerPlan plan;
        try {
            plan = sg::decompose_target(target, basis, modes);
        } catch (const sg::SolverError &e) {
            std::cerr << "sgc compile: " << e.what() << "\n";
            return kExitFailure;
        }
        const double scale = target.phi.cwiseAbs().maxCoeff();
        const std::string hash = save(out, io::plan_to_json(plan, basis_file.hash, crystal_file.hash));
        std::cout << "plan layers=" << plan.layers.size() << " residual=" << format_double(plan.residual)
                  << " sha256=" << hash << "\n";
        return plan.residual <= tolerance * scale ? 0 : kExitFailure;
    }
};

struct SynthesizeCmd {
    std::string plan_path;
    std::string crystal_path;
    uint64_t seed = 0;
    int tones = 0;
    int restarts = 8;
    double tolerance = sg::kDriveTolerance;
    std::string out_dir;

    int run() const {
        const Loaded crystal_file = load(crystal_path);
        const sg::IonCrystal crystal = io::crystal_from_json(crystal_file.doc);
        const Loaded plan_file = load(plan_path);
        io::require_ref(plan_file.doc, "crystal_ref", crystal_file.hash);
        const sg::LayerPlan plan = io::plan_from_json(plan_file.doc);
        if (plan.num_ions() != crystal.size()) {
            throw sg::ValidationError("plan and crystal disagree on the ion count");
        }
        if (restarts < 1) {
            throw sg::ValidationError("--restarts must be positive");
        }
        const sg::FrequencyGrid grid = sg::make_frequency_grid(crystal, tones);
        const sg::PhaseKernel kernel = sg::build_phase_kernel(crystal, grid);
        sg::SynthesisOptions options;
        options.restarts = restarts;
        options.tolerance = tolerance;

        int status = 0;
        for (size_t l = 0; l < plan.layers.size(); ++l) {
            try {
                const sg::DriveSolution drive =
                    sg::synthesize_drive(plan.layers[l].phi_layer, crystal, grid, kernel, plan.partition,
                                         sg::derive_seed(seed, l), options);
                const fs::path path = fs::path(out_dir) / ("drive_layer" + std::to_string(l) + ".json");
                save(path, io::drive_to_json(drive, static_cast<int>(l), plan_file.hash));
                std::cout << "layer " << l << " power=" << format_double(drive.total_power())
                          << " residual=" << format_double(drive.constraint_residual) << " -> " << path.string()
                          << "\n";
            } catch (const sg::SolverError &e) {
                std::cerr << "layer " << l << ": " << e.what() << "\n";
                status = kExitFailure;
            }
        }
        return status;
    }
};

struct CertifyCmd {
    std::string plan_path;
    std::string target_path;
    std::vector<std::string> drive_paths;
    std::string crystal_path;
    double tolerance = sg::kCertifyTolerance;
    std::string out;

    int run() const {
        const Loaded plan_file = load(plan_path);
        const sg::LayerPlan plan = io::plan_from_json(plan_file.doc);
        const Loaded target_file = load(target_path);
        const sg::TargetGate target = io::target_from_json(target_file.doc);
        if (plan.num_ions() > sg::kMaxEnumeratedIons) {
            throw sg::ValidationError("certification enumerates 2^N states and is limited to N <= " +
                                      std::to_string(sg::kMaxEnumeratedIons));
        }
        const sg::Certificate cert = sg::certify(plan, target, tolerance);
        bool pass = cert.pass;

        io::Json doc{{"target_hash", target_file.hash},
                     {"plan_hash", plan_file.hash},
                     {"max_phase_error", cert.max_phase_error}};
        if (!drive_paths.empty()) {
            if (crystal_path.empty()) {
                throw sg::ValidationError("--crystal is required with --drive");
            }
            const Loaded crystal_file = load(crystal_path);
            io::require_ref(plan_file.doc, "crystal_ref", crystal_file.hash);
            const sg::IonCrystal crystal = io::crystal_from_json(crystal_file.doc);
            std::vector<double> displacement(crystal.size(), 0.0);
            double drive_error = 0.0;
            for (const auto &path : drive_paths) {
                const Loaded drive_file = load(path);
                io::require_ref(drive_file.doc, "plan_ref", plan_file.hash);
                const int layer = drive_file.doc.at("layer").get<int>();
                if (layer < 0 || layer >= static_cast<int>(plan.layers.size())) {
                    throw sg::ValidationError(path + " names layer " + std::to_string(layer) +
                                              " outside the plan");
                }
                const sg::DriveSolution drive = io::drive_from_json(drive_file.doc);
                const sg::PhaseOutcome outcome = sg::integrate_drive(crystal, drive);
                drive_error = std::max(drive_error,
                                       (outcome.achieved_phi - plan.layers[layer].phi_layer).cwiseAbs().maxCoeff());
                for (int j = 0; j < crystal.size(); ++j) {
                    displacement[j] = std::max(displacement[j], outcome.residual_displacements(j));
                }
            }
            const double worst = *std::max_element(displacement.begin(), displacement.end());
            pass = pass && drive_error <= kDrivePhaseTolerance && worst <= kDisplacementTolerance;
            doc["per_mode_displacement"] = displacement;
            doc["drive_phase_error"] = drive_error;
        } else {
            doc["per_mode_displacement"] = io::Json::array();
        }
        doc["pass"] = pass;
        save(out, doc);
        std::cout << (pass ? "PASS" : "FAIL") << " max_phase_error=" << format_double(cert.max_phase_error) << "\n";
        return pass ? 0 : kExitFailure;
    }
};

struct ReportCmd {
    std::string kind;
    int n = 6;
    int n_min = 3;
    int n_max = 12;
    std::vector<int> beams;
    bool beams_given = false;
    std::string strategy = "auto";
    uint64_t seed = 0;
    int pool = 32;
    int gates = 10;
    int tones = 0;
    std::string out;

    int run() const {
        if (beams_given && beams.empty()) {
            throw sg::ValidationError("--b needs at least one beam count");
        }
        std::ostringstream csv;
        if (kind == "layers") {
            if (n_min < 2 || n_max < n_min) {
                throw sg::ValidationError("need 2 <= --n-min <= --n-max");
            }
            const std::vector<int> list = beams.empty() ? std::vector<int>{1} : beams;
            csv << "N,B,layers,layer_bound,rank,full_rank\n";
            for (int size = n_min; size <= n_max; ++size) {
                sg::TrapConfig config;
                config.num_ions = size;
                const sg::ModeMatrixSet modes = sg::mode_matrices(sg::make_crystal(config));
                for (int b : list) {
                    if (b < 1 || b > size) {
                        continue;
                    }
                    const sg::BeamPartition partition = sg::BeamPartition::contiguous(size, b);
                    sg::SearchOptions options;
                    options.strategy = pick_strategy(strategy, size);
                    options.seed = seed;
                    options.pool_size = pool;
                    int layers = 0;
                    int rank = 0;
                    try {
                        const sg::FlipBasis basis = sg::search_flip_basis(modes, partition, options);
                        layers = static_cast<int>(basis.layers.size());
                        rank = basis.collection.rank;
                    } catch (const sg::IncompleteBasisError &e) {
                        rank = e.achieved_rank();
                    }
                    csv << size << "," << b << "," << layers << "," << sg::layer_bound(size, b) << "," << rank
                        << "," << sg::block_dimension(size, partition) << "\n";
                }
            }
        } else if (kind == "power") {
            const std::vector<int> list = beams.empty() ? std::vector<int>{1, 2, n / 2, n} : beams;
            std::vector<int> unique;
            for (int b : list) {
                if (std::find(unique.begin(), unique.end(), b) == unique.end()) {
                    unique.push_back(b);
                }
            }
            sg::TrapConfig config;
            config.num_ions = n;
            sg::PowerReportOptions options;
            options.num_gates = gates;
            options.seed = seed;
            options.num_tones = tones;
            options.search.pool_size = pool;
            options.search.strategy = pick_strategy(strategy, n);
            const auto rows = sg::power_ratio_report(sg::make_crystal(config), unique, options);
            csv << "# mean over converged layers of L2(all tone amplitudes) / nuclear_norm(layer phi)\n";
            csv << "B,mean_power_ratio,num_converged\n";
            for (const auto &row : rows) {
                csv << row.beams << "," << format_double(row.mean_power_ratio) << "," << row.num_converged << "\n";
            }
        } else {
            throw sg::ValidationError("unknown report kind " + kind);
        }
        if (out.empty()) {
            std::cout << csv.str();
        } else {
            io::write_file(out, csv.str());
        }
        return 0;
    }
};

}  // namespace

int main(int argc, char **argv) {
    CLI::App app{"Semi-global entangling gate compiler"};
    app.require_subcommand(1);

    CrystalCmd crystal;
    auto *c = app.add_subcommand("crystal", "equilibrium positions and normal modes");
    crystal.trap.add(*c, true);
    c->add_option("--out", crystal.out, "crystal file")->required();

    BasisCmd basis;
    auto *b = app.add_subcommand("basis", "search a complete flip basis");
    b->add_option("--crystal", basis.crystal_path, "crystal file");
    basis.trap.add(*b, false);
    b->add_option("--b", basis.beams, "number of beams")->capture_default_str();
    b->add_option("--strategy", basis.strategy, "exhaustive, greedy or auto")
        ->check(CLI::IsMember({"auto", "exhaustive", "greedy"}))
        ->capture_default_str();
    b->add_option("--seed", basis.seed)->capture_default_str();
    b->add_option("--pool", basis.pool, "independent searches")->capture_default_str();
    b->add_option("--max-layers", basis.max_layers, "0 means no limit")->capture_default_str();
    b->add_option("--out", basis.out, "basis file")->required();

    CompileCmd compile;
    auto *k = app.add_subcommand("compile", "decompose a target onto a basis");
    k->add_option("--crystal", compile.crystal_path)->required();
    k->add_option("--basis", compile.basis_path)->required();
    k->add_option("--target", compile.target_path, "target file");
    k->add_flag("--random", compile.random, "draw a seeded random target");
    k->add_option("--seed", compile.seed)->capture_default_str();
    k->add_option("--target-out", compile.target_out, "write the random target here");
    k->add_option("--tolerance", compile.tolerance, "relative residual bound")->capture_default_str();
    k->add_option("--out", compile.out, "plan file")->required();

    SynthesizeCmd synth;
    auto *s = app.add_subcommand("synthesize", "multi-tone drives for every plan layer");
    s->add_option("--plan", synth.plan_path)->required();
    s->add_option("--crystal", synth.crystal_path)->required();
    s->add_option("--seed", synth.seed)->capture_default_str();
    s->add_option("--tones", synth.tones, "0 means 4N + 4")->capture_default_str();
    s->add_option("--restarts", synth.restarts)->capture_default_str();
    s->add_option("--tolerance", synth.tolerance, "relative pair-phase bound")->capture_default_str();
    s->add_option("--out", synth.out_dir, "output directory")->required();

    CertifyCmd cert;
    auto *v = app.add_subcommand("certify", "check a plan (and optionally its drives) against a target");
    v->add_option("--plan", cert.plan_path)->required();
    v->add_option("--target", cert.target_path)->required();
    v->add_option("--drive", cert.drive_paths, "drive files to re-integrate");
    v->add_option("--crystal", cert.crystal_path, "needed with --drive");
    v->add_option("--tolerance", cert.tolerance, "basis-state phase bound")->capture_default_str();
    v->add_option("--out", cert.out, "certificate file")->required();

    ReportCmd report;
    auto *r = app.add_subcommand("report", "CSV tables of layer counts or drive power");
    r->add_option("kind", report.kind, "layers or power")->required()->check(CLI::IsMember({"layers", "power"}));
    r->add_option("--n", report.n, "ions (power)")->capture_default_str();
    r->add_option("--n-min", report.n_min, "smallest N (layers)")->capture_default_str();
    r->add_option("--n-max", report.n_max, "largest N (layers)")->capture_default_str();
    auto *beam_opt = r->add_option("--b", report.beams, "comma-separated beam counts")
                         ->delimiter(',');
    r->add_option("--strategy", report.strategy)->check(CLI::IsMember({"auto", "exhaustive", "greedy"}));
    r->add_option("--seed", report.seed)->capture_default_str();
    r->add_option("--pool", report.pool)->capture_default_str();
    r->add_option("--gates", report.gates)->capture_default_str();
    r->add_option("--tones", report.tones)->capture_default_str();
    r->add_option("--out", report.out, "CSV file (stdout when omitted)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError &e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitInvalid;
    }
    report.beams_given = beam_opt->count() > 0;

    try {
        if (*c) return crystal.run();
        if (*b) return basis.run();
        if (*k) return compile.run();
        if (*s) return synth.run();
        if (*v) return cert.run();
        return report.run();
    } catch (const sg::ValidationError &e) {
        std::cerr << "sgc: " << e.what() << "\n";
        return kExitInvalid;
    } catch (const std::exception &e) {
        std::cerr << "sgc: " << e.what() << "\n";
        return kExitFailure;
    }
}
