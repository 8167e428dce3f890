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

#include "semiglobal/io.hpp"

#include <openssl/evp.h>

#include <fstream>
#include <iomanip>
#include <memory>
#include <sstream>

#include "semiglobal/errors.hpp"

namespace semiglobal::io {

namespace {

std::vector<double> to_std(const Vector &v) { return std::vector<double>(v.data(), v.data() + v.size()); }

Vector to_eigen(const std::vector<double> &v) { return Eigen::Map<const Vector>(v.data(), static_cast<Eigen::Index>(v.size())); }

std::vector<double> upper_triangle(const Matrix &m) {
    std::vector<double> out;
    for (Eigen::Index a = 0; a < m.rows(); ++a) {
        for (Eigen::Index b = a + 1; b < m.cols(); ++b) {
            out.push_back(m(a, b));
        }
    }
    return out;
}

Matrix from_upper_triangle(const std::vector<double> &v, int n) {
    if (static_cast<int>(v.size()) != n * (n - 1) / 2) {
        throw ValidationError("upper triangle has " + std::to_string(v.size()) + " entries, expected " +
                              std::to_string(n * (n - 1) / 2));
    }
    Matrix m = Matrix::Zero(n, n);
    size_t k = 0;
    for (int a = 0; a < n; ++a) {
        for (int b = a + 1; b < n; ++b) {
            m(a, b) = v[k];
            m(b, a) = v[k];
            ++k;
        }
    }
    return m;
}

std::vector<int> one_based(const std::vector<int> &assignment) {
    std::vector<int> out(assignment);
    for (int &a : out) {
        ++a;
    }
    return out;
}

BeamPartition partition_from(const Json &assignment) {
    std::vector<int> zero = assignment.get<std::vector<int>>();
    for (int &a : zero) {
        if (a < 1) {
            throw ValidationError("assignment entries are 1-based beam indices");
        }
        --a;
    }
    return BeamPartition::from_assignment(std::move(zero));
}

// Converts nlohmann type and key errors into ValidationError.
template <typename F>
auto guarded(const char *kind, F &&body) {
    try {
        return body();
    } catch (const Json::exception &e) {
        throw ValidationError(std::string("malformed ") + kind + " file: " + e.what());
    }
}

}  // namespace

std::string sha256_hex(std::string_view bytes) {
    std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(), EVP_MD_CTX_free);
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int length = 0;
    if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) != 1 ||
        EVP_DigestUpdate(ctx.get(), bytes.data(), bytes.size()) != 1 ||
        EVP_DigestFinal_ex(ctx.get(), digest, &length) != 1) {
        throw std::runtime_error("SHA-256 computation failed");
    }
    std::ostringstream hex;
    for (unsigned int k = 0; k < length; ++k) {
        hex << std::hex << std::setw(2) << std::setfill('0') << static_cast<int>(digest[k]);
    }
    return hex.str();
}

std::string dump(const Json &doc) { return doc.dump(2) + "\n"; }

Json parse(std::string_view text, const std::string &what) {
    try {
        return Json::parse(text);
    } catch (const Json::parse_error &e) {
        throw ValidationError(what + " is not valid JSON: " + e.what());
    }
}

std::string read_file(const std::filesystem::path &path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw ValidationError("cannot read " + path.string());
    }
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

void write_file(const std::filesystem::path &path, std::string_view contents) {
    if (path.has_parent_path()) {
        std::filesystem::create_directories(path.parent_path());
    }
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
    if (!out) {
        throw std::runtime_error("cannot write " + path.string());
    }
}

Json crystal_to_json(const IonCrystal &crystal) {
    const Matrix &o = crystal.mode_vectors;
    std::vector<double> rows;
    for (Eigen::Index r = 0; r < o.rows(); ++r) {
        for (Eigen::Index c = 0; c < o.cols(); ++c) {
            rows.push_back(o(r, c));
        }
    }
    return Json{{"n", crystal.size()},
                {"positions", to_std(crystal.positions)},
                {"mode_freqs", to_std(crystal.mode_freqs)},
                {"mode_vectors", rows},
                {"lamb_dicke", to_std(crystal.lamb_dicke)}};
}

IonCrystal crystal_from_json(const Json &doc) {
    return guarded("crystal", [&] {
        const int n = doc.at("n").get<int>();
        const auto flat = doc.at("mode_vectors").get<std::vector<double>>();
        if (n < 1 || static_cast<int>(flat.size()) != n * n) {
            throw ValidationError("mode_vectors must hold n * n entries");
        }
        const Matrix o = Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(
            flat.data(), n, n);
        IonCrystal crystal = load_crystal(to_eigen(doc.at("positions").get<std::vector<double>>()),
                                          to_eigen(doc.at("mode_freqs").get<std::vector<double>>()), o,
                                          to_eigen(doc.at("lamb_dicke").get<std::vector<double>>()));
        if (crystal.size() != n) {
            throw ValidationError("crystal n does not match its arrays");
        }
        return crystal;
    });
}

Json basis_to_json(const FlipBasis &basis, const std::string &crystal_ref) {
    Json layers = Json::array();
    for (const auto &layer : basis.layers) {
        layers.push_back(layer.to_string());
    }
    return Json{{"n", basis.num_ions()},
                {"b", basis.partition.beams()},
                {"assignment", one_based(basis.partition.assignment())},
                {"layers", layers},
                {"rank", basis.collection.rank},
                {"pinv_inf_norm", basis.collection.pinv_inf_norm},
                {"seed", basis.seed},
                {"crystal_ref", crystal_ref}};
}

FlipBasis basis_from_json(const Json &doc, const ModeMatrixSet &modes) {
    return guarded("basis", [&] {
        const int n = doc.at("n").get<int>();
        const BeamPartition partition = partition_from(doc.at("assignment"));
        if (partition.size() != n || partition.beams() != doc.at("b").get<int>()) {
            throw ValidationError("basis n or b does not match its assignment");
        }
        if (modes.size() != n) {
            throw ValidationError("basis and crystal disagree on the ion count");
        }
        std::vector<FlipLayer> layers;
        for (const auto &bits : doc.at("layers")) {
            layers.push_back(FlipLayer::from_string(bits.get<std::string>()));
        }
        FlipBasis basis = make_flip_basis(modes, std::move(layers), partition, doc.at("seed").get<uint64_t>());
        if (basis.collection.rank != doc.at("rank").get<int>()) {
            throw ValidationError("stored basis rank does not match the recomputed rank");
        }
        return basis;
    });
}

Json target_to_json(const TargetGate &target) {
    Json rows = Json::array();
    for (Eigen::Index r = 0; r < target.phi.rows(); ++r) {
        rows.push_back(to_std(target.phi.row(r).transpose()));
    }
    return Json{{"n", target.size()}, {"phi", rows}};
}

TargetGate target_from_json(const Json &doc) {
    return guarded("target", [&] {
        const int n = doc.at("n").get<int>();
        const auto &rows = doc.at("phi");
        if (n < 2 || static_cast<int>(rows.size()) != n) {
            throw ValidationError("target phi must have n rows");
        }
        TargetGate target{Matrix(n, n)};
        for (int r = 0; r < n; ++r) {
            const auto row = rows[r].get<std::vector<double>>();
            if (static_cast<int>(row.size()) != n) {
                throw ValidationError("target phi row " + std::to_string(r) + " must have n entries");
            }
            target.phi.row(r) = to_eigen(row).transpose();
        }
        target.validate();
        return target;
    });
}

Json plan_to_json(const LayerPlan &plan, const std::string &basis_ref, const std::string &crystal_ref) {
    Json layers = Json::array();
    for (const auto &layer : plan.layers) {
        layers.push_back(Json{{"flip", layer.flip.to_string()},
                              {"alpha", to_std(layer.alpha)},
                              {"phi_layer", upper_triangle(layer.phi_layer)}});
    }
    return Json{{"n", plan.num_ions()},
                {"b", plan.partition.beams()},
                {"assignment", one_based(plan.partition.assignment())},
                {"layers", layers},
                {"residual", plan.residual},
                {"basis_ref", basis_ref},
                {"crystal_ref", crystal_ref}};
}

LayerPlan plan_from_json(const Json &doc) {
    return guarded("plan", [&] {
        const int n = doc.at("n").get<int>();
        LayerPlan plan;
        plan.partition = partition_from(doc.at("assignment"));
        if (plan.partition.size() != n || plan.partition.beams() != doc.at("b").get<int>()) {
            throw ValidationError("plan n or b does not match its assignment");
        }
        const Eigen::Index per_layer = static_cast<Eigen::Index>(plan.partition.num_blocks()) * n;
        for (const auto &entry : doc.at("layers")) {
            PlanLayer layer;
            layer.flip = FlipLayer::from_string(entry.at("flip").get<std::string>());
            layer.alpha = to_eigen(entry.at("alpha").get<std::vector<double>>());
            layer.phi_layer = from_upper_triangle(entry.at("phi_layer").get<std::vector<double>>(), n);
            if (layer.flip.size() != n || layer.alpha.size() != per_layer) {
                throw ValidationError("plan layer dimensions do not match n and b");
            }
            if (!layer.alpha.allFinite() || !layer.phi_layer.allFinite()) {
                throw ValidationError("plan layer contains non-finite entries");
            }
            plan.layers.push_back(std::move(layer));
        }
        plan.residual = doc.at("residual").get<double>();
        return plan;
    });
}

Json drive_to_json(const DriveSolution &drive, int layer, const std::string &plan_ref) {
    Json beams = Json::array();
    for (Eigen::Index b = 0; b < drive.amplitudes.rows(); ++b) {
        beams.push_back(Json{{"amplitudes", to_std(drive.amplitudes.row(b).transpose())},
                             {"phases", to_std(drive.phases.row(b).transpose())}});
    }
    return Json{{"gate_time", drive.grid.gate_time},
                {"tones", drive.grid.tones},
                {"beams", beams},
                {"partition", one_based(drive.partition.assignment())},
                {"constraint_residual", drive.constraint_residual},
                {"seed", drive.seed},
                {"layer", layer},
                {"plan_ref", plan_ref}};
}

DriveSolution drive_from_json(const Json &doc) {
    return guarded("drive", [&] {
        DriveSolution drive;
        drive.grid.gate_time = doc.at("gate_time").get<double>();
        drive.grid.tones = doc.at("tones").get<std::vector<double>>();
        drive.grid.validate();
        drive.partition = partition_from(doc.at("partition"));
        const auto &beams = doc.at("beams");
        const int m = drive.grid.size();
        if (static_cast<int>(beams.size()) != drive.partition.beams()) {
            throw ValidationError("drive beam count does not match its partition");
        }
        drive.amplitudes.resize(drive.partition.beams(), m);
        drive.phases.resize(drive.partition.beams(), m);
        for (int b = 0; b < drive.partition.beams(); ++b) {
            const auto amplitudes = beams[b].at("amplitudes").get<std::vector<double>>();
            const auto phases = beams[b].at("phases").get<std::vector<double>>();
            if (static_cast<int>(amplitudes.size()) != m || static_cast<int>(phases.size()) != m) {
                throw ValidationError("beam " + std::to_string(b) + " does not have one entry per tone");
            }
            drive.amplitudes.row(b) = to_eigen(amplitudes).transpose();
            drive.phases.row(b) = to_eigen(phases).transpose();
        }
        drive.constraint_residual = doc.at("constraint_residual").get<double>();
        drive.seed = doc.at("seed").get<uint64_t>();
        return drive;
    });
}

void require_ref(const Json &doc, const std::string &key, const std::string &expected) {
    const auto it = doc.find(key);
    if (it == doc.end() || !it->is_string()) {
        throw ValidationError("missing " + key);
    }
    if (it->get<std::string>() != expected) {
        throw ValidationError(key + " does not match the supplied file (expected " + expected + ", found " +
                              it->get<std::string>() + ")");
    }
}

}  // namespace semiglobal::io
