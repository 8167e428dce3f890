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

// JSON artifact files and their content hashes.
//
// Every document is written with the same layout, so equal contents give equal bytes.
// Downstream files record the SHA-256 of the exact upstream file bytes.

#ifndef SEMIGLOBAL_IO_HPP
#define SEMIGLOBAL_IO_HPP

#include <filesystem>
#include <json.hpp>
#include <string>
#include <string_view>

#include "semiglobal/crystal.hpp"
#include "semiglobal/decomposer.hpp"
#include "semiglobal/drivesynth.hpp"
#include "semiglobal/flipbasis.hpp"

namespace semiglobal::io {

using Json = nlohmann::json;

/// Lowercase hex SHA-256 digest.
std::string sha256_hex(std::string_view bytes);

/// Two-space indented text with a trailing newline. Doubles use the shortest exact form.
std::string dump(const Json &doc);

/// Throws ValidationError when the text is not JSON; `what` names the source in the message.
Json parse(std::string_view text, const std::string &what);

std::string read_file(const std::filesystem::path &path);
void write_file(const std::filesystem::path &path, std::string_view contents);

Json crystal_to_json(const IonCrystal &crystal);
IonCrystal crystal_from_json(const Json &doc);

/// Assignments are stored 1-based.
Json basis_to_json(const FlipBasis &basis, const std::string &crystal_ref);
/// Rebuilds the collection matrix from the stored layers.
FlipBasis basis_from_json(const Json &doc, const ModeMatrixSet &modes);

/// `phi` is stored as N rows of N entries.
Json target_to_json(const TargetGate &target);
TargetGate target_from_json(const Json &doc);

/// phi_layer is stored as its row-major strict upper triangle.
Json plan_to_json(const LayerPlan &plan, const std::string &basis_ref, const std::string &crystal_ref);
LayerPlan plan_from_json(const Json &doc);

Json drive_to_json(const DriveSolution &drive, int layer, const std::string &plan_ref);
DriveSolution drive_from_json(const Json &doc);

/// Throws ValidationError unless `doc[key]` is a string equal to `expected`.
void require_ref(const Json &doc, const std::string &key, const std::string &expected);

}  // namespace semiglobal::io

#endif
