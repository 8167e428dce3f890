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

#include <gtest/gtest.h>
#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "semiglobal/io.hpp"

namespace fs = std::filesystem;
namespace io = semiglobal::io;
namespace sg = semiglobal;

namespace {

class Cli : public ::testing::Test {
   protected:
    void SetUp() override {
        dir_ = fs::temp_directory_path() /
               ("sgc_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
        fs::remove_all(dir_);
        fs::create_directories(dir_);
    }
    void TearDown() override { fs::remove_all(dir_); }

    int run(const std::string &args) const {
        const std::string cmd = std::string(SGC_PATH) + " " + args + " > " + (dir_ / "stdout.txt").string() + " 2>&1";
        const int status = std::system(cmd.c_str());
        return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    }

    std::string path(const std::string &name) const { return (dir_ / name).string(); }
    io::Json json(const std::string &name) const { return io::parse(io::read_file(path(name)), name); }

    std::vector<std::vector<std::string>> csv(const std::string &name) const {
        std::istringstream in(io::read_file(path(name)));
        std::vector<std::vector<std::string>> rows;
        for (std::string line; std::getline(in, line);) {
            if (line.empty() || line[0] == '#') {
                continue;
            }
            std::vector<std::string> cells;
            std::istringstream cell_stream(line);
            for (std::string cell; std::getline(cell_stream, cell, ',');) {
                cells.push_back(cell);
            }
            rows.push_back(cells);
        }
        return rows;
    }

    // crystal, basis and a random-target plan for N ions and B beams.
    void pipeline(int n, int beams, uint64_t seed = 1) const {
        ASSERT_EQ(run("crystal --n " + std::to_string(n) + " --out " + path("c.json")), 0);
        ASSERT_EQ(run("basis --crystal " + path("c.json") + " --b " + std::to_string(beams) + " --pool 4 --out " +
                      path("b.json")),
                  0);
        ASSERT_EQ(run("compile --crystal " + path("c.json") + " --basis " + path("b.json") + " --random --seed " +
                      std::to_string(seed) + " --target-out " + path("t.json") + " --out " + path("p.json")),
                  0);
    }

    fs::path dir_;
};

}  // namespace

TEST_F(Cli, CrystalWritesValidDeterministicFile) {
    ASSERT_EQ(run("crystal --n 6 --out " + path("a.json")), 0);
    ASSERT_EQ(run("crystal --n 6 --out " + path("b.json")), 0);
    EXPECT_EQ(io::read_file(path("a.json")), io::read_file(path("b.json")));
    const sg::IonCrystal c = io::crystal_from_json(json("a.json"));
    EXPECT_LE((c.mode_vectors.transpose() * c.mode_vectors - sg::Matrix::Identity(6, 6)).cwiseAbs().maxCoeff(), 1e-10);
}

TEST_F(Cli, UsageAndValidationErrorsExitTwo) {
    EXPECT_EQ(run("crystal --n 1 --out " + path("x.json")), 2);
    EXPECT_EQ(run("crystal --out " + path("x.json")), 2);
    EXPECT_EQ(run("frobnicate"), 2);
    EXPECT_EQ(run("compile --crystal " + path("missing.json") + " --basis " + path("missing.json") +
                  " --random --out " + path("p.json")),
              2);
}

TEST_F(Cli, BasisRespectsBoundAndIsDeterministic) {
    ASSERT_EQ(run("basis --n 8 --b 1 --seed 4 --out " + path("a.json")), 0);
    ASSERT_EQ(run("basis --n 8 --b 1 --seed 4 --out " + path("b.json")), 0);
    EXPECT_EQ(io::read_file(path("a.json")), io::read_file(path("b.json")));
    const auto doc = json("a.json");
    EXPECT_LE(doc["layers"].size(), 4u);
    EXPECT_EQ(doc["rank"], 28);
    EXPECT_EQ(doc["n"], 8);
    EXPECT_EQ(doc["b"], 1);
}

TEST_F(Cli, CompileZeroAndRandomTargets) {
    pipeline(5, 2);
    EXPECT_LE(json("p.json")["residual"].get<double>(), 1e-9);

    io::write_file(path("zero.json"), io::dump(io::target_to_json(sg::TargetGate::zero(5))));
    ASSERT_EQ(run("compile --crystal " + path("c.json") + " --basis " + path("b.json") + " --target " +
                  path("zero.json") + " --out " + path("z.json")),
              0);
    for (const auto &layer : json("z.json")["layers"]) {
        for (double a : layer["alpha"].get<std::vector<double>>()) {
            EXPECT_EQ(a, 0.0);
        }
    }
}

TEST_F(Cli, CompileRejectsBasisFromAnotherCrystal) {
    pipeline(5, 1);
    ASSERT_EQ(run("crystal --n 5 --axial 1.5 --out " + path("other.json")), 0);
    EXPECT_EQ(run("compile --crystal " + path("other.json") + " --basis " + path("b.json") + " --random --out " +
                  path("q.json")),
              2);
}

TEST_F(Cli, SynthesizeConvergesAndIsDeterministic) {
    pipeline(4, 2);
    ASSERT_EQ(run("synthesize --plan " + path("p.json") + " --crystal " + path("c.json") + " --seed 3 --out " +
                  path("d1")),
              0);
    ASSERT_EQ(run("synthesize --plan " + path("p.json") + " --crystal " + path("c.json") + " --seed 3 --out " +
                  path("d2")),
              0);
    const auto plan = json("p.json");
    for (size_t l = 0; l < plan["layers"].size(); ++l) {
        const std::string name = "drive_layer" + std::to_string(l) + ".json";
        EXPECT_EQ(io::read_file(path("d1/" + name)), io::read_file(path("d2/" + name)));
        const auto drive = json("d1/" + name);
        double scale = 0.0;
        for (double v : plan["layers"][l]["phi_layer"].get<std::vector<double>>()) {
            scale = std::max(scale, std::abs(v));
        }
        EXPECT_LE(drive["constraint_residual"].get<double>(), 1e-6 * scale);
    }
}

TEST_F(Cli, SynthesizeZeroLayerGivesZeroAmplitudes) {
    pipeline(4, 1);
    io::write_file(path("zero.json"), io::dump(io::target_to_json(sg::TargetGate::zero(4))));
    ASSERT_EQ(run("compile --crystal " + path("c.json") + " --basis " + path("b.json") + " --target " +
                  path("zero.json") + " --out " + path("z.json")),
              0);
    ASSERT_EQ(run("synthesize --plan " + path("z.json") + " --crystal " + path("c.json") + " --out " + path("d")), 0);
    for (const auto &beam : json("d/drive_layer0.json")["beams"]) {
        for (double r : beam["amplitudes"].get<std::vector<double>>()) {
            EXPECT_EQ(r, 0.0);
        }
    }
}

TEST_F(Cli, CertifyPassesCompiledAndFailsCorruptedPlans) {
    pipeline(4, 2);
    ASSERT_EQ(run("synthesize --plan " + path("p.json") + " --crystal " + path("c.json") + " --out " + path("d")), 0);
    std::string drives;
    for (const auto &entry : fs::directory_iterator(path("d"))) {
        drives += " --drive " + entry.path().string();
    }
    ASSERT_EQ(run("certify --plan " + path("p.json") + " --target " + path("t.json") + " --crystal " + path("c.json") +
                  drives + " --out " + path("cert.json")),
              0);
    const auto cert = json("cert.json");
    EXPECT_TRUE(cert["pass"].get<bool>());
    EXPECT_EQ(cert["per_mode_displacement"].size(), 4u);
    EXPECT_EQ(cert["plan_hash"], io::sha256_hex(io::read_file(path("p.json"))));
    EXPECT_EQ(cert["target_hash"], io::sha256_hex(io::read_file(path("t.json"))));

    auto corrupted = json("p.json");
    corrupted["layers"][0]["phi_layer"][0] = corrupted["layers"][0]["phi_layer"][0].get<double>() + 1e-3;
    io::write_file(path("bad.json"), io::dump(corrupted));
    EXPECT_EQ(run("certify --plan " + path("bad.json") + " --target " + path("t.json") + " --out " + path("bad_cert.json")),
              1);
    EXPECT_FALSE(json("bad_cert.json")["pass"].get<bool>());
}

TEST_F(Cli, CertifyRefusesElevenIons) {
    pipeline(11, 1);
    io::write_file(path("d/drive_layer0.json"), "{}\n");
    EXPECT_EQ(run("certify --plan " + path("p.json") + " --target " + path("t.json") + " --crystal " +
                  path("c.json") + " --drive " + path("d/drive_layer0.json") + " --out " + path("cert.json")),
              2);
}

TEST_F(Cli, ReportLayersWithinGlobalBound) {
    ASSERT_EQ(run("report layers --n-max 12 --b 1 --out " + path("layers.csv")), 0);
    const auto rows = csv("layers.csv");
    ASSERT_EQ(rows.size(), 11u);
    EXPECT_EQ(rows[0], (std::vector<std::string>{"N", "B", "layers", "layer_bound", "rank", "full_rank"}));
    for (size_t r = 1; r < rows.size(); ++r) {
        const int n = std::stoi(rows[r][0]);
        EXPECT_LE(std::stoi(rows[r][2]), (n + 1) / 2) << "N=" << n;
        EXPECT_EQ(rows[r][4], rows[r][5]) << "N=" << n;
    }
}

TEST_F(Cli, ReportPowerRatioNonIncreasingInBeams) {
    ASSERT_EQ(run("report power --n 6 --out " + path("power.csv")), 0);
    const auto rows = csv("power.csv");
    ASSERT_EQ(rows.size(), 5u);
    EXPECT_EQ(rows[0], (std::vector<std::string>{"B", "mean_power_ratio", "num_converged"}));
    for (size_t r = 2; r < rows.size(); ++r) {
        EXPECT_LE(std::stod(rows[r][1]), std::stod(rows[r - 1][1])) << "B=" << rows[r][0];
    }
}

TEST_F(Cli, ReportRejectsEmptyBeamList) {
    EXPECT_EQ(run("report power --n 4 --b \"\""), 2);
    EXPECT_EQ(run("report power --n 4 --gates 0"), 2);
}
