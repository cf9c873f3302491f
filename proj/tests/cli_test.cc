// Copyright 2026 The DONAS Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "donas/cli.h"

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

namespace donas {
namespace {

namespace fs = std::filesystem;

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    root_ = fs::temp_directory_path() /
            ("donas_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(root_);
    fs::create_directories(root_);
  }
  void TearDown() override { fs::remove_all(root_); }

  std::string WriteConfig(const std::string& name, const std::string& text) {
    const fs::path p = root_ / name;
    std::ofstream(p) << text;
    return p.string();
  }
  std::string Out(const std::string& name) const { return (root_ / name).string(); }

  static std::string Read(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
  }

  static int Run(std::vector<std::string> args) {
    args.insert(args.begin(), "donas");
    return RunCli(args);
  }

  fs::path root_;
};

constexpr char kDemo[] =
    "mode = matrix-demo\n"
    "matrix = 0,2,-1,3; 1,-2,0,1; -1,1,2,-3; 2,0,-2,1\n"
    "epsilon_term = 1e-9\n";

TEST_F(CliTest, MatrixDemoSucceeds) {
  const std::string cfg = WriteConfig("demo.cfg", kDemo);
  EXPECT_EQ(Run({"run", "--config", cfg, "--out", Out("o")}), kExitOk);
  for (const char* f : {"trace.csv", "metrics.csv", "manifest.txt"})
    EXPECT_TRUE(fs::exists(root_ / "o" / f)) << f;
  EXPECT_NE(Read(root_ / "o" / "metrics.csv").find("full_game_value"), std::string::npos);
}

TEST_F(CliTest, MissingConfigFileWritesOnlyManifest) {
  EXPECT_EQ(Run({"run", "--config", Out("absent.cfg"), "--out", Out("o")}), kExitInvalidConfig);
  int files = 0;
  for ([[maybe_unused]] const auto& e : fs::directory_iterator(root_ / "o")) ++files;
  EXPECT_EQ(files, 1);
  const std::string manifest = Read(root_ / "o" / "manifest.txt");
  EXPECT_NE(manifest.find("status = failed"), std::string::npos);
  EXPECT_NE(manifest.find("absent.cfg"), std::string::npos);
}

TEST_F(CliTest, InvalidConfigAndArguments) {
  const std::string bad = WriteConfig("bad.cfg", "mode = at\nsupport_limit = 0\n");
  EXPECT_EQ(Run({"run", "--config", bad, "--out", Out("o")}), kExitInvalidConfig);
  EXPECT_NE(Read(root_ / "o" / "manifest.txt").find("line 2"), std::string::npos);
  const std::string ok = WriteConfig("ok.cfg", kDemo);
  EXPECT_EQ(Run({"run"}), kExitInvalidConfig);
  EXPECT_EQ(Run({}), kExitInvalidConfig);
  EXPECT_EQ(Run({"run", "--config", ok, "--mode", "poker"}), kExitInvalidConfig);
  EXPECT_EQ(Run({"run", "--config", ok, "--bogus"}), kExitInvalidConfig);
}

TEST_F(CliTest, SameSeedSameTrace) {
  const std::string cfg = WriteConfig("demo.cfg", kDemo);
  ASSERT_EQ(Run({"run", "--config", cfg, "--seed", "7", "--out", Out("a")}), kExitOk);
  ASSERT_EQ(Run({"run", "--config", cfg, "--seed", "7", "--out", Out("b")}), kExitOk);
  EXPECT_EQ(Read(root_ / "a" / "trace.csv"), Read(root_ / "b" / "trace.csv"));
  EXPECT_NE(Read(root_ / "a" / "manifest.txt").find("seed = 7"), std::string::npos);
}

TEST_F(CliTest, ModeOverride) {
  const std::string cfg = WriteConfig("demo.cfg", "mode = gan\n");
  ASSERT_EQ(Run({"run", "--config", cfg, "--mode", "matrix-demo", "--out", Out("o")}), kExitOk);
  EXPECT_NE(Read(root_ / "o" / "manifest.txt").find("mode = matrix-demo"), std::string::npos);
}

TEST_F(CliTest, StopAndResume) {
  const std::string cfg = WriteConfig("demo.cfg", kDemo);
  ASSERT_EQ(Run({"run", "--config", cfg, "--out", Out("full")}), kExitOk);
  ASSERT_EQ(Run({"run", "--config", cfg, "--out", Out("split"), "--stop-after", "1"}), kExitOk);
  ASSERT_EQ(Run({"run", "--config", cfg, "--out", Out("split"), "--resume"}), kExitOk);
  EXPECT_EQ(Read(root_ / "split" / "trace.csv"), Read(root_ / "full" / "trace.csv"));
  EXPECT_EQ(Run({"run", "--config", cfg, "--out", Out("empty"), "--resume"}), kExitFailure);
}

TEST_F(CliTest, NumericFailureExitCode) {
  const std::string cfg =
      WriteConfig("overflow.cfg", "mode = matrix-demo\nmatrix = 1e308,-1e308; -1e308,1e308\n");
  EXPECT_EQ(Run({"run", "--config", cfg, "--out", Out("o")}), kExitNumeric);
  EXPECT_NE(Read(root_ / "o" / "manifest.txt").find("status = failed"), std::string::npos);
}

}  // namespace
}  // namespace donas
