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

#include "donas/config.h"

#include <gtest/gtest.h>

#include <filesystem>
#include <string>

namespace donas {
namespace {

// Runs ParseConfig and returns the ConfigError message, or "" on success.
std::string ParseError(const std::string& text) {
  try {
    ParseConfig(text);
  } catch (const ConfigError& e) {
    return e.what();
  }
  return "";
}

TEST(ParseConfigTest, EmptyTextGivesDefaults) {
  EXPECT_EQ(ParseConfig("").ToText(), ExperimentConfig{}.ToText());
}

TEST(ParseConfigTest, CommentsWhitespaceAndTypes) {
  const ExperimentConfig c = ParseConfig(
      "# header\n"
      "\n"
      "  mode   =  gan   # trailing comment\n"
      "seed = 18446744073709551615\n"
      "prune = false\n"
      "gen_widths = 8, 4,2\n"
      "epsilon_term = 5e-3\n");
  EXPECT_EQ(c.mode, "gan");
  EXPECT_EQ(c.seed, 18446744073709551615ull);
  EXPECT_FALSE(c.prune);
  EXPECT_EQ(c.gen_widths, (std::vector<int>{8, 4, 2}));
  EXPECT_EQ(c.epsilon_term, 5e-3);
}

TEST(ParseConfigTest, UnknownKeyNamesLineAndKey) {
  const std::string msg = ParseError("mode = at\nbogus_key = 3\n");
  EXPECT_NE(msg.find("line 2"), std::string::npos) << msg;
  EXPECT_NE(msg.find("bogus_key"), std::string::npos) << msg;
  EXPECT_NE(msg.find("unknown"), std::string::npos) << msg;
}

TEST(ParseConfigTest, DuplicateKeyNamesBothLines) {
  const std::string msg = ParseError("seed = 1\nmode = at\nseed = 2\n");
  EXPECT_NE(msg.find("line 3"), std::string::npos) << msg;
  EXPECT_NE(msg.find("line 1"), std::string::npos) << msg;
  EXPECT_NE(msg.find("seed"), std::string::npos) << msg;
}

TEST(ParseConfigTest, MalformedValues) {
  for (const char* text : {"max_epochs = 3.5", "max_epochs = ten", "prune = maybe",
                           "gen_widths = 8,x", "epsilon_term = ", "seed = -1"}) {
    const std::string msg = ParseError(std::string("# c\n") + text + "\n");
    EXPECT_NE(msg.find("line 2"), std::string::npos) << text << ": " << msg;
  }
  EXPECT_NE(ParseError("just words\n").find("line 1"), std::string::npos);
}

TEST(ParseConfigTest, RangeErrorsPointAtTheLine) {
  for (const char* text : {"support_limit = 1", "epsilon_term = 0", "mode = chess",
                           "finetune = greedy", "coverage_min_frac = 1.5", "gen_widths = 0",
                           "hm_discriminator = oldest", "epsilon_atk = 0"}) {
    const std::string msg = ParseError(std::string("seed = 3\n") + text + "\n");
    EXPECT_NE(msg.find("line 2"), std::string::npos) << text << ": " << msg;
  }
}

TEST(ParseConfigTest, BadDemoMatrixIsConfigError) {
  EXPECT_FALSE(ParseError("mode = matrix-demo\nmatrix = 1,2; 3\n").empty());
  EXPECT_TRUE(ParseError("mode = gan\nmatrix = 1,2; 3\n").empty());
}

TEST(ToTextTest, RoundTrip) {
  ExperimentConfig c;
  c.mode = "at";
  c.seed = 123456789;
  c.epsilon_term = 0.1 + 0.2;
  c.prune = false;
  c.gen_widths = {3, 5, 7};
  c.arch_lr = 1.0 / 3.0;
  c.hm_discriminator = "dominant";
  c.finetune = "hm";
  c.matrix = "1, 2; 3, 4";
  const std::string text = c.ToText();
  const ExperimentConfig back = ParseConfig(text);
  EXPECT_EQ(back.ToText(), text);
  EXPECT_EQ(back.epsilon_term, c.epsilon_term);
  EXPECT_EQ(back.arch_lr, c.arch_lr);
  EXPECT_EQ(back.gen_widths, c.gen_widths);
}

TEST(LoadConfigTest, MissingFile) {
  EXPECT_THROW(LoadConfig("/nonexistent/donas.cfg"), ConfigError);
}

TEST(LoadConfigTest, ShippedConfigsValidate) {
  int found = 0;
  for (const auto& entry :
       std::filesystem::directory_iterator(std::string(DONAS_SOURCE_DIR) + "/configs")) {
    if (entry.path().extension() != ".cfg") continue;
    ++found;
    EXPECT_NO_THROW(LoadConfig(entry.path().string())) << entry.path();
  }
  EXPECT_GE(found, 2);
}

TEST(ParseMatrixTest, RowsAndColumns) {
  const Matrix m = ParseMatrix(" 1, -2.5 ; 3,4e1 ");
  ASSERT_EQ(m.rows(), 2);
  ASSERT_EQ(m.cols(), 2);
  EXPECT_EQ(m(0, 1), -2.5);
  EXPECT_EQ(m(1, 1), 40.0);
  EXPECT_EQ(ParseMatrix("7").size(), 1);
}

TEST(ParseMatrixTest, Errors) {
  EXPECT_THROW(ParseMatrix("1,2;3"), InputError);
  EXPECT_THROW(ParseMatrix("1,a"), InputError);
  EXPECT_THROW(ParseMatrix("1,inf"), InputError);
  EXPECT_THROW(ParseMatrix(""), InputError);
}

}  // namespace
}  // namespace donas
