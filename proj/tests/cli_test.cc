/*
 * Copyright 2026 The tabxai Authors.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

// Drives the built tabxai executable end to end.
#include <sys/wait.h>

#include <cstdlib>
#include <fstream>

#include "gmock/gmock.h"
#include "gtest/gtest.h"
#include "json.hpp"
#include "tabxai/io.h"
#include "test_util.h"

namespace tabxai {
namespace {

using ::testing::HasSubstr;

struct Outcome {
  int status = -1;
  std::string out;
  std::string err;
};

Outcome RunCli(const std::string& args, const std::string& tag) {
  const auto dir = std::filesystem::temp_directory_path();
  const auto out = dir / ("tabxai_cli_" + tag + ".out");
  const auto err = dir / ("tabxai_cli_" + tag + ".err");
  const std::string cmd = std::string("\"") + TABXAI_CLI_PATH + "\" " + args +
                          " >\"" + out.string() + "\" 2>\"" + err.string() + "\"";
  const int raw = std::system(cmd.c_str());
  Outcome o;
  o.status = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
  o.out = ReadFile(out);
  o.err = ReadFile(err);
  return o;
}

std::string Data() { return " --data \"" + testing::PimaPath().string() + "\""; }

const char* kSmall =
    " --config \"" TABXAI_GOLDEN_DIR "/small_run.conf\"";

TEST(Cli, HelpSucceeds) {
  const auto o = RunCli("--help", "help");
  EXPECT_EQ(o.status, 0);
  EXPECT_THAT(o.out, HasSubstr("explain"));
}

TEST(Cli, MissingSubcommandIsUsageError) {
  const auto o = RunCli("", "nosub");
  EXPECT_EQ(o.status, 1);
  EXPECT_THAT(o.err, HasSubstr("error: E_USAGE"));
}

TEST(Cli, MissingDataIsIoError) {
  const auto out = testing::ScratchDir("cli_missing");
  const auto o = RunCli("train --data /nonexistent.csv --out " + out.string(),
                        "missing");
  EXPECT_EQ(o.status, 2);
  EXPECT_THAT(o.err, HasSubstr("error: E_IO"));
}

TEST(Cli, BadConfigIsValidationError) {
  const auto dir = testing::ScratchDir("cli_badconf");
  WriteFileAtomic(dir / "bad.conf", "n_trees = lots\n");
  const auto o = RunCli("train " + Data() + " --config " +
                            (dir / "bad.conf").string() + " --out " +
                            dir.string(),
                        "badconf");
  EXPECT_EQ(o.status, 1);
  EXPECT_THAT(o.err, HasSubstr("error: E_VALIDATION"));
}

TEST(Cli, ConflictingSelectorsRejected) {
  const auto o = RunCli("explain --row 1 --profile", "conflict");
  EXPECT_EQ(o.status, 1);
}

TEST(Cli, TrainExplainEffects) {
  const auto out = testing::ScratchDir("cli_flow");
  const std::string common = Data() + kSmall + " --out " + out.string();
  ASSERT_EQ(RunCli("train" + common, "flow_train").status, 0);
  auto o = RunCli("explain --row 0 --global" + common, "flow_explain");
  ASSERT_EQ(o.status, 0) << o.err;
  EXPECT_TRUE(std::filesystem::exists(out / "importance.csv"));
  EXPECT_TRUE(std::filesystem::exists(out / "dependence_Glucose.csv"));
  o = RunCli("explain --values 4,154,72,29,126,31.3,0.338,37" + common,
             "flow_values");
  ASSERT_EQ(o.status, 0) << o.err;
  const auto lime = nlohmann::json::parse(ReadFile(out / "lime.json"));
  EXPECT_EQ(lime["instance"]["Age"], 37.0);
  o = RunCli("explain --values 1,2" + common, "flow_short");
  EXPECT_EQ(o.status, 1);
  EXPECT_THAT(o.err, HasSubstr("E_VALIDATION"));
  o = RunCli("effects --feature BMI --pair BMI:Age --grid uniform" + common,
             "flow_effects");
  ASSERT_EQ(o.status, 0) << o.err;
  EXPECT_TRUE(std::filesystem::exists(out / "ale_BMI.csv"));
  EXPECT_TRUE(std::filesystem::exists(out / "pdp2d_BMI_Age.csv"));
}

TEST(Cli, FlagsOverrideConfigFile) {
  const auto a = testing::ScratchDir("cli_override_a");
  const auto b = testing::ScratchDir("cli_override_b");
  ASSERT_EQ(RunCli("train" + Data() + kSmall + " --out " + a.string(), "ov_a").status, 0);
  ASSERT_EQ(RunCli("train" + Data() + kSmall + " --seed 43 --out " + b.string(), "ov_b").status, 0);
  const auto ja = nlohmann::json::parse(ReadFile(a / "report.json"));
  const auto jb = nlohmann::json::parse(ReadFile(b / "report.json"));
  EXPECT_NE(ja["config_hash"], jb["config_hash"]);
}

TEST(Cli, ReportDeterministicAcrossThreads) {
  const auto a = testing::ScratchDir("cli_det_a");
  const auto b = testing::ScratchDir("cli_det_b");
  ASSERT_EQ(RunCli("report" + Data() + kSmall + " --threads 1 --out " + a.string(),
                   "det_a").status, 0);
  ASSERT_EQ(RunCli("report" + Data() + kSmall + " --threads 3 --out " + b.string(),
                   "det_b").status, 0);
  EXPECT_EQ(testing::DirectoryContents(a), testing::DirectoryContents(b));
}

}  // namespace
}  // namespace tabxai
