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

#include "tabxai/pipeline.h"

#include "gmock/gmock.h"
#include "gtest/gtest.h"
#include "json.hpp"
#include "tabxai/io.h"
#include "test_util.h"

namespace tabxai {
namespace {

using ::testing::HasSubstr;
using testing::CodeOf;

// Small enough to run the whole pipeline in about a second.
RunConfig SmallConfig(const std::filesystem::path& out) {
  RunConfig c;
  c.data_path = testing::PimaPath();
  c.out_dir = out;
  c.n_trees = 12;
  c.shap_background = 20;
  c.shap_coalitions = 100;
  c.lime_samples = 400;
  c.effects_background = 40;
  c.grid_resolution = 6;
  c.ale_bins = 5;
  return c;
}

TEST(Config, ParsesFlatKeyValueText) {
  RunConfig c;
  ApplyConfigText(R"(# comment
seed = 7
label = "Outcome"

n_trees=30
max_depth = 5
max_features = auto
lime.samples = 1000   # trailing comment
effects.features = Glucose, BMI
effects.pairs = Glucose:BMI, Age:Insulin
effects.grid = uniform
explain.reference = 1,2,3
)",
                  c);
  EXPECT_EQ(c.seed, 7u);
  EXPECT_EQ(c.label, "Outcome");
  EXPECT_EQ(c.n_trees, 30);
  EXPECT_EQ(c.max_depth, 5);
  EXPECT_FALSE(c.max_features.has_value());
  EXPECT_EQ(c.lime_samples, 1000u);
  EXPECT_EQ(c.effect_features, (std::vector<std::string>{"Glucose", "BMI"}));
  ASSERT_EQ(c.effect_pairs.size(), 2u);
  EXPECT_EQ(c.effect_pairs[1].second, "Insulin");
  EXPECT_EQ(c.grid_strategy, GridStrategy::kUniform);
  EXPECT_EQ(c.reference_profile, (std::vector<double>{1, 2, 3}));
  ApplyConfigValue("max_depth", "none", c);
  EXPECT_FALSE(c.max_depth.has_value());
}

TEST(Config, RejectsUnknownKeysAndBadValues) {
  RunConfig c;
  EXPECT_EQ(CodeOf([&] { ApplyConfigText("colour = red\n", c); }),
            ErrorCode::kValidation);
  EXPECT_EQ(CodeOf([&] { ApplyConfigText("seed = -1\n", c); }),
            ErrorCode::kValidation);
  EXPECT_EQ(CodeOf([&] { ApplyConfigText("n_trees = 0\n", c); }),
            ErrorCode::kValidation);
  EXPECT_EQ(CodeOf([&] { ApplyConfigText("test_fraction = 1.5\n", c); }),
            ErrorCode::kValidation);
  EXPECT_EQ(CodeOf([&] { ApplyConfigText("bootstrap = maybe\n", c); }),
            ErrorCode::kValidation);
  EXPECT_EQ(CodeOf([&] { ApplyConfigText("just a line\n", c); }),
            ErrorCode::kValidation);
  EXPECT_EQ(CodeOf([&] { ApplyConfigText("effects.pairs = Glucose\n", c); }),
            ErrorCode::kValidation);
  EXPECT_EQ(CodeOf([&] { ApplyConfigFile("/nonexistent.conf", c); }),
            ErrorCode::kIo);
}

TEST(Config, HashIgnoresOutputDirAndThreads) {
  RunConfig a, b;
  b.out_dir = "elsewhere";
  b.threads = 7;
  EXPECT_EQ(ConfigHash(a, "d"), ConfigHash(b, "d"));
  EXPECT_EQ(CanonicalConfig(a, "d"), CanonicalConfig(b, "d"));
  EXPECT_NE(ConfigHash(a, "d"), ConfigHash(a, "e"));
  b.seed = 43;
  EXPECT_NE(ConfigHash(a, "d"), ConfigHash(b, "d"));
  EXPECT_EQ(ConfigHash(a, "d").size(), 16u);
}

TEST(Config, StageSeedsAreDistinct) {
  RunConfig c;
  EXPECT_NE(MakeForestParams(c).seed, c.seed);
  EXPECT_NE(DeriveSeed(c.seed, "split"), DeriveSeed(c.seed, "forest"));
}

TEST(PrepareData, MissingFileIsIoError) {
  RunConfig c;
  c.data_path = "/nonexistent/diabetes.csv";
  EXPECT_EQ(CodeOf([&] { PrepareData(c); }), ErrorCode::kIo);
}

TEST(Pipeline, TrainWritesHashedArtifacts) {
  const auto out = testing::ScratchDir("pipeline_train");
  const auto config = SmallConfig(out);
  const auto result = RunTrain(config);
  for (const char* name : {"model.json", "report.json", "report.txt"}) {
    EXPECT_TRUE(std::filesystem::exists(out / name)) << name;
  }
  const auto report = nlohmann::json::parse(ReadFile(out / "report.json"));
  EXPECT_EQ(report["config_hash"], result.config_hash);
  EXPECT_EQ(report["total_support"], 230);
  std::string hash;
  ModelFromJson(ReadFile(out / "model.json"), &hash);
  EXPECT_EQ(hash, result.config_hash);
}

TEST(Pipeline, ExplainRowAndValues) {
  const auto out = testing::ScratchDir("pipeline_explain");
  const auto config = SmallConfig(out);
  RunTrain(config);
  const auto by_row =
      RunExplain(config, out / "model.json", InstanceSelector::TestRow(3), false);
  EXPECT_EQ(by_row.test_row, 3u);
  EXPECT_LT(std::abs(by_row.exact.EfficiencyResidual()), 1e-9);
  EXPECT_TRUE(by_row.importance.empty());
  const auto doc = nlohmann::json::parse(ReadFile(out / "shap_exact.json"));
  EXPECT_EQ(doc["attributions"].size(), 8u);

  const auto by_values = RunExplain(
      config, out / "model.json",
      InstanceSelector::Values(by_row.instance), false);
  EXPECT_EQ(by_values.exact.attributions, by_row.exact.attributions);
  EXPECT_FALSE(by_values.test_row.has_value());

  EXPECT_EQ(CodeOf([&] {
              RunExplain(config, out / "model.json",
                         InstanceSelector::TestRow(5000), false);
            }),
            ErrorCode::kValidation);
  EXPECT_EQ(CodeOf([&] {
              RunExplain(config, out / "model.json",
                         InstanceSelector::Values({1, 2}), false);
            }),
            ErrorCode::kValidation);
  EXPECT_EQ(CodeOf([&] {
              RunExplain(config, out / "missing.json",
                         InstanceSelector::TestRow(0), false);
            }),
            ErrorCode::kIo);
}

TEST(Pipeline, EffectsRejectUnknownFeature) {
  const auto out = testing::ScratchDir("pipeline_effects");
  const auto config = SmallConfig(out);
  RunTrain(config);
  EXPECT_EQ(CodeOf([&] { RunEffects(config, out / "model.json", {"Nope"}, {}); }),
            ErrorCode::kValidation);
  const auto files =
      RunEffects(config, out / "model.json", {"BMI"}, {{"BMI", "Age"}});
  EXPECT_EQ(files.size(), 4u);
  EXPECT_THAT(ReadFile(out / "pdp_BMI.csv"), ::testing::StartsWith("# config_hash="));
}

TEST(Pipeline, ReportIsByteIdenticalAcrossRunsAndThreads) {
  const auto a = testing::ScratchDir("pipeline_det_a");
  const auto b = testing::ScratchDir("pipeline_det_b");
  auto config = SmallConfig(a);
  config.threads = 1;
  RunReport(config);
  config.out_dir = b;
  config.threads = 4;
  RunReport(config);
  const auto fa = testing::DirectoryContents(a);
  const auto fb = testing::DirectoryContents(b);
  EXPECT_GT(fa.size(), 20u);
  EXPECT_EQ(fa, fb);
  const auto report = nlohmann::json::parse(fa.at("run_report.json"));
  EXPECT_LT(report["shap_max_efficiency_residual"].get<double>(), 1e-9);
  EXPECT_FALSE(report["provenance"].contains("created_utc"));
  EXPECT_THAT(fa.at("summary.csv"), HasSubstr("feature,"));
}

// Kernel-weighted R^2 of the default surrogate over the seed-42 test split.
// Measured distribution: p10 0.142, p20 0.210, median 0.377, max 0.707.
// The floor below is pinned to that measurement.
TEST(LimeFidelity, PinnedFloorOnPimaTestSplit) {
  RunConfig config;
  config.data_path = testing::PimaPath();
  const auto data = PrepareData(config);
  const auto model = Fit(data.split.train, MakeForestParams(config));
  const auto disc = BuildDiscretizer(ComputeStats(data.split.train));
  const auto& test = data.split.test;
  std::size_t above = 0;
  for (std::size_t r = 0; r < test.num_rows(); ++r) {
    const auto e = ExplainInstance(model, test.row(r), data.split.train, disc, {});
    if (e.r2 >= 0.20) ++above;
  }
  EXPECT_GE(static_cast<double>(above), 0.8 * static_cast<double>(test.num_rows()));
}

TEST(NearestRow, StandardizedDistance) {
  // Feature 1 has a tiny spread, so it dominates after standardizing.
  const TabularDataset test({"a", "b"}, {0, 0.0, 5, 0.1, 9, 0.0}, {0, 1, 0});
  FeatureStats stats;
  stats.feature_names = {"a", "b"};
  stats.features = {{0, 10, 0, 0, 0, 0, 0}, {0, 0.01, 0, 0, 0, 0, 0}};
  const std::vector<double> profile{5, 0.0};
  EXPECT_EQ(NearestRow(test, stats, profile), 2u);
}

}  // namespace
}  // namespace tabxai
