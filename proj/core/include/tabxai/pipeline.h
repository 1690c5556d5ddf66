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

#ifndef TABXAI_PIPELINE_H_
#define TABXAI_PIPELINE_H_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "tabxai/dataset.h"
#include "tabxai/effects.h"
#include "tabxai/forest.h"
#include "tabxai/lime.h"
#include "tabxai/shap.h"

namespace tabxai {

// Everything a run depends on. One master seed fans out to every stage via
// DeriveSeed(seed, "<stage>").
struct RunConfig {
  std::filesystem::path data_path = "data/diabetes.csv";
  std::string label = "Outcome";
  uint64_t seed = 42;
  std::filesystem::path out_dir = "out";
  unsigned threads = 0;  // 0: hardware concurrency; never affects output

  double test_fraction = 0.30;
  bool stratified = true;

  int n_trees = 100;
  std::optional<int> max_depth;
  int min_samples_leaf = 1;
  std::optional<int> max_features;
  bool bootstrap = true;

  std::size_t shap_background = 100;
  std::size_t shap_coalitions = 2048;

  std::size_t lime_samples = 5000;
  std::size_t lime_top_k = 8;
  double lime_kernel_width = 0.0;
  double lime_lambda = 1.0;

  std::size_t effects_background = 200;
  std::size_t grid_resolution = 20;
  GridStrategy grid_strategy = GridStrategy::kQuantile;
  std::size_t ale_bins = 10;
  std::vector<std::string> effect_features = {"Glucose", "Age"};
  std::vector<std::pair<std::string, std::string>> effect_pairs = {
      {"Glucose", "Age"}};

  // Instance profile used by `report` to pick the test row to explain
  // locally (nearest in training-standardized distance).
  std::vector<double> reference_profile = {4, 154, 72, 29, 126, 31.3, 0.338,
                                           37};

  bool timestamps = false;
};

// Applies "key = value" lines ('#' comments, optional double quotes) on top
// of `config`. Unknown keys and malformed values throw kValidation.
void ApplyConfigText(std::string_view text, RunConfig& config);
void ApplyConfigFile(const std::filesystem::path& path, RunConfig& config);
// Sets a single key, with the same syntax as the file format.
void ApplyConfigValue(std::string_view key, std::string_view value,
                      RunConfig& config);

ForestParams MakeForestParams(const RunConfig& config);

// Canonical, output-affecting view of the config plus a digest of the data
// file contents. Excludes the output directory and thread count.
std::string CanonicalConfig(const RunConfig& config,
                            std::string_view data_digest);
std::string ConfigHash(const RunConfig& config, std::string_view data_digest);

struct PreparedData {
  TabularDataset full;
  SplitResult split;
  std::string data_digest;
};

PreparedData PrepareData(const RunConfig& config);

struct TrainResult {
  ForestModel model;
  ClassificationReport report;
  std::string config_hash;
};

// Writes model.json, report.json and report.txt under config.out_dir.
TrainResult RunTrain(const RunConfig& config);

struct InstanceSelector {
  enum class Kind { kTestRow, kValues, kNearestProfile };
  Kind kind = Kind::kTestRow;
  std::size_t row = 0;
  std::vector<double> values;

  static InstanceSelector TestRow(std::size_t row) {
    return {Kind::kTestRow, row, {}};
  }
  static InstanceSelector Values(std::vector<double> values) {
    return {Kind::kValues, 0, std::move(values)};
  }
  static InstanceSelector NearestProfile() {
    return {Kind::kNearestProfile, 0, {}};
  }
};

struct ExplainResult {
  std::vector<double> instance;
  std::optional<std::size_t> test_row;
  ShapleyExplanation exact;
  ShapleyExplanation sampled;
  LimeExplanation lime;
  std::vector<FeatureImportance> importance;  // empty unless global
  std::vector<ShapleyExplanation> test_explanations;
  std::vector<std::filesystem::path> files;
};

// Writes shap_exact.json, shap_sampled.json and lime.json; with
// `global_outputs` also importance.csv, importance_class0.csv, summary.csv
// and dependence_<feature>.csv over the whole test split.
ExplainResult RunExplain(const RunConfig& config,
                         const std::filesystem::path& model_path,
                         const InstanceSelector& selector, bool global_outputs);

// Writes pdp_<f>.csv, ice_<f>.csv, ale_<f>.csv per feature and
// pdp2d_<f>_<g>.csv per pair. Returns the written paths.
std::vector<std::filesystem::path> RunEffects(
    const RunConfig& config, const std::filesystem::path& model_path,
    const std::vector<std::string>& features,
    const std::vector<std::pair<std::string, std::string>>& pairs);

// train + explain (global, nearest reference profile) + effects, then
// run_report.json with the config, per-file digests and headline checks.
std::filesystem::path RunReport(const RunConfig& config);

// Row of `test` nearest to `profile` in distance standardized by `stats`.
std::size_t NearestRow(const TabularDataset& test, const FeatureStats& stats,
                       std::span<const double> profile);

}  // namespace tabxai

#endif  // TABXAI_PIPELINE_H_
