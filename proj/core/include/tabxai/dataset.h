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

#ifndef TABXAI_DATASET_H_
#define TABXAI_DATASET_H_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace tabxai {

using Label = int;

// Dense row-major feature matrix with binary labels.
//
// Invariants (enforced by the constructor): feature names are unique and
// non-empty, every value is finite, every label is 0 or 1 and there is one
// label per row.
class TabularDataset {
 public:
  TabularDataset() = default;
  TabularDataset(std::vector<std::string> feature_names,
                 std::vector<double> values, std::vector<Label> labels);

  std::size_t num_rows() const { return labels_.size(); }
  std::size_t num_features() const { return feature_names_.size(); }
  bool empty() const { return labels_.empty(); }

  const std::vector<std::string>& feature_names() const {
    return feature_names_;
  }
  const std::vector<Label>& labels() const { return labels_; }
  const std::vector<double>& values() const { return values_; }

  std::span<const double> row(std::size_t i) const {
    return {values_.data() + i * num_features(), num_features()};
  }
  double at(std::size_t row, std::size_t feature) const {
    return values_[row * num_features() + feature];
  }
  Label label(std::size_t i) const { return labels_[i]; }

  std::vector<double> column(std::size_t feature) const;

  // Index of a feature by name; throws kValidation when unknown.
  std::size_t feature_index(std::string_view name) const;

  // Rows at the given indices, in the given order.
  TabularDataset Subset(std::span<const std::size_t> indices) const;

 private:
  std::vector<std::string> feature_names_;
  std::vector<double> values_;
  std::vector<Label> labels_;
};

struct FeatureSummary {
  double mean = 0.0;
  double std = 0.0;  // population standard deviation
  double min = 0.0;
  double q1 = 0.0;
  double median = 0.0;
  double q3 = 0.0;
  double max = 0.0;
};

struct FeatureStats {
  std::vector<std::string> feature_names;
  std::vector<FeatureSummary> features;

  const FeatureSummary& operator[](std::size_t i) const { return features[i]; }
  std::size_t size() const { return features.size(); }
};

struct SplitSpec {
  double test_fraction = 0.30;
  uint64_t seed = 42;
  bool stratified = true;
};

struct SplitResult {
  TabularDataset train;
  TabularDataset test;
  // Original row index of every train/test row, ascending.
  std::vector<std::size_t> train_indices;
  std::vector<std::size_t> test_indices;
};

// Parses a comma-separated file with a header row. The label column is
// removed from the features and must hold 0 or 1. Errors carry the 1-based
// file line and the column name.
TabularDataset LoadCsv(const std::filesystem::path& path,
                       std::string_view label_column);
TabularDataset ParseCsv(std::string_view text, std::string_view label_column,
                        std::string_view source = "<memory>");

// Linear interpolation between closest ranks: q(p) = x[h] + (h - floor(h)) *
// (x[floor(h)+1] - x[floor(h)]) with h = (n - 1) * p over sorted x.
double Quantile(std::span<const double> sorted, double p);

FeatureStats ComputeStats(const TabularDataset& data);

// Test size is round(N * test_fraction). Stratified splits allocate each
// class its proportional share (largest remainder), then shuffle within
// class. Both partitions keep the original row order.
SplitResult Split(const TabularDataset& data, const SplitSpec& spec);

// JSON object keyed by feature name, each with mean/std/min/q1/median/q3/max.
std::string StatsToJson(const FeatureStats& stats);

}  // namespace tabxai

#endif  // TABXAI_DATASET_H_
