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

#ifndef TABXAI_LIME_H_
#define TABXAI_LIME_H_

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "tabxai/classifier.h"
#include "tabxai/dataset.h"

namespace tabxai {

// Quartile discretization. Feature f has the distinct values of
// (q1, median, q3) as edges; bin k holds edges[k-1] < v <= edges[k], with
// the first bin open below and the last open above. A constant feature has
// no edges and a single bin, rendered as "NAME <= <constant>".
class Discretizer {
 public:
  // `constants[f]` is only used when `edges[f]` is empty.
  Discretizer(std::vector<std::string> feature_names,
              std::vector<std::vector<double>> edges,
              std::vector<double> constants);

  std::size_t num_features() const { return edges_.size(); }
  std::size_t num_bins(std::size_t feature) const {
    return edges_[feature].size() + 1;
  }
  const std::vector<double>& edges(std::size_t feature) const {
    return edges_[feature];
  }

  std::size_t Bin(std::size_t feature, double value) const;

  // "NAME <= v", "v < NAME <= w" or "NAME > v", thresholds to 2 decimals.
  std::string Rule(std::size_t feature, std::size_t bin) const;

 private:
  std::vector<std::string> feature_names_;
  std::vector<std::vector<double>> edges_;
  std::vector<double> constants_;
};

Discretizer BuildDiscretizer(const FeatureStats& stats);

struct PerturbationSample {
  std::vector<uint8_t> bits;  // 1: same bin as the explained instance
  std::vector<double> values;
  double weight = 0.0;
};

// exp(-d^2 / width^2) for Hamming distance d to the all-ones vector.
// width <= 0 selects 0.75 * sqrt(M).
double KernelWeight(std::span<const uint8_t> bits, double width = 0.0);

// Sample 0 is the instance itself. Every other sample picks, per feature, a
// bin uniformly among the bins holding training values, then one of the
// training values in that bin uniformly.
std::vector<PerturbationSample> SamplePerturbations(
    std::span<const double> instance, const TabularDataset& training,
    const Discretizer& discretizer, std::size_t n, uint64_t seed,
    double kernel_width = 0.0);

struct RidgeFit {
  double intercept = 0.0;
  std::vector<double> coefficients;
  double r2 = 0.0;  // weighted; 1 when the target has zero weighted variance
};

// Weighted ridge regression with an unpenalized intercept. `design` is
// row-major with `num_columns` columns.
RidgeFit WeightedRidge(std::span<const double> design, std::size_t num_columns,
                       std::span<const double> target,
                       std::span<const double> weights, double lambda);

struct LimeParams {
  std::size_t n_samples = 5000;
  std::size_t top_k = 8;
  double kernel_width = 0.0;  // <= 0: 0.75 * sqrt(M)
  double ridge_lambda = 1.0;
  uint64_t seed = 42;
  int class_index = 1;
};

struct LimeRule {
  std::size_t feature = 0;
  std::string rule;
  double weight = 0.0;
};

struct LimeExplanation {
  int class_index = 1;
  double probability = 0.0;  // black-box output for the instance
  double intercept = 0.0;
  double r2 = 0.0;
  std::size_t n_samples = 0;
  uint64_t seed = 0;
  std::vector<double> instance;
  std::vector<LimeRule> rules;  // by |weight| descending, at most top_k
};

LimeExplanation ExplainInstance(const ProbabilisticClassifier& model,
                                std::span<const double> instance,
                                const TabularDataset& training,
                                const Discretizer& discretizer,
                                const LimeParams& params);

// {class_index, config_hash?, instance, intercept, n_samples, probability,
//  r2, rules: [{rule, weight}], seed}
std::string LimeToJson(const LimeExplanation& explanation,
                       const std::vector<std::string>& feature_names,
                       std::string_view config_hash = {});

}  // namespace tabxai

#endif  // TABXAI_LIME_H_
