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

#ifndef TABXAI_SHAP_H_
#define TABXAI_SHAP_H_

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "tabxai/classifier.h"
#include "tabxai/dataset.h"
#include "tabxai/forest.h"

namespace tabxai {

// Exact enumeration evaluates 2^M coalitions.
inline constexpr std::size_t kMaxExactFeatures = 20;

// One instance explained against a background (reference) sample. Both are
// borrowed and must outlive the request.
struct AttributionRequest {
  std::span<const double> instance;
  const TabularDataset& background;
  int class_index = 1;
};

enum class ShapMethod { kExact, kSampled };

std::string_view ShapMethodName(ShapMethod method);

struct ShapleyExplanation {
  ShapMethod method = ShapMethod::kExact;
  int class_index = 1;
  double base_value = 0.0;  // v(empty set)
  double prediction = 0.0;  // f(instance)[class_index]
  std::vector<double> attributions;
  std::vector<double> instance;

  // base_value + sum(attributions) - prediction.
  double EfficiencyResidual() const;
};

// v(S): mean over background rows b of f(x_S, b_rest)[class_index].
double CoalitionValue(const ProbabilisticClassifier& model,
                      const AttributionRequest& request,
                      std::span<const std::size_t> coalition);

// v(S) for every coalition S, indexed by bitmask (bit i set <=> feature i
// present). The generic overload composes rows and calls the model; the
// forest overload walks each (tree, background row) pair once and routes
// all coalitions through it simultaneously. Both sum in the same order.
std::vector<double> AllCoalitionValues(const ProbabilisticClassifier& model,
                                       const AttributionRequest& request);
std::vector<double> AllCoalitionValues(const ForestModel& model,
                                       const AttributionRequest& request);

// Shapley kernel mu(s) = s! (M - s - 1)! / M! used in the exact sum.
double ShapleyCoalitionWeight(std::size_t num_features, std::size_t size);

// Kernel-SHAP regression weight (M - 1) / (C(M, s) s (M - s)), 0 < s < M.
double ShapleyKernelWeight(std::size_t num_features, std::size_t size);

// Shapley values from a complete table of 2^M coalition values.
std::vector<double> ShapleyFromCoalitionValues(std::span<const double> values,
                                               std::size_t num_features);

ShapleyExplanation ExactShapley(const ProbabilisticClassifier& model,
                                const AttributionRequest& request);
ShapleyExplanation ExactShapley(const ForestModel& model,
                                const AttributionRequest& request);

// Kernel-weighted least squares over sampled coalitions, constrained to
// pass through v(empty) and v(full). With n_coalitions >= 2^M every proper
// coalition is enumerated and the result equals ExactShapley. Otherwise
// coalitions are drawn with probability proportional to their kernel
// weight and duplicates are merged with weight = draw count. Throws
// kNumeric if the sampled design is rank deficient.
ShapleyExplanation SampledShapley(const ProbabilisticClassifier& model,
                                  const AttributionRequest& request,
                                  std::size_t n_coalitions, uint64_t seed);

struct FeatureImportance {
  std::string feature;
  double importance = 0.0;
};

// Mean |phi| per feature, descending; ties keep feature order.
std::vector<FeatureImportance> GlobalImportance(
    std::span<const ShapleyExplanation> explanations,
    const std::vector<std::string>& feature_names);

struct SummaryPoint {
  std::string feature;
  double shap = 0.0;
  double value = 0.0;
  double percentile = 0.0;  // empirical CDF of the background at value
};

// One point per (explanation, feature), explanation-major.
std::vector<SummaryPoint> SummaryPoints(
    std::span<const ShapleyExplanation> explanations,
    const TabularDataset& background);

struct DependenceSeries {
  std::string feature;
  std::vector<std::pair<double, double>> points;  // (value, shap), by value
};

DependenceSeries MakeDependenceSeries(
    std::span<const ShapleyExplanation> explanations,
    const std::vector<std::string>& feature_names, std::string_view feature);

// {attributions, base_value, class_index, config_hash?, efficiency_residual,
//  instance, method, prediction}
std::string ExplanationToJson(const ShapleyExplanation& explanation,
                              const std::vector<std::string>& feature_names,
                              std::string_view config_hash = {});

std::string ImportanceToCsv(std::span<const FeatureImportance> importance,
                            std::string_view config_hash = {});
std::string SummaryToCsv(std::span<const SummaryPoint> points,
                         std::string_view config_hash = {});
std::string DependenceToCsv(const DependenceSeries& series,
                            std::string_view config_hash = {});

}  // namespace tabxai

#endif  // TABXAI_SHAP_H_
