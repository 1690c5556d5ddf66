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

#include "tabxai/shap.h"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdlib>
#include <map>
#include <numeric>
#include <string>
#include <unordered_map>

#include <Eigen/Dense>

#include "json.hpp"
#include "tabxai/error.h"
#include "tabxai/io.h"
#include "tabxai/random.h"

namespace tabxai {
namespace {

using Json = nlohmann::json;
using Mask = uint64_t;

void ValidateRequest(std::size_t num_features,
                     const AttributionRequest& request) {
  if (request.background.empty()) {
    Fail(ErrorCode::kValidation, "background set is empty");
  }
  if (request.instance.size() != num_features ||
      request.background.num_features() != num_features) {
    Fail(ErrorCode::kValidation,
         "instance/background dimensionality does not match the model (" +
             std::to_string(num_features) + " features)");
  }
  if (request.class_index != 0 && request.class_index != 1) {
    Fail(ErrorCode::kValidation, "class_index must be 0 or 1");
  }
}

// Mean over background rows of f(x on the mask, background elsewhere).
double MaskValue(const ProbabilisticClassifier& model,
                 const AttributionRequest& request, Mask mask,
                 std::vector<double>& hybrid) {
  const auto& background = request.background;
  const std::size_t m = background.num_features();
  double total = 0.0;
  for (std::size_t r = 0; r < background.num_rows(); ++r) {
    const auto row = background.row(r);
    for (std::size_t f = 0; f < m; ++f) {
      hybrid[f] = (mask >> f) & 1u ? request.instance[f] : row[f];
    }
    total += model.PredictProba(hybrid)[request.class_index];
  }
  return total / static_cast<double>(background.num_rows());
}

double Binomial(std::size_t n, std::size_t k) {
  double result = 1.0;
  for (std::size_t i = 1; i <= k; ++i) {
    result = result * static_cast<double>(n - k + i) / static_cast<double>(i);
  }
  return result;
}

// Routes every coalition through one tree for one background row. A
// coalition's path is fixed by its membership of the features at nodes
// where instance and background row disagree; `in`/`out` record those
// choices and the leaf credits every coalition consistent with them.
class CoalitionRouter {
 public:
  CoalitionRouter(const DecisionTree& tree, std::span<const double> instance,
                  std::span<const double> background_row, Mask full,
                  int class_index, std::vector<double>& sums)
      : nodes_(tree.nodes()),
        instance_(instance),
        background_(background_row),
        full_(full),
        class_index_(class_index),
        sums_(sums) {}

  void Walk(int32_t index, Mask in, Mask out) {
    const auto& node = nodes_[index];
    if (node.is_leaf()) {
      const double value = node.proba[class_index_];
      const Mask free = full_ & ~(in | out);
      // All submasks of `free`, including the empty one.
      Mask sub = free;
      while (true) {
        sums_[in | sub] += value;
        if (sub == 0) break;
        sub = (sub - 1) & free;
      }
      return;
    }
    const int f = node.feature;
    const int32_t x_child =
        instance_[f] <= node.threshold ? node.left : node.right;
    const int32_t b_child =
        background_[f] <= node.threshold ? node.left : node.right;
    if (x_child == b_child) {
      Walk(x_child, in, out);
      return;
    }
    const Mask bit = Mask{1} << f;
    if (in & bit) {
      Walk(x_child, in, out);
    } else if (out & bit) {
      Walk(b_child, in, out);
    } else {
      Walk(x_child, in | bit, out);
      Walk(b_child, in, out | bit);
    }
  }

 private:
  const std::vector<DecisionTree::Node>& nodes_;
  std::span<const double> instance_;
  std::span<const double> background_;
  Mask full_;
  int class_index_;
  std::vector<double>& sums_;
};

void CheckExactSize(std::size_t m) {
  if (m > kMaxExactFeatures) {
    Fail(ErrorCode::kValidation,
         "exact Shapley enumeration is limited to " +
             std::to_string(kMaxExactFeatures) + " features, got " +
             std::to_string(m));
  }
}

ShapleyExplanation FromTable(const ProbabilisticClassifier& model,
                             const AttributionRequest& request,
                             const std::vector<double>& values) {
  const std::size_t m = model.num_features();
  ShapleyExplanation out;
  out.method = ShapMethod::kExact;
  out.class_index = request.class_index;
  out.base_value = values.front();
  out.prediction = model.PredictProba(request.instance)[request.class_index];
  out.attributions = ShapleyFromCoalitionValues(values, m);
  out.instance.assign(request.instance.begin(), request.instance.end());
  return out;
}

Json NamedValues(const std::vector<std::string>& names,
                 std::span<const double> values) {
  Json out = Json::object();
  for (std::size_t i = 0; i < names.size(); ++i) out[names[i]] = values[i];
  return out;
}

}  // namespace

std::string_view ShapMethodName(ShapMethod method) {
  return method == ShapMethod::kExact ? "exact" : "sampled";
}

double ShapleyExplanation::EfficiencyResidual() const {
  double total = base_value;
  for (const double phi : attributions) total += phi;
  return total - prediction;
}

double CoalitionValue(const ProbabilisticClassifier& model,
                      const AttributionRequest& request,
                      std::span<const std::size_t> coalition) {
  const std::size_t m = model.num_features();
  ValidateRequest(m, request);
  if (m > 64) Fail(ErrorCode::kValidation, "at most 64 features supported");
  Mask mask = 0;
  for (const std::size_t f : coalition) {
    if (f >= m) {
      Fail(ErrorCode::kValidation,
           "coalition index " + std::to_string(f) + " out of range");
    }
    mask |= Mask{1} << f;
  }
  std::vector<double> hybrid(m);
  return MaskValue(model, request, mask, hybrid);
}

std::vector<double> AllCoalitionValues(const ProbabilisticClassifier& model,
                                       const AttributionRequest& request) {
  const std::size_t m = model.num_features();
  ValidateRequest(m, request);
  CheckExactSize(m);
  std::vector<double> values(std::size_t{1} << m);
  std::vector<double> hybrid(m);
  for (Mask mask = 0; mask < values.size(); ++mask) {
    values[mask] = MaskValue(model, request, mask, hybrid);
  }
  return values;
}

std::vector<double> AllCoalitionValues(const ForestModel& model,
                                       const AttributionRequest& request) {
  const std::size_t m = model.num_features();
  ValidateRequest(m, request);
  CheckExactSize(m);
  const std::size_t count = std::size_t{1} << m;
  const Mask full = count - 1;
  const auto n_trees = static_cast<double>(model.trees().size());
  std::vector<double> totals(count, 0.0);
  std::vector<double> sums(count);
  for (std::size_t r = 0; r < request.background.num_rows(); ++r) {
    std::fill(sums.begin(), sums.end(), 0.0);
    for (const auto& tree : model.trees()) {
      CoalitionRouter router(tree, request.instance, request.background.row(r),
                             full, request.class_index, sums);
      router.Walk(0, 0, 0);
    }
    for (std::size_t s = 0; s < count; ++s) totals[s] += sums[s] / n_trees;
  }
  const auto rows = static_cast<double>(request.background.num_rows());
  for (double& v : totals) v /= rows;
  return totals;
}

double ShapleyCoalitionWeight(std::size_t num_features, std::size_t size) {
  return 1.0 / (static_cast<double>(num_features) *
                Binomial(num_features - 1, size));
}

double ShapleyKernelWeight(std::size_t num_features, std::size_t size) {
  const auto m = static_cast<double>(num_features);
  const auto s = static_cast<double>(size);
  return (m - 1.0) / (Binomial(num_features, size) * s * (m - s));
}

std::vector<double> ShapleyFromCoalitionValues(std::span<const double> values,
                                               std::size_t num_features) {
  if (values.size() != (std::size_t{1} << num_features)) {
    Fail(ErrorCode::kValidation, "coalition table has the wrong size");
  }
  std::vector<double> weights(num_features);
  for (std::size_t s = 0; s < num_features; ++s) {
    weights[s] = ShapleyCoalitionWeight(num_features, s);
  }
  std::vector<double> phi(num_features, 0.0);
  for (std::size_t i = 0; i < num_features; ++i) {
    const Mask bit = Mask{1} << i;
    for (Mask s = 0; s < values.size(); ++s) {
      if (s & bit) continue;
      phi[i] += weights[std::popcount(s)] * (values[s | bit] - values[s]);
    }
  }
  return phi;
}

ShapleyExplanation ExactShapley(const ProbabilisticClassifier& model,
                                const AttributionRequest& request) {
  return FromTable(model, request, AllCoalitionValues(model, request));
}

ShapleyExplanation ExactShapley(const ForestModel& model,
                                const AttributionRequest& request) {
  return FromTable(model, request, AllCoalitionValues(model, request));
}

ShapleyExplanation SampledShapley(const ProbabilisticClassifier& model,
                                  const AttributionRequest& request,
                                  std::size_t n_coalitions, uint64_t seed) {
  const std::size_t m = model.num_features();
  ValidateRequest(m, request);
  if (m > 62) Fail(ErrorCode::kValidation, "at most 62 features supported");
  if (n_coalitions < m + 2) {
    Fail(ErrorCode::kValidation,
         "n_coalitions must be >= M + 2 = " + std::to_string(m + 2));
  }

  std::vector<double> hybrid(m);
  std::unordered_map<Mask, double> memo;
  const auto value = [&](Mask mask) {
    auto [it, inserted] = memo.try_emplace(mask, 0.0);
    if (inserted) it->second = MaskValue(model, request, mask, hybrid);
    return it->second;
  };

  const Mask full = (Mask{1} << m) - 1;
  ShapleyExplanation out;
  out.method = ShapMethod::kSampled;
  out.class_index = request.class_index;
  out.base_value = value(0);
  out.prediction = model.PredictProba(request.instance)[request.class_index];
  out.instance.assign(request.instance.begin(), request.instance.end());
  const double total_effect = value(full) - out.base_value;
  if (m == 1) {
    out.attributions = {total_effect};
    return out;
  }

  // Coalition -> regression weight.
  std::map<Mask, double> design;
  if (n_coalitions >= (std::size_t{1} << m)) {
    for (Mask s = 1; s < full; ++s) {
      design[s] = ShapleyKernelWeight(m, std::popcount(s));
    }
  } else {
    // Size s is drawn with probability proportional to its total kernel
    // mass C(M, s) * kernel(s) = (M - 1) / (s (M - s)); the subset is then
    // uniform, so every draw carries the same weight.
    std::vector<double> size_cdf(m - 1);
    double mass = 0.0;
    for (std::size_t s = 1; s < m; ++s) {
      mass += 1.0 / static_cast<double>(s * (m - s));
      size_cdf[s - 1] = mass;
    }
    Rng rng(seed);
    std::vector<std::size_t> order(m);
    for (std::size_t draw = 0; draw + 2 < n_coalitions; ++draw) {
      const double u = rng.Uniform01() * mass;
      const auto size = static_cast<std::size_t>(
          std::upper_bound(size_cdf.begin(), size_cdf.end(), u) -
          size_cdf.begin() + 1);
      std::iota(order.begin(), order.end(), std::size_t{0});
      Mask mask = 0;
      for (std::size_t k = 0; k < std::min(size, m - 1); ++k) {
        std::swap(order[k], order[k + rng.UniformIndex(m - k)]);
        mask |= Mask{1} << order[k];
      }
      design[mask] += 1.0;
    }
  }

  // Eliminate the last attribution through sum(phi) = total_effect.
  const std::size_t unknowns = m - 1;
  const auto rows = static_cast<Eigen::Index>(design.size());
  Eigen::MatrixXd x(rows, static_cast<Eigen::Index>(unknowns));
  Eigen::VectorXd y(rows);
  Eigen::Index r = 0;
  for (const auto& [mask, weight] : design) {
    const double root = std::sqrt(weight);
    const double last = static_cast<double>((mask >> (m - 1)) & 1u);
    for (std::size_t i = 0; i < unknowns; ++i) {
      x(r, static_cast<Eigen::Index>(i)) =
          root * (static_cast<double>((mask >> i) & 1u) - last);
    }
    y(r) = root * (value(mask) - out.base_value - last * total_effect);
    ++r;
  }
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(x);
  if (static_cast<std::size_t>(qr.rank()) < unknowns) {
    Fail(ErrorCode::kNumeric,
         "degenerate coalition sample (rank " + std::to_string(qr.rank()) +
             " < " + std::to_string(unknowns) + "); raise n_coalitions");
  }
  const Eigen::VectorXd solution = qr.solve(y);
  out.attributions.resize(m);
  double assigned = 0.0;
  for (std::size_t i = 0; i < unknowns; ++i) {
    out.attributions[i] = solution(static_cast<Eigen::Index>(i));
    assigned += out.attributions[i];
  }
  out.attributions[m - 1] = total_effect - assigned;
  return out;
}

std::vector<FeatureImportance> GlobalImportance(
    std::span<const ShapleyExplanation> explanations,
    const std::vector<std::string>& feature_names) {
  if (explanations.empty()) {
    Fail(ErrorCode::kValidation, "no explanations to aggregate");
  }
  const std::size_t m = feature_names.size();
  std::vector<double> sums(m, 0.0);
  for (const auto& e : explanations) {
    if (e.attributions.size() != m) {
      Fail(ErrorCode::kValidation, "explanations differ in feature count");
    }
    for (std::size_t f = 0; f < m; ++f) sums[f] += std::abs(e.attributions[f]);
  }
  std::vector<FeatureImportance> out;
  for (std::size_t f = 0; f < m; ++f) {
    out.push_back({feature_names[f],
                   sums[f] / static_cast<double>(explanations.size())});
  }
  std::stable_sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
    return a.importance > b.importance;
  });
  return out;
}

std::vector<SummaryPoint> SummaryPoints(
    std::span<const ShapleyExplanation> explanations,
    const TabularDataset& background) {
  if (background.empty()) Fail(ErrorCode::kValidation, "empty background");
  const std::size_t m = background.num_features();
  std::vector<std::vector<double>> sorted(m);
  for (std::size_t f = 0; f < m; ++f) {
    sorted[f] = background.column(f);
    std::sort(sorted[f].begin(), sorted[f].end());
  }
  const auto n = static_cast<double>(background.num_rows());
  std::vector<SummaryPoint> points;
  points.reserve(explanations.size() * m);
  for (const auto& e : explanations) {
    if (e.attributions.size() != m || e.instance.size() != m) {
      Fail(ErrorCode::kValidation, "explanation/background feature mismatch");
    }
    for (std::size_t f = 0; f < m; ++f) {
      const double v = e.instance[f];
      const auto below = std::upper_bound(sorted[f].begin(), sorted[f].end(), v) -
                         sorted[f].begin();
      points.push_back({background.feature_names()[f], e.attributions[f], v,
                        static_cast<double>(below) / n});
    }
  }
  return points;
}

DependenceSeries MakeDependenceSeries(
    std::span<const ShapleyExplanation> explanations,
    const std::vector<std::string>& feature_names, std::string_view feature) {
  const auto it = std::find(feature_names.begin(), feature_names.end(), feature);
  if (it == feature_names.end()) {
    Fail(ErrorCode::kValidation,
         "unknown feature \"" + std::string(feature) + "\"");
  }
  const auto f = static_cast<std::size_t>(it - feature_names.begin());
  DependenceSeries series;
  series.feature = std::string(feature);
  for (const auto& e : explanations) {
    series.points.emplace_back(e.instance.at(f), e.attributions.at(f));
  }
  std::stable_sort(
      series.points.begin(), series.points.end(),
      [](const auto& a, const auto& b) { return a.first < b.first; });
  return series;
}

std::string ExplanationToJson(const ShapleyExplanation& explanation,
                              const std::vector<std::string>& feature_names,
                              std::string_view config_hash) {
  Json doc{{"method", ShapMethodName(explanation.method)},
           {"class_index", explanation.class_index},
           {"base_value", explanation.base_value},
           {"prediction", explanation.prediction},
           {"efficiency_residual", explanation.EfficiencyResidual()},
           {"instance", NamedValues(feature_names, explanation.instance)},
           {"attributions",
            NamedValues(feature_names, explanation.attributions)}};
  if (!config_hash.empty()) doc["config_hash"] = std::string(config_hash);
  return doc.dump(2) + "\n";
}

std::string ImportanceToCsv(std::span<const FeatureImportance> importance,
                            std::string_view config_hash) {
  std::string out = CsvPreamble(config_hash) + "feature,importance\n";
  for (const auto& item : importance) {
    out += item.feature + "," + FormatDouble(item.importance) + "\n";
  }
  return out;
}

std::string SummaryToCsv(std::span<const SummaryPoint> points,
                         std::string_view config_hash) {
  std::string out = CsvPreamble(config_hash) + "feature,shap,value,percentile\n";
  for (const auto& p : points) {
    out += p.feature + "," + FormatDouble(p.shap) + "," +
           FormatDouble(p.value) + "," + FormatDouble(p.percentile) + "\n";
  }
  return out;
}

std::string DependenceToCsv(const DependenceSeries& series,
                            std::string_view config_hash) {
  std::string out = CsvPreamble(config_hash) + "value,shap\n";
  for (const auto& [value, shap] : series.points) {
    out += FormatDouble(value) + "," + FormatDouble(shap) + "\n";
  }
  return out;
}

}  // namespace tabxai
