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

#include "tabxai/forest.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <string>
#include <utility>

#include "json.hpp"
#include "tabxai/error.h"
#include "tabxai/parallel.h"
#include "tabxai/random.h"

namespace tabxai {
namespace {

using Json = nlohmann::json;
__extension__ using Wide = __int128;

// Candidate split quality as the exact rational
// sum_children (a^2 + b^2) / n_child, kept as numerator / denominator so
// that ties compare exactly. Larger is better (lower weighted Gini).
struct SplitScore {
  int64_t numerator = 0;
  int64_t denominator = 1;

  bool operator>(const SplitScore& other) const {
    return static_cast<Wide>(numerator) * other.denominator >
           static_cast<Wide>(other.numerator) * denominator;
  }
  bool operator==(const SplitScore& other) const {
    return static_cast<Wide>(numerator) * other.denominator ==
           static_cast<Wide>(other.numerator) * denominator;
  }
};

struct SplitCandidate {
  bool found = false;
  int feature = -1;
  double threshold = 0.0;
  SplitScore score;
};

class TreeBuilder {
 public:
  TreeBuilder(const TabularDataset& data, const ForestParams& params,
              int max_features, uint64_t seed)
      : data_(data),
        params_(params),
        max_features_(max_features),
        rng_(seed),
        feature_order_(data.num_features()) {
    std::iota(feature_order_.begin(), feature_order_.end(), 0);
  }

  DecisionTree Build() {
    const std::size_t n = data_.num_rows();
    std::vector<std::size_t> samples(n);
    if (params_.bootstrap) {
      for (auto& s : samples) s = rng_.UniformIndex(n);
    } else {
      std::iota(samples.begin(), samples.end(), std::size_t{0});
    }
    Grow(samples, 0);
    return DecisionTree(std::move(nodes_));
  }

 private:
  int32_t Grow(std::span<std::size_t> samples, int depth) {
    const auto index = static_cast<int32_t>(nodes_.size());
    nodes_.emplace_back();

    int64_t ones = 0;
    for (const std::size_t s : samples) ones += data_.label(s);
    const auto n = static_cast<int64_t>(samples.size());
    const int64_t zeros = n - ones;

    const bool pure = ones == 0 || zeros == 0;
    const bool depth_limited =
        params_.max_depth.has_value() && depth >= *params_.max_depth;
    const bool too_small = n < 2 * static_cast<int64_t>(params_.min_samples_leaf);
    SplitCandidate split;
    if (!pure && !depth_limited && !too_small) split = FindSplit(samples);

    if (!split.found) {
      auto& leaf = nodes_[index];
      leaf.proba = {static_cast<double>(zeros) / static_cast<double>(n),
                    static_cast<double>(ones) / static_cast<double>(n)};
      return index;
    }

    const auto middle = std::partition(
        samples.begin(), samples.end(), [&](std::size_t s) {
          return data_.at(s, split.feature) <= split.threshold;
        });
    const auto left_size = static_cast<std::size_t>(middle - samples.begin());
    const int32_t left = Grow(samples.first(left_size), depth + 1);
    const int32_t right = Grow(samples.subspan(left_size), depth + 1);
    auto& node = nodes_[index];
    node.feature = split.feature;
    node.threshold = split.threshold;
    node.left = left;
    node.right = right;
    return index;
  }

  // Visits features in a fresh random order until max_features
  // non-constant ones have been scanned (constant features do not count).
  SplitCandidate FindSplit(std::span<const std::size_t> samples) {
    const std::size_t m = feature_order_.size();
    for (std::size_t i = m; i > 1; --i) {
      std::swap(feature_order_[i - 1], feature_order_[rng_.UniformIndex(i)]);
    }
    SplitCandidate best;
    int scanned = 0;
    for (std::size_t k = 0; k < m && scanned < max_features_; ++k) {
      if (ScanFeature(feature_order_[k], samples, best)) ++scanned;
    }
    return best;
  }

  // Returns false when the feature is constant over the node.
  bool ScanFeature(int feature, std::span<const std::size_t> samples,
                   SplitCandidate& best) {
    column_.clear();
    for (const std::size_t s : samples) {
      column_.emplace_back(data_.at(s, feature), data_.label(s));
    }
    std::sort(column_.begin(), column_.end());
    if (column_.front().first == column_.back().first) return false;

    const auto n = static_cast<int64_t>(column_.size());
    int64_t total_ones = 0;
    for (const auto& entry : column_) total_ones += entry.second;
    const int64_t total_zeros = n - total_ones;
    const auto min_leaf = static_cast<int64_t>(params_.min_samples_leaf);

    int64_t left_ones = 0;
    for (int64_t i = 1; i < n; ++i) {
      left_ones += column_[i - 1].second;
      const double lo = column_[i - 1].first;
      const double hi = column_[i].first;
      if (lo == hi || i < min_leaf || n - i < min_leaf) continue;

      const int64_t left_zeros = i - left_ones;
      const int64_t right_ones = total_ones - left_ones;
      const int64_t right_zeros = total_zeros - left_zeros;
      const int64_t n_left = i;
      const int64_t n_right = n - i;
      SplitScore score{
          (left_ones * left_ones + left_zeros * left_zeros) * n_right +
              (right_ones * right_ones + right_zeros * right_zeros) * n_left,
          n_left * n_right};

      double threshold = lo + (hi - lo) / 2.0;
      if (!(threshold < hi)) threshold = lo;

      bool better = !best.found || score > best.score;
      if (!better && score == best.score) {
        better = feature < best.feature ||
                 (feature == best.feature && threshold < best.threshold);
      }
      if (better) {
        best.found = true;
        best.feature = feature;
        best.threshold = threshold;
        best.score = score;
      }
    }
    return true;
  }

  const TabularDataset& data_;
  const ForestParams& params_;
  const int max_features_;
  Rng rng_;
  std::vector<int> feature_order_;
  std::vector<std::pair<double, Label>> column_;
  std::vector<DecisionTree::Node> nodes_;
};

void ValidateParams(const ForestParams& params, std::size_t num_features) {
  if (params.n_trees < 1) Fail(ErrorCode::kValidation, "n_trees must be >= 1");
  if (params.max_depth && *params.max_depth < 1) {
    Fail(ErrorCode::kValidation, "max_depth must be >= 1");
  }
  if (params.min_samples_leaf < 1) {
    Fail(ErrorCode::kValidation, "min_samples_leaf must be >= 1");
  }
  if (params.max_features_per_split &&
      (*params.max_features_per_split < 1 ||
       static_cast<std::size_t>(*params.max_features_per_split) >
           num_features)) {
    Fail(ErrorCode::kValidation,
         "max_features_per_split must lie in [1, " +
             std::to_string(num_features) + "]");
  }
}

Json TreeToJson(const DecisionTree& tree, int32_t index) {
  const auto& node = tree.nodes()[index];
  if (node.is_leaf()) return Json{{"proba", {node.proba[0], node.proba[1]}}};
  return Json{{"feature", node.feature},
              {"threshold", node.threshold},
              {"left", TreeToJson(tree, node.left)},
              {"right", TreeToJson(tree, node.right)}};
}

int32_t TreeFromJson(const Json& doc, std::vector<DecisionTree::Node>& nodes) {
  const auto index = static_cast<int32_t>(nodes.size());
  nodes.emplace_back();
  if (doc.contains("proba")) {
    const auto& proba = doc.at("proba");
    if (!proba.is_array() || proba.size() != 2) {
      Fail(ErrorCode::kParse, "leaf proba must be a 2-element array");
    }
    nodes[index].proba = {proba[0].get<double>(), proba[1].get<double>()};
    return index;
  }
  const int feature = doc.at("feature").get<int>();
  const double threshold = doc.at("threshold").get<double>();
  const int32_t left = TreeFromJson(doc.at("left"), nodes);
  const int32_t right = TreeFromJson(doc.at("right"), nodes);
  auto& node = nodes[index];
  node.feature = feature;
  node.threshold = threshold;
  node.left = left;
  node.right = right;
  return index;
}

Json MetricsToJson(const ClassMetrics& m) {
  return Json{{"precision", m.precision},
              {"recall", m.recall},
              {"f1-score", m.f1},
              {"support", m.support}};
}

double SafeDivide(double numerator, double denominator) {
  return denominator > 0.0 ? numerator / denominator : 0.0;
}

}  // namespace

DecisionTree DecisionTree::Leaf(double p0, double p1) {
  Node node;
  node.proba = {p0, p1};
  return DecisionTree({node});
}

DecisionTree DecisionTree::Split(int feature, double threshold,
                                 DecisionTree left, DecisionTree right) {
  std::vector<Node> nodes;
  nodes.reserve(1 + left.nodes_.size() + right.nodes_.size());
  nodes.emplace_back();
  const auto append = [&nodes](const std::vector<Node>& sub) {
    const auto offset = static_cast<int32_t>(nodes.size());
    for (Node node : sub) {
      if (!node.is_leaf()) {
        node.left += offset;
        node.right += offset;
      }
      nodes.push_back(node);
    }
    return offset;
  };
  const int32_t l = append(left.nodes_);
  const int32_t r = append(right.nodes_);
  nodes[0].feature = feature;
  nodes[0].threshold = threshold;
  nodes[0].left = l;
  nodes[0].right = r;
  return DecisionTree(std::move(nodes));
}

std::size_t DecisionTree::depth() const {
  if (nodes_.empty()) return 0;
  std::size_t deepest = 0;
  std::vector<std::pair<int32_t, std::size_t>> stack{{0, 0}};
  while (!stack.empty()) {
    const auto [index, d] = stack.back();
    stack.pop_back();
    const auto& node = nodes_[index];
    deepest = std::max(deepest, d);
    if (!node.is_leaf()) {
      stack.emplace_back(node.left, d + 1);
      stack.emplace_back(node.right, d + 1);
    }
  }
  return deepest;
}

ForestModel::ForestModel(ForestParams params,
                         std::vector<std::string> feature_names,
                         std::vector<DecisionTree> trees)
    : params_(std::move(params)),
      feature_names_(std::move(feature_names)),
      trees_(std::move(trees)) {
  if (trees_.empty()) Fail(ErrorCode::kValidation, "forest has no trees");
  const auto m = static_cast<int32_t>(feature_names_.size());
  for (std::size_t t = 0; t < trees_.size(); ++t) {
    const auto& nodes = trees_[t].nodes();
    if (nodes.empty()) Fail(ErrorCode::kValidation, "empty tree");
    const auto count = static_cast<int32_t>(nodes.size());
    for (const auto& node : nodes) {
      if (node.is_leaf()) {
        const double sum = node.proba[0] + node.proba[1];
        if (node.proba[0] < 0.0 || node.proba[1] < 0.0 ||
            std::abs(sum - 1.0) > 1e-12) {
          Fail(ErrorCode::kValidation,
               "tree " + std::to_string(t) + " has an invalid leaf");
        }
      } else if (node.feature >= m || node.left <= 0 || node.right <= 0 ||
                 node.left >= count || node.right >= count ||
                 !std::isfinite(node.threshold)) {
        Fail(ErrorCode::kValidation,
             "tree " + std::to_string(t) + " has an invalid split node");
      }
    }
  }
}

std::array<double, 2> ForestModel::PredictProbaUnchecked(
    std::span<const double> instance) const {
  double p0 = 0.0;
  double p1 = 0.0;
  for (const auto& tree : trees_) {
    const auto& leaf = tree.Leaf(instance);
    p0 += leaf.proba[0];
    p1 += leaf.proba[1];
  }
  const auto n = static_cast<double>(trees_.size());
  return {p0 / n, p1 / n};
}

std::array<double, 2> ForestModel::PredictProba(
    std::span<const double> instance) const {
  if (instance.size() != num_features()) {
    Fail(ErrorCode::kValidation,
         "instance has " + std::to_string(instance.size()) +
             " values, model expects " + std::to_string(num_features()));
  }
  for (const double v : instance) {
    if (!std::isfinite(v)) {
      Fail(ErrorCode::kValidation, "instance has a non-finite value");
    }
  }
  return PredictProbaUnchecked(instance);
}

Label PredictLabel(const ProbabilisticClassifier& model,
                   std::span<const double> instance) {
  const auto proba = model.PredictProba(instance);
  return proba[1] > proba[0] ? 1 : 0;
}

ForestModel Fit(const TabularDataset& train, const ForestParams& params,
                unsigned threads) {
  if (train.empty()) Fail(ErrorCode::kValidation, "training set is empty");
  if (train.num_features() == 0) {
    Fail(ErrorCode::kValidation, "training set has no features");
  }
  ValidateParams(params, train.num_features());
  const auto ones = std::count(train.labels().begin(), train.labels().end(), 1);
  if (ones == 0 || ones == static_cast<long>(train.num_rows())) {
    Fail(ErrorCode::kValidation, "training data contains a single class");
  }

  ForestParams resolved = params;
  if (!resolved.max_features_per_split) {
    resolved.max_features_per_split = static_cast<int>(
        std::ceil(std::sqrt(static_cast<double>(train.num_features()))));
  }

  std::vector<DecisionTree> trees(static_cast<std::size_t>(params.n_trees));
  ParallelFor(trees.size(), threads, [&](std::size_t t) {
    TreeBuilder builder(train, resolved, *resolved.max_features_per_split,
                        DeriveSeed(resolved.seed, static_cast<uint64_t>(t)));
    trees[t] = builder.Build();
  });
  return ForestModel(resolved, train.feature_names(), std::move(trees));
}

ClassificationReport MakeReport(std::span<const Label> truth,
                                std::span<const Label> predicted) {
  if (truth.size() != predicted.size()) {
    Fail(ErrorCode::kValidation, "truth/prediction length mismatch");
  }
  if (truth.empty()) Fail(ErrorCode::kValidation, "empty evaluation set");
  ClassificationReport report;
  for (std::size_t i = 0; i < truth.size(); ++i) {
    ++report.confusion[truth[i]][predicted[i]];
  }
  const auto total = static_cast<double>(truth.size());
  report.total_support = truth.size();
  for (int c = 0; c < 2; ++c) {
    const auto tp = static_cast<double>(report.confusion[c][c]);
    const auto support = report.confusion[c][0] + report.confusion[c][1];
    const auto predicted_c =
        static_cast<double>(report.confusion[0][c] + report.confusion[1][c]);
    auto& m = report.per_class[c];
    m.support = support;
    m.precision = SafeDivide(tp, predicted_c);
    m.recall = SafeDivide(tp, static_cast<double>(support));
    m.f1 = SafeDivide(2.0 * m.precision * m.recall, m.precision + m.recall);
  }
  report.accuracy =
      static_cast<double>(report.confusion[0][0] + report.confusion[1][1]) /
      total;

  const auto& c0 = report.per_class[0];
  const auto& c1 = report.per_class[1];
  report.macro_avg = {(c0.precision + c1.precision) / 2.0,
                      (c0.recall + c1.recall) / 2.0, (c0.f1 + c1.f1) / 2.0,
                      report.total_support};
  const double w0 = static_cast<double>(c0.support) / total;
  const double w1 = static_cast<double>(c1.support) / total;
  report.weighted_avg = {w0 * c0.precision + w1 * c1.precision,
                         w0 * c0.recall + w1 * c1.recall,
                         w0 * c0.f1 + w1 * c1.f1, report.total_support};
  return report;
}

ClassificationReport Evaluate(const ProbabilisticClassifier& model,
                              const TabularDataset& test) {
  if (test.empty()) Fail(ErrorCode::kValidation, "test set is empty");
  std::vector<Label> predicted(test.num_rows());
  for (std::size_t i = 0; i < test.num_rows(); ++i) {
    predicted[i] = PredictLabel(model, test.row(i));
  }
  return MakeReport(test.labels(), predicted);
}

std::string ReportToText(const ClassificationReport& report) {
  char line[160];
  std::string out;
  std::snprintf(line, sizeof(line), "%12s  %9s %9s %9s %9s\n\n", "",
                "precision", "recall", "f1-score", "support");
  out += line;
  for (int c = 0; c < 2; ++c) {
    const auto& m = report.per_class[c];
    std::snprintf(line, sizeof(line), "%12d  %9.2f %9.2f %9.2f %9zu\n", c,
                  m.precision, m.recall, m.f1, m.support);
    out += line;
  }
  out += "\n";
  std::snprintf(line, sizeof(line), "%12s  %9s %9s %9.2f %9zu\n", "accuracy",
                "", "", report.accuracy, report.total_support);
  out += line;
  const auto row = [&](const char* name, const ClassMetrics& m) {
    std::snprintf(line, sizeof(line), "%12s  %9.2f %9.2f %9.2f %9zu\n", name,
                  m.precision, m.recall, m.f1, m.support);
    out += line;
  };
  row("macro avg", report.macro_avg);
  row("weighted avg", report.weighted_avg);
  return out;
}

std::string ModelToJson(const ForestModel& model,
                        std::string_view config_hash) {
  const auto& p = model.params();
  Json params{{"bootstrap", p.bootstrap},
              {"min_samples_leaf", p.min_samples_leaf},
              {"n_trees", p.n_trees},
              {"seed", p.seed}};
  params["max_depth"] = p.max_depth ? Json(*p.max_depth) : Json(nullptr);
  params["max_features_per_split"] = p.max_features_per_split
                                         ? Json(*p.max_features_per_split)
                                         : Json(nullptr);
  Json trees = Json::array();
  for (const auto& tree : model.trees()) trees.push_back(TreeToJson(tree, 0));
  Json doc{{"feature_names", model.feature_names()},
           {"params", std::move(params)},
           {"trees", std::move(trees)}};
  if (!config_hash.empty()) doc["config_hash"] = std::string(config_hash);
  return doc.dump() + "\n";
}

ForestModel ModelFromJson(std::string_view json, std::string* config_hash) {
  try {
    const Json doc = Json::parse(json);
    ForestParams params;
    const auto& p = doc.at("params");
    params.bootstrap = p.at("bootstrap").get<bool>();
    params.min_samples_leaf = p.at("min_samples_leaf").get<int>();
    params.n_trees = p.at("n_trees").get<int>();
    params.seed = p.at("seed").get<uint64_t>();
    if (!p.at("max_depth").is_null()) {
      params.max_depth = p.at("max_depth").get<int>();
    }
    if (!p.at("max_features_per_split").is_null()) {
      params.max_features_per_split = p.at("max_features_per_split").get<int>();
    }
    auto names = doc.at("feature_names").get<std::vector<std::string>>();
    std::vector<DecisionTree> trees;
    for (const auto& tree : doc.at("trees")) {
      std::vector<DecisionTree::Node> nodes;
      TreeFromJson(tree, nodes);
      trees.emplace_back(std::move(nodes));
    }
    if (config_hash != nullptr) {
      *config_hash = doc.value("config_hash", std::string());
    }
    return ForestModel(std::move(params), std::move(names), std::move(trees));
  } catch (const Json::exception& e) {
    Fail(ErrorCode::kParse, std::string("malformed model JSON: ") + e.what());
  }
}

std::string ReportToJson(const ClassificationReport& report,
                         std::string_view config_hash) {
  Json doc{{"0", MetricsToJson(report.per_class[0])},
           {"1", MetricsToJson(report.per_class[1])},
           {"accuracy", report.accuracy},
           {"macro avg", MetricsToJson(report.macro_avg)},
           {"weighted avg", MetricsToJson(report.weighted_avg)},
           {"total_support", report.total_support},
           {"confusion_matrix",
            {{report.confusion[0][0], report.confusion[0][1]},
             {report.confusion[1][0], report.confusion[1][1]}}}};
  if (!config_hash.empty()) doc["config_hash"] = std::string(config_hash);
  return doc.dump(2) + "\n";
}

}  // namespace tabxai
