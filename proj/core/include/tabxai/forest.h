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

#ifndef TABXAI_FOREST_H_
#define TABXAI_FOREST_H_

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "tabxai/classifier.h"
#include "tabxai/dataset.h"

namespace tabxai {

struct ForestParams {
  int n_trees = 100;
  std::optional<int> max_depth;  // nullopt: grow until pure
  int min_samples_leaf = 1;
  // nullopt: ceil(sqrt(M)) at fit time.
  std::optional<int> max_features_per_split;
  bool bootstrap = true;
  uint64_t seed = 42;
};

// Flat CART tree. Node 0 is the root. Samples with
// x[feature] <= threshold go left.
class DecisionTree {
 public:
  struct Node {
    int32_t feature = -1;  // -1 for leaves
    double threshold = 0.0;
    int32_t left = -1;
    int32_t right = -1;
    std::array<double, 2> proba{0.0, 0.0};

    bool is_leaf() const { return feature < 0; }
  };

  DecisionTree() = default;
  explicit DecisionTree(std::vector<Node> nodes) : nodes_(std::move(nodes)) {}

  static DecisionTree Leaf(double p0, double p1);
  static DecisionTree Split(int feature, double threshold, DecisionTree left,
                            DecisionTree right);

  const std::vector<Node>& nodes() const { return nodes_; }
  std::size_t num_nodes() const { return nodes_.size(); }
  std::size_t depth() const;

  const Node& Leaf(std::span<const double> instance) const {
    const Node* node = &nodes_[0];
    while (!node->is_leaf()) {
      node = &nodes_[instance[node->feature] <= node->threshold ? node->left
                                                                : node->right];
    }
    return *node;
  }

 private:
  std::vector<Node> nodes_;
};

class ForestModel final : public ProbabilisticClassifier {
 public:
  // Validates: at least one tree, feature indices in range, leaf
  // probabilities non-negative and summing to 1 within 1e-12.
  ForestModel(ForestParams params, std::vector<std::string> feature_names,
              std::vector<DecisionTree> trees);

  std::size_t num_features() const override { return feature_names_.size(); }

  // Mean of per-tree leaf distributions. Throws kValidation on wrong length
  // or non-finite input.
  std::array<double, 2> PredictProba(
      std::span<const double> instance) const override;

  // Same as PredictProba without input validation.
  std::array<double, 2> PredictProbaUnchecked(
      std::span<const double> instance) const;

  const ForestParams& params() const { return params_; }
  const std::vector<std::string>& feature_names() const {
    return feature_names_;
  }
  const std::vector<DecisionTree>& trees() const { return trees_; }

 private:
  ForestParams params_;
  std::vector<std::string> feature_names_;
  std::vector<DecisionTree> trees_;
};

// argmax of the probabilities; an exact tie resolves to class 0.
Label PredictLabel(const ProbabilisticClassifier& model,
                   std::span<const double> instance);

// Grows params.n_trees Gini trees. Tree t draws from an RNG seeded with
// DeriveSeed(params.seed, t), so the result does not depend on `threads`.
ForestModel Fit(const TabularDataset& train, const ForestParams& params,
                unsigned threads = 1);

struct ClassMetrics {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  std::size_t support = 0;
};

struct ClassificationReport {
  std::array<ClassMetrics, 2> per_class;
  double accuracy = 0.0;
  ClassMetrics macro_avg;
  ClassMetrics weighted_avg;
  std::size_t total_support = 0;
  // confusion[true][predicted]
  std::array<std::array<std::size_t, 2>, 2> confusion{};
};

ClassificationReport MakeReport(std::span<const Label> truth,
                                std::span<const Label> predicted);
ClassificationReport Evaluate(const ProbabilisticClassifier& model,
                              const TabularDataset& test);

// sklearn-style aligned table, two decimals.
std::string ReportToText(const ClassificationReport& report);

// Model documents: {config_hash?, feature_names, params, trees}, trees as
// nested {feature, threshold, left, right} / {proba: [p0, p1]} objects.
// Keys are emitted in lexicographic order. An empty config_hash is omitted.
std::string ModelToJson(const ForestModel& model,
                        std::string_view config_hash = {});
ForestModel ModelFromJson(std::string_view json,
                          std::string* config_hash = nullptr);

// {"0": {...}, "1": {...}, "accuracy", "macro avg", "weighted avg",
//  "total_support", "confusion_matrix"}; per-class objects carry
// precision, recall, f1-score, support.
std::string ReportToJson(const ClassificationReport& report,
                         std::string_view config_hash = {});

}  // namespace tabxai

#endif  // TABXAI_FOREST_H_
