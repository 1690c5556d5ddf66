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

#ifndef TABXAI_CLASSIFIER_H_
#define TABXAI_CLASSIFIER_H_

#include <array>
#include <cstddef>
#include <functional>
#include <span>
#include <utility>

namespace tabxai {

// A black-box binary classifier: the only thing the explainers see.
class ProbabilisticClassifier {
 public:
  virtual ~ProbabilisticClassifier() = default;

  virtual std::size_t num_features() const = 0;

  // (P(class 0), P(class 1)) for one instance of num_features() values.
  virtual std::array<double, 2> PredictProba(
      std::span<const double> instance) const = 0;
};

// Adapts a callable returning P(class 1).
class FunctionClassifier final : public ProbabilisticClassifier {
 public:
  using Fn = std::function<double(std::span<const double>)>;

  FunctionClassifier(std::size_t num_features, Fn positive_probability)
      : num_features_(num_features), fn_(std::move(positive_probability)) {}

  std::size_t num_features() const override { return num_features_; }

  std::array<double, 2> PredictProba(
      std::span<const double> instance) const override {
    const double p = fn_(instance);
    return {1.0 - p, p};
  }

 private:
  std::size_t num_features_;
  Fn fn_;
};

}  // namespace tabxai

#endif  // TABXAI_CLASSIFIER_H_
