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

#include "tabxai/lime.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include <Eigen/Dense>

#include "json.hpp"
#include "tabxai/error.h"
#include "tabxai/io.h"
#include "tabxai/random.h"

namespace tabxai {
namespace {

using Json = nlohmann::json;

double DefaultWidth(std::size_t num_features) {
  return 0.75 * std::sqrt(static_cast<double>(num_features));
}

}  // namespace

Discretizer::Discretizer(std::vector<std::string> feature_names,
                         std::vector<std::vector<double>> edges,
                         std::vector<double> constants)
    : feature_names_(std::move(feature_names)),
      edges_(std::move(edges)),
      constants_(std::move(constants)) {
  if (feature_names_.size() != edges_.size() ||
      constants_.size() != edges_.size()) {
    Fail(ErrorCode::kValidation, "discretizer shape mismatch");
  }
  for (const auto& e : edges_) {
    if (!std::is_sorted(e.begin(), e.end())) {
      Fail(ErrorCode::kValidation, "discretizer edges must be non-decreasing");
    }
  }
}

std::size_t Discretizer::Bin(std::size_t feature, double value) const {
  const auto& e = edges_[feature];
  return static_cast<std::size_t>(std::lower_bound(e.begin(), e.end(), value) -
                                  e.begin());
}

std::string Discretizer::Rule(std::size_t feature, std::size_t bin) const {
  const auto& name = feature_names_[feature];
  const auto& e = edges_[feature];
  if (e.empty()) return name + " <= " + FormatFixed(constants_[feature], 2);
  if (bin == 0) return name + " <= " + FormatFixed(e.front(), 2);
  if (bin >= e.size()) return name + " > " + FormatFixed(e.back(), 2);
  return FormatFixed(e[bin - 1], 2) + " < " + name +
         " <= " + FormatFixed(e[bin], 2);
}

Discretizer BuildDiscretizer(const FeatureStats& stats) {
  std::vector<std::vector<double>> edges;
  std::vector<double> constants;
  for (const auto& s : stats.features) {
    std::vector<double> e;
    if (s.min != s.max) {
      for (const double q : {s.q1, s.median, s.q3}) {
        if (e.empty() || q > e.back()) e.push_back(q);
      }
    }
    edges.push_back(std::move(e));
    constants.push_back(s.min);
  }
  return Discretizer(stats.feature_names, std::move(edges),
                     std::move(constants));
}

double KernelWeight(std::span<const uint8_t> bits, double width) {
  if (width <= 0.0) width = DefaultWidth(bits.size());
  double distance = 0.0;
  for (const uint8_t b : bits) distance += b ? 0.0 : 1.0;
  return std::exp(-(distance * distance) / (width * width));
}

std::vector<PerturbationSample> SamplePerturbations(
    std::span<const double> instance, const TabularDataset& training,
    const Discretizer& discretizer, std::size_t n, uint64_t seed,
    double kernel_width) {
  const std::size_t m = discretizer.num_features();
  if (instance.size() != m || training.num_features() != m) {
    Fail(ErrorCode::kValidation, "instance/training/discretizer mismatch");
  }
  if (n < m + 2) {
    Fail(ErrorCode::kValidation,
         "need at least M + 2 = " + std::to_string(m + 2) + " samples");
  }
  if (training.empty()) Fail(ErrorCode::kValidation, "training set is empty");

  // pools[f][bin]: training values of feature f falling in bin, row order.
  std::vector<std::vector<std::vector<double>>> pools(m);
  std::vector<std::vector<std::size_t>> occupied(m);
  std::vector<std::size_t> instance_bin(m);
  for (std::size_t f = 0; f < m; ++f) {
    pools[f].resize(discretizer.num_bins(f));
    for (std::size_t r = 0; r < training.num_rows(); ++r) {
      const double v = training.at(r, f);
      pools[f][discretizer.Bin(f, v)].push_back(v);
    }
    for (std::size_t b = 0; b < pools[f].size(); ++b) {
      if (!pools[f][b].empty()) occupied[f].push_back(b);
    }
    instance_bin[f] = discretizer.Bin(f, instance[f]);
  }

  std::vector<PerturbationSample> samples;
  samples.reserve(n);
  samples.push_back({std::vector<uint8_t>(m, 1),
                     std::vector<double>(instance.begin(), instance.end()),
                     1.0});
  Rng rng(seed);
  for (std::size_t i = 1; i < n; ++i) {
    PerturbationSample sample;
    sample.bits.resize(m);
    sample.values.resize(m);
    for (std::size_t f = 0; f < m; ++f) {
      const std::size_t bin = occupied[f][rng.UniformIndex(occupied[f].size())];
      const auto& pool = pools[f][bin];
      sample.values[f] = pool[rng.UniformIndex(pool.size())];
      sample.bits[f] = bin == instance_bin[f] ? 1 : 0;
    }
    sample.weight = KernelWeight(sample.bits, kernel_width);
    samples.push_back(std::move(sample));
  }
  return samples;
}

RidgeFit WeightedRidge(std::span<const double> design, std::size_t num_columns,
                       std::span<const double> target,
                       std::span<const double> weights, double lambda) {
  const std::size_t n = target.size();
  if (design.size() != n * num_columns || weights.size() != n || n == 0) {
    Fail(ErrorCode::kValidation, "ridge inputs have inconsistent shapes");
  }
  if (lambda < 0.0) Fail(ErrorCode::kValidation, "ridge lambda must be >= 0");
  const auto p = static_cast<Eigen::Index>(num_columns);
  const auto rows = static_cast<Eigen::Index>(n);
  const Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic,
                                       Eigen::RowMajor>>
      x(design.data(), rows, p);
  const Eigen::Map<const Eigen::VectorXd> y(target.data(), rows);
  const Eigen::Map<const Eigen::VectorXd> w(weights.data(), rows);

  const double total_weight = w.sum();
  if (!(total_weight > 0.0)) {
    Fail(ErrorCode::kValidation, "ridge weights must have a positive sum");
  }
  const Eigen::RowVectorXd x_mean = (w.transpose() * x) / total_weight;
  const double y_mean = w.dot(y) / total_weight;
  const Eigen::MatrixXd xc = x.rowwise() - x_mean;
  const Eigen::VectorXd yc = y.array() - y_mean;

  Eigen::MatrixXd gram = xc.transpose() * w.asDiagonal() * xc;
  gram.diagonal().array() += lambda;
  const Eigen::VectorXd rhs = xc.transpose() * w.asDiagonal() * yc;
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(gram);
  if (qr.rank() < p) {
    Fail(ErrorCode::kNumeric, "ridge system is singular; use lambda > 0");
  }
  const Eigen::VectorXd beta = qr.solve(rhs);

  RidgeFit fit;
  fit.coefficients.assign(beta.data(), beta.data() + p);
  fit.intercept = y_mean - x_mean.dot(beta);
  const Eigen::VectorXd residual = (y - x * beta).array() - fit.intercept;
  const double ss_res = (w.array() * residual.array().square()).sum();
  const double ss_tot = (w.array() * yc.array().square()).sum();
  fit.r2 = ss_tot > 0.0 ? 1.0 - ss_res / ss_tot : 1.0;
  return fit;
}

LimeExplanation ExplainInstance(const ProbabilisticClassifier& model,
                                std::span<const double> instance,
                                const TabularDataset& training,
                                const Discretizer& discretizer,
                                const LimeParams& params) {
  const std::size_t m = model.num_features();
  if (discretizer.num_features() != m) {
    Fail(ErrorCode::kValidation, "discretizer does not match the model");
  }
  if (params.top_k > m) {
    Fail(ErrorCode::kValidation, "top_k must not exceed the feature count");
  }
  if (params.class_index != 0 && params.class_index != 1) {
    Fail(ErrorCode::kValidation, "class_index must be 0 or 1");
  }
  const auto samples =
      SamplePerturbations(instance, training, discretizer, params.n_samples,
                          params.seed, params.kernel_width);

  std::vector<double> design(samples.size() * m);
  std::vector<double> target(samples.size());
  std::vector<double> weights(samples.size());
  for (std::size_t i = 0; i < samples.size(); ++i) {
    for (std::size_t f = 0; f < m; ++f) design[i * m + f] = samples[i].bits[f];
    target[i] = model.PredictProba(samples[i].values)[params.class_index];
    weights[i] = samples[i].weight;
  }
  const auto fit = WeightedRidge(design, m, target, weights, params.ridge_lambda);

  LimeExplanation out;
  out.class_index = params.class_index;
  out.probability = target.front();
  out.intercept = fit.intercept;
  out.r2 = fit.r2;
  out.n_samples = samples.size();
  out.seed = params.seed;
  out.instance.assign(instance.begin(), instance.end());

  std::vector<std::size_t> order(m);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return std::abs(fit.coefficients[a]) > std::abs(fit.coefficients[b]);
  });
  for (std::size_t k = 0; k < params.top_k; ++k) {
    const std::size_t f = order[k];
    out.rules.push_back({f, discretizer.Rule(f, discretizer.Bin(f, instance[f])),
                         fit.coefficients[f]});
  }
  return out;
}

std::string LimeToJson(const LimeExplanation& explanation,
                       const std::vector<std::string>& feature_names,
                       std::string_view config_hash) {
  Json rules = Json::array();
  for (const auto& r : explanation.rules) {
    rules.push_back({{"rule", r.rule}, {"weight", r.weight}});
  }
  Json instance = Json::object();
  for (std::size_t f = 0; f < feature_names.size(); ++f) {
    instance[feature_names[f]] = explanation.instance.at(f);
  }
  Json doc{{"class_index", explanation.class_index},
           {"probability", explanation.probability},
           {"intercept", explanation.intercept},
           {"r2", explanation.r2},
           {"n_samples", explanation.n_samples},
           {"seed", explanation.seed},
           {"instance", std::move(instance)},
           {"rules", std::move(rules)}};
  if (!config_hash.empty()) doc["config_hash"] = std::string(config_hash);
  return doc.dump(2) + "\n";
}

}  // namespace tabxai
