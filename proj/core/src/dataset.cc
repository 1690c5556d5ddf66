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

#include "tabxai/dataset.h"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <numeric>
#include <set>
#include <string>
#include <system_error>

#include "json.hpp"
#include "tabxai/error.h"
#include "tabxai/io.h"
#include "tabxai/random.h"

namespace tabxai {
namespace {

std::string_view Trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::vector<std::string_view> SplitFields(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    if (comma == std::string_view::npos) {
      fields.push_back(Trim(line.substr(start)));
      return fields;
    }
    fields.push_back(Trim(line.substr(start, comma - start)));
    start = comma + 1;
  }
}

bool ParseDouble(std::string_view text, double& out) {
  if (text.empty()) return false;
  const char* end = text.data() + text.size();
  const auto result = std::from_chars(text.data(), end, out);
  return result.ec == std::errc() && result.ptr == end && std::isfinite(out);
}

std::string Location(std::string_view source, std::size_t line,
                     std::string_view column) {
  return std::string(source) + ": row " + std::to_string(line) +
         ", column \"" + std::string(column) + "\"";
}

void Shuffle(std::vector<std::size_t>& items, Rng& rng) {
  for (std::size_t i = items.size(); i > 1; --i) {
    std::swap(items[i - 1], items[rng.UniformIndex(i)]);
  }
}

}  // namespace

TabularDataset::TabularDataset(std::vector<std::string> feature_names,
                               std::vector<double> values,
                               std::vector<Label> labels)
    : feature_names_(std::move(feature_names)),
      values_(std::move(values)),
      labels_(std::move(labels)) {
  std::set<std::string_view> seen;
  for (const auto& name : feature_names_) {
    if (name.empty()) Fail(ErrorCode::kValidation, "empty feature name");
    if (!seen.insert(name).second) {
      Fail(ErrorCode::kValidation, "duplicate feature name \"" + name + "\"");
    }
  }
  if (values_.size() != labels_.size() * feature_names_.size()) {
    Fail(ErrorCode::kValidation,
         "feature matrix has " + std::to_string(values_.size()) +
             " values, expected " + std::to_string(labels_.size()) + " x " +
             std::to_string(feature_names_.size()));
  }
  for (std::size_t i = 0; i < values_.size(); ++i) {
    if (!std::isfinite(values_[i])) {
      Fail(ErrorCode::kValidation,
           "non-finite value at row " +
               std::to_string(i / feature_names_.size()) + ", feature \"" +
               feature_names_[i % feature_names_.size()] + "\"");
    }
  }
  for (std::size_t i = 0; i < labels_.size(); ++i) {
    if (labels_[i] != 0 && labels_[i] != 1) {
      Fail(ErrorCode::kValidation,
           "label at row " + std::to_string(i) + " is not 0 or 1");
    }
  }
}

std::vector<double> TabularDataset::column(std::size_t feature) const {
  std::vector<double> out(num_rows());
  for (std::size_t i = 0; i < num_rows(); ++i) out[i] = at(i, feature);
  return out;
}

std::size_t TabularDataset::feature_index(std::string_view name) const {
  const auto it = std::find(feature_names_.begin(), feature_names_.end(), name);
  if (it == feature_names_.end()) {
    Fail(ErrorCode::kValidation,
         "unknown feature \"" + std::string(name) + "\"");
  }
  return static_cast<std::size_t>(it - feature_names_.begin());
}

TabularDataset TabularDataset::Subset(
    std::span<const std::size_t> indices) const {
  std::vector<double> values;
  values.reserve(indices.size() * num_features());
  std::vector<Label> labels;
  labels.reserve(indices.size());
  for (const std::size_t i : indices) {
    const auto r = row(i);
    values.insert(values.end(), r.begin(), r.end());
    labels.push_back(labels_[i]);
  }
  return TabularDataset(feature_names_, std::move(values), std::move(labels));
}

TabularDataset ParseCsv(std::string_view text, std::string_view label_column,
                        std::string_view source) {
  std::vector<std::string_view> lines;
  for (std::size_t start = 0; start <= text.size();) {
    auto end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    lines.push_back(text.substr(start, end - start));
    start = end + 1;
  }

  std::size_t header_line = 0;
  while (header_line < lines.size() && Trim(lines[header_line]).empty()) {
    ++header_line;
  }
  if (header_line == lines.size()) {
    Fail(ErrorCode::kParse, std::string(source) + ": missing header row");
  }

  const auto header = SplitFields(lines[header_line]);
  std::set<std::string_view> seen;
  for (std::size_t c = 0; c < header.size(); ++c) {
    if (header[c].empty()) {
      Fail(ErrorCode::kParse, std::string(source) + ": empty header name at column " +
                                  std::to_string(c + 1));
    }
    if (!seen.insert(header[c]).second) {
      Fail(ErrorCode::kParse, std::string(source) + ": duplicate header \"" +
                                  std::string(header[c]) + "\"");
    }
  }
  const auto label_it = std::find(header.begin(), header.end(), label_column);
  if (label_it == header.end()) {
    Fail(ErrorCode::kParse, std::string(source) + ": label column \"" +
                                std::string(label_column) + "\" not found");
  }
  const std::size_t label_pos =
      static_cast<std::size_t>(label_it - header.begin());

  std::vector<std::string> names;
  for (std::size_t c = 0; c < header.size(); ++c) {
    if (c != label_pos) names.emplace_back(header[c]);
  }

  std::vector<double> values;
  std::vector<Label> labels;
  for (std::size_t l = header_line + 1; l < lines.size(); ++l) {
    if (Trim(lines[l]).empty()) continue;
    const std::size_t line_number = l + 1;
    const auto fields = SplitFields(lines[l]);
    if (fields.size() != header.size()) {
      Fail(ErrorCode::kParse,
           std::string(source) + ": row " + std::to_string(line_number) +
               " has " + std::to_string(fields.size()) + " fields, expected " +
               std::to_string(header.size()));
    }
    for (std::size_t c = 0; c < fields.size(); ++c) {
      double value = 0.0;
      if (!ParseDouble(fields[c], value)) {
        Fail(ErrorCode::kParse, Location(source, line_number, header[c]) +
                                    ": not a finite number: \"" +
                                    std::string(fields[c]) + "\"");
      }
      if (c == label_pos) {
        if (value != 0.0 && value != 1.0) {
          Fail(ErrorCode::kParse, Location(source, line_number, header[c]) +
                                      ": label must be 0 or 1");
        }
        labels.push_back(static_cast<Label>(value));
      } else {
        values.push_back(value);
      }
    }
  }
  return TabularDataset(std::move(names), std::move(values), std::move(labels));
}

TabularDataset LoadCsv(const std::filesystem::path& path,
                       std::string_view label_column) {
  std::error_code ec;
  if (!std::filesystem::is_regular_file(path, ec)) {
    Fail(ErrorCode::kIo, "data file not found: " + path.string());
  }
  return ParseCsv(ReadFile(path), label_column, path.string());
}

double Quantile(std::span<const double> sorted, double p) {
  if (sorted.empty()) Fail(ErrorCode::kValidation, "quantile of empty sample");
  const double h = static_cast<double>(sorted.size() - 1) * p;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  if (lo + 1 >= sorted.size()) return sorted.back();
  const double frac = h - static_cast<double>(lo);
  return sorted[lo] + frac * (sorted[lo + 1] - sorted[lo]);
}

FeatureStats ComputeStats(const TabularDataset& data) {
  if (data.empty()) Fail(ErrorCode::kValidation, "stats of empty dataset");
  FeatureStats stats;
  stats.feature_names = data.feature_names();
  const double n = static_cast<double>(data.num_rows());
  for (std::size_t f = 0; f < data.num_features(); ++f) {
    auto values = data.column(f);
    // Sorted summation keeps the result independent of row order.
    std::sort(values.begin(), values.end());
    FeatureSummary s;
    s.mean = std::accumulate(values.begin(), values.end(), 0.0) / n;
    double squares = 0.0;
    for (const double v : values) squares += (v - s.mean) * (v - s.mean);
    s.std = std::sqrt(squares / n);
    s.min = values.front();
    s.q1 = Quantile(values, 0.25);
    s.median = Quantile(values, 0.5);
    s.q3 = Quantile(values, 0.75);
    s.max = values.back();
    stats.features.push_back(s);
  }
  return stats;
}

SplitResult Split(const TabularDataset& data, const SplitSpec& spec) {
  const std::size_t n = data.num_rows();
  if (n < 2) Fail(ErrorCode::kValidation, "split needs at least 2 rows");
  if (!(spec.test_fraction > 0.0 && spec.test_fraction < 1.0)) {
    Fail(ErrorCode::kValidation, "test_fraction must lie in (0, 1)");
  }
  const auto n_test = static_cast<std::size_t>(
      std::llround(static_cast<double>(n) * spec.test_fraction));
  if (n_test == 0 || n_test == n) {
    Fail(ErrorCode::kValidation,
         "test_fraction " + FormatDouble(spec.test_fraction) + " leaves an " +
             "empty partition for " + std::to_string(n) + " rows");
  }

  Rng rng(spec.seed);
  std::vector<std::size_t> test;
  if (!spec.stratified) {
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    Shuffle(order, rng);
    test.assign(order.begin(), order.begin() + static_cast<long>(n_test));
  } else {
    std::array<std::vector<std::size_t>, 2> by_class;
    for (std::size_t i = 0; i < n; ++i) by_class[data.label(i)].push_back(i);

    // Largest-remainder allocation of n_test across classes.
    std::array<std::size_t, 2> quota{};
    std::array<double, 2> remainder{};
    std::size_t assigned = 0;
    for (int c = 0; c < 2; ++c) {
      const double ideal = static_cast<double>(n_test) *
                           static_cast<double>(by_class[c].size()) /
                           static_cast<double>(n);
      quota[c] = static_cast<std::size_t>(std::floor(ideal));
      remainder[c] = ideal - std::floor(ideal);
      assigned += quota[c];
    }
    for (std::size_t left = n_test - assigned; left > 0; --left) {
      const int c = remainder[1] > remainder[0] ? 1 : 0;
      ++quota[c];
      remainder[c] = -1.0;
    }
    // Keep both classes on both sides when the counts allow it.
    for (int c = 0; c < 2; ++c) {
      const int other = 1 - c;
      const std::size_t size = by_class[c].size();
      const std::size_t other_size = by_class[other].size();
      if (size >= 2 && quota[c] == 0 && quota[other] > 1) {
        ++quota[c];
        --quota[other];
      }
      if (size >= 2 && quota[c] == size && other_size - quota[other] > 1) {
        --quota[c];
        ++quota[other];
      }
    }
    for (int c = 0; c < 2; ++c) {
      Shuffle(by_class[c], rng);
      test.insert(test.end(), by_class[c].begin(),
                  by_class[c].begin() + static_cast<long>(quota[c]));
    }
  }

  std::sort(test.begin(), test.end());
  std::vector<std::size_t> train;
  train.reserve(n - test.size());
  std::size_t t = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (t < test.size() && test[t] == i) {
      ++t;
    } else {
      train.push_back(i);
    }
  }

  SplitResult result;
  result.train = data.Subset(train);
  result.test = data.Subset(test);
  result.train_indices = std::move(train);
  result.test_indices = std::move(test);
  return result;
}

std::string StatsToJson(const FeatureStats& stats) {
  nlohmann::json doc = nlohmann::json::object();
  for (std::size_t f = 0; f < stats.size(); ++f) {
    const auto& s = stats[f];
    doc[stats.feature_names[f]] = {{"mean", s.mean},     {"std", s.std},
                                   {"min", s.min},       {"q1", s.q1},
                                   {"median", s.median}, {"q3", s.q3},
                                   {"max", s.max}};
  }
  return doc.dump(2) + "\n";
}

}  // namespace tabxai
