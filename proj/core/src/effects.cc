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

#include "tabxai/effects.h"

#include <algorithm>
#include <cmath>
#include <string>

#include "tabxai/error.h"
#include "tabxai/io.h"
#include "tabxai/parallel.h"

namespace tabxai {
namespace {

void CheckClass(int class_index) {
  if (class_index != 0 && class_index != 1) {
    Fail(ErrorCode::kValidation, "class_index must be 0 or 1");
  }
}

void CheckFeature(const TabularDataset& data, std::size_t feature) {
  if (feature >= data.num_features()) {
    Fail(ErrorCode::kValidation,
         "feature index " + std::to_string(feature) + " out of range");
  }
}

std::vector<std::vector<double>> ResolveGrids(const ProbabilisticClassifier& model,
                                              const TabularDataset& background,
                                              const GridSpec& spec) {
  if (background.empty()) Fail(ErrorCode::kValidation, "background is empty");
  if (background.num_features() != model.num_features()) {
    Fail(ErrorCode::kValidation, "background does not match the model");
  }
  if (spec.features.empty() || spec.features.size() > 2) {
    Fail(ErrorCode::kValidation, "a grid covers one or two features");
  }
  if (spec.features.size() == 2 && spec.features[0] == spec.features[1]) {
    Fail(ErrorCode::kValidation, "2-D grid needs two distinct features");
  }
  for (const std::size_t f : spec.features) CheckFeature(background, f);
  if (!spec.grids.empty()) {
    if (spec.grids.size() != spec.features.size()) {
      Fail(ErrorCode::kValidation, "one explicit grid per feature required");
    }
    for (const auto& g : spec.grids) {
      if (g.empty()) Fail(ErrorCode::kValidation, "explicit grid is empty");
    }
    return spec.grids;
  }
  std::vector<std::vector<double>> grids;
  for (const std::size_t f : spec.features) {
    grids.push_back(MakeGrid(background, f, spec.resolution, spec.strategy));
  }
  return grids;
}

// Edge-bin index for ALE: first k >= 1 with value <= edges[k], minus one.
std::size_t AleBin(const std::vector<double>& edges, double value) {
  const auto it = std::lower_bound(edges.begin() + 1, edges.end(), value);
  const auto bin = static_cast<std::size_t>(it - (edges.begin() + 1));
  return std::min(bin, edges.size() - 2);
}

double Interpolate(const std::vector<double>& edges,
                   const std::vector<double>& effects, double value) {
  value = std::clamp(value, edges.front(), edges.back());
  const std::size_t b = AleBin(edges, value);
  const double lo = edges[b];
  const double hi = edges[b + 1];
  if (!(hi > lo)) return effects[b + 1];
  return effects[b] + (effects[b + 1] - effects[b]) * (value - lo) / (hi - lo);
}

}  // namespace

std::vector<double> MakeGrid(const TabularDataset& data, std::size_t feature,
                             std::size_t resolution, GridStrategy strategy) {
  CheckFeature(data, feature);
  if (data.empty()) Fail(ErrorCode::kValidation, "grid over empty data");
  if (resolution < 2) Fail(ErrorCode::kValidation, "resolution must be >= 2");
  auto column = data.column(feature);
  std::sort(column.begin(), column.end());
  std::vector<double> grid(resolution);
  const auto steps = static_cast<double>(resolution - 1);
  for (std::size_t k = 0; k < resolution; ++k) {
    const double p = static_cast<double>(k) / steps;
    grid[k] = strategy == GridStrategy::kQuantile
                  ? Quantile(column, p)
                  : column.front() + (column.back() - column.front()) * p;
  }
  grid.back() = column.back();
  return grid;
}

PdpCurve Pdp(const ProbabilisticClassifier& model,
             const TabularDataset& background, const GridSpec& grid,
             int class_index, unsigned threads) {
  CheckClass(class_index);
  PdpCurve curve;
  curve.features = grid.features;
  curve.grids = ResolveGrids(model, background, grid);
  curve.n_background = background.num_rows();

  const std::size_t na = curve.grids[0].size();
  const std::size_t nb = curve.grids.size() == 2 ? curve.grids[1].size() : 1;
  curve.values.assign(na * nb, 0.0);
  const auto n = static_cast<double>(background.num_rows());
  ParallelFor(na * nb, threads, [&](std::size_t cell) {
    std::vector<double> hybrid(background.num_features());
    double total = 0.0;
    for (std::size_t r = 0; r < background.num_rows(); ++r) {
      const auto row = background.row(r);
      std::copy(row.begin(), row.end(), hybrid.begin());
      hybrid[curve.features[0]] = curve.grids[0][cell / nb];
      if (curve.grids.size() == 2) {
        hybrid[curve.features[1]] = curve.grids[1][cell % nb];
      }
      total += model.PredictProba(hybrid)[class_index];
    }
    curve.values[cell] = total / n;
  });
  return curve;
}

IceBundle Ice(const ProbabilisticClassifier& model,
              const TabularDataset& background, const GridSpec& grid,
              int class_index, unsigned threads) {
  CheckClass(class_index);
  if (grid.features.size() != 1) {
    Fail(ErrorCode::kValidation, "ICE curves are one-dimensional");
  }
  IceBundle bundle;
  bundle.feature = grid.features[0];
  bundle.grid = ResolveGrids(model, background, grid)[0];
  const std::size_t rows = background.num_rows();
  bundle.curves.assign(rows, std::vector<double>(bundle.grid.size()));
  ParallelFor(rows, threads, [&](std::size_t r) {
    const auto row = background.row(r);
    std::vector<double> hybrid(row.begin(), row.end());
    for (std::size_t g = 0; g < bundle.grid.size(); ++g) {
      hybrid[bundle.feature] = bundle.grid[g];
      bundle.curves[r][g] = model.PredictProba(hybrid)[class_index];
    }
  });
  bundle.mean.assign(bundle.grid.size(), 0.0);
  for (std::size_t g = 0; g < bundle.grid.size(); ++g) {
    double total = 0.0;
    for (std::size_t r = 0; r < rows; ++r) total += bundle.curves[r][g];
    bundle.mean[g] = total / static_cast<double>(rows);
  }
  return bundle;
}

AleCurve Ale(const ProbabilisticClassifier& model, const TabularDataset& data,
             std::size_t feature, std::size_t n_bins, int class_index) {
  CheckClass(class_index);
  CheckFeature(data, feature);
  if (data.num_features() != model.num_features()) {
    Fail(ErrorCode::kValidation, "data does not match the model");
  }
  if (n_bins < 1) Fail(ErrorCode::kValidation, "n_bins must be >= 1");
  auto sorted = data.column(feature);
  std::sort(sorted.begin(), sorted.end());
  if (sorted.empty() || sorted.front() == sorted.back()) {
    Fail(ErrorCode::kValidation,
         "ALE needs at least two distinct values of \"" +
             data.feature_names()[feature] + "\"");
  }

  AleCurve curve;
  curve.feature = feature;
  curve.edges.resize(n_bins + 1);
  for (std::size_t k = 0; k <= n_bins; ++k) {
    curve.edges[k] =
        Quantile(sorted, static_cast<double>(k) / static_cast<double>(n_bins));
  }
  curve.edges.back() = sorted.back();

  curve.counts.assign(n_bins, 0);
  std::vector<double> effect_sums(n_bins, 0.0);
  std::vector<double> hybrid(data.num_features());
  for (std::size_t r = 0; r < data.num_rows(); ++r) {
    const auto row = data.row(r);
    const std::size_t b = AleBin(curve.edges, row[feature]);
    std::copy(row.begin(), row.end(), hybrid.begin());
    hybrid[feature] = curve.edges[b + 1];
    const double upper = model.PredictProba(hybrid)[class_index];
    hybrid[feature] = curve.edges[b];
    const double lower = model.PredictProba(hybrid)[class_index];
    effect_sums[b] += upper - lower;
    ++curve.counts[b];
  }

  std::vector<double> accumulated(n_bins + 1, 0.0);
  curve.empty_bins.assign(n_bins, false);
  for (std::size_t b = 0; b < n_bins; ++b) {
    double local = 0.0;
    if (curve.counts[b] == 0) {
      curve.empty_bins[b] = true;
    } else {
      local = effect_sums[b] / static_cast<double>(curve.counts[b]);
    }
    accumulated[b + 1] = accumulated[b] + local;
  }

  double centering = 0.0;
  for (std::size_t r = 0; r < data.num_rows(); ++r) {
    centering += Interpolate(curve.edges, accumulated, data.at(r, feature));
  }
  centering /= static_cast<double>(data.num_rows());
  curve.centering = centering;
  curve.effects.resize(n_bins + 1);
  for (std::size_t k = 0; k <= n_bins; ++k) {
    curve.effects[k] = accumulated[k] - centering;
  }
  return curve;
}

double AleAt(const AleCurve& curve, double value) {
  return Interpolate(curve.edges, curve.effects, value);
}

std::string PdpToCsv(const PdpCurve& curve, std::string_view config_hash) {
  std::string out = CsvPreamble(config_hash);
  if (curve.grids.size() == 1) {
    out += "grid_value,pdp\n";
    for (std::size_t g = 0; g < curve.values.size(); ++g) {
      out += FormatDouble(curve.grids[0][g]) + "," +
             FormatDouble(curve.values[g]) + "\n";
    }
    return out;
  }
  out += "grid_a,grid_b,pdp\n";
  for (std::size_t i = 0; i < curve.grids[0].size(); ++i) {
    for (std::size_t j = 0; j < curve.grids[1].size(); ++j) {
      out += FormatDouble(curve.grids[0][i]) + "," +
             FormatDouble(curve.grids[1][j]) + "," +
             FormatDouble(curve.at(i, j)) + "\n";
    }
  }
  return out;
}

std::string IceToCsv(const IceBundle& bundle, std::string_view config_hash) {
  std::string out = CsvPreamble(config_hash) + "grid_value,row_index,ice\n";
  for (std::size_t r = 0; r < bundle.curves.size(); ++r) {
    for (std::size_t g = 0; g < bundle.grid.size(); ++g) {
      out += FormatDouble(bundle.grid[g]) + "," + std::to_string(r) + "," +
             FormatDouble(bundle.curves[r][g]) + "\n";
    }
  }
  return out;
}

std::string AleToCsv(const AleCurve& curve, std::string_view config_hash) {
  std::string out = CsvPreamble(config_hash) + "bin_edge,ale,count\n";
  for (std::size_t k = 0; k < curve.edges.size(); ++k) {
    const std::size_t count = k == 0 ? 0 : curve.counts[k - 1];
    out += FormatDouble(curve.edges[k]) + "," + FormatDouble(curve.effects[k]) +
           "," + std::to_string(count) + "\n";
  }
  return out;
}

}  // namespace tabxai
