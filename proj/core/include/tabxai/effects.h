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

#ifndef TABXAI_EFFECTS_H_
#define TABXAI_EFFECTS_H_

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "tabxai/classifier.h"
#include "tabxai/dataset.h"

namespace tabxai {

enum class GridStrategy { kQuantile, kUniform };

// Grid over one or two features of interest. When `grids` is non-empty it
// holds explicit grid values per feature and `resolution`/`strategy` are
// ignored.
struct GridSpec {
  std::vector<std::size_t> features;
  std::size_t resolution = 20;
  GridStrategy strategy = GridStrategy::kQuantile;
  std::vector<std::vector<double>> grids;
};

// `resolution` points: quantiles at k / (resolution - 1) or evenly spaced
// over [min, max]. Duplicates are kept so the length is always resolution.
std::vector<double> MakeGrid(const TabularDataset& data, std::size_t feature,
                             std::size_t resolution, GridStrategy strategy);

struct PdpCurve {
  std::vector<std::size_t> features;
  // grids[k] holds the grid of features[k].
  std::vector<std::vector<double>> grids;
  // 1-D: one value per grid point. 2-D: row-major, first feature major.
  std::vector<double> values;
  std::size_t n_background = 0;

  double at(std::size_t i, std::size_t j) const {
    return values[i * grids[1].size() + j];
  }
};

struct IceBundle {
  std::size_t feature = 0;
  std::vector<double> grid;
  std::vector<std::vector<double>> curves;  // one per background row
  std::vector<double> mean;                 // bitwise equal to Pdp
};

struct AleCurve {
  std::size_t feature = 0;
  std::vector<double> edges;       // n_bins + 1 quantile edges
  std::vector<double> effects;     // centered accumulated effect per edge
  std::vector<std::size_t> counts; // rows per bin
  std::vector<bool> empty_bins;
  double centering = 0.0;          // constant subtracted from raw sums
};

// Partial dependence f_S(g) = (1/N) sum_rows f(g, row_C) evaluated over the
// whole background, summed in row order.
PdpCurve Pdp(const ProbabilisticClassifier& model,
             const TabularDataset& background, const GridSpec& grid,
             int class_index = 1, unsigned threads = 1);

IceBundle Ice(const ProbabilisticClassifier& model,
              const TabularDataset& background, const GridSpec& grid,
              int class_index = 1, unsigned threads = 1);

// First-order ALE over n_bins quantile bins. A row equal to an interior
// edge belongs to the lower bin. Empty bins contribute no effect and are
// flagged. The curve is centered so that the mean of the linearly
// interpolated effect over the data rows is zero.
AleCurve Ale(const ProbabilisticClassifier& model, const TabularDataset& data,
             std::size_t feature, std::size_t n_bins = 10,
             int class_index = 1);

// Interpolated centered ALE at an arbitrary value (clamped to the edges).
double AleAt(const AleCurve& curve, double value);

// (grid_value, pdp) for 1-D curves, (grid_a, grid_b, pdp) for 2-D.
std::string PdpToCsv(const PdpCurve& curve, std::string_view config_hash = {});
// (grid_value, row_index, ice), row-major over background rows.
std::string IceToCsv(const IceBundle& bundle,
                     std::string_view config_hash = {});
// (bin_edge, ale, count); count is the size of the bin ending at the edge.
std::string AleToCsv(const AleCurve& curve, std::string_view config_hash = {});

}  // namespace tabxai

#endif  // TABXAI_EFFECTS_H_
