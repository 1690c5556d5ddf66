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

#include <filesystem>

#include "benchmark/benchmark.h"
#include "tabxai/effects.h"
#include "tabxai/forest.h"
#include "tabxai/lime.h"
#include "tabxai/shap.h"

namespace tabxai {
namespace {

struct Pima {
  SplitResult split;
  ForestModel model;
};

const Pima& Fixture() {
  static const Pima pima = [] {
    auto data =
        LoadCsv(std::filesystem::path(TABXAI_DATA_DIR) / "diabetes.csv", "Outcome");
    auto split = Split(data, {});
    auto model = Fit(split.train, {});
    return Pima{std::move(split), std::move(model)};
  }();
  return pima;
}

TabularDataset Head(const TabularDataset& data, std::size_t n) {
  std::vector<std::size_t> rows(std::min(n, data.num_rows()));
  for (std::size_t i = 0; i < rows.size(); ++i) rows[i] = i;
  return data.Subset(rows);
}

void BM_ForestFit(benchmark::State& state) {
  const auto& train = Fixture().split.train;
  ForestParams params;
  params.n_trees = static_cast<int>(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(Fit(train, params, 1));
  }
}
BENCHMARK(BM_ForestFit)->Arg(10)->Arg(100)->Unit(benchmark::kMillisecond);

void BM_ExactShapleyForest(benchmark::State& state) {
  const auto& pima = Fixture();
  const auto background = Head(pima.split.train, state.range(0));
  const AttributionRequest req{pima.split.test.row(0), background, 1};
  for (auto _ : state) {
    benchmark::DoNotOptimize(ExactShapley(pima.model, req));
  }
}
BENCHMARK(BM_ExactShapleyForest)->Arg(25)->Arg(100)->Unit(benchmark::kMillisecond);

// Same computation through the black-box interface, for comparison with the
// tree-routing path above.
void BM_ExactShapleyGeneric(benchmark::State& state) {
  const auto& pima = Fixture();
  const auto background = Head(pima.split.train, state.range(0));
  const AttributionRequest req{pima.split.test.row(0), background, 1};
  const ProbabilisticClassifier& model = pima.model;
  for (auto _ : state) {
    benchmark::DoNotOptimize(ExactShapley(model, req));
  }
}
BENCHMARK(BM_ExactShapleyGeneric)->Arg(25)->Unit(benchmark::kMillisecond);

void BM_SampledShapley(benchmark::State& state) {
  const auto& pima = Fixture();
  const auto background = Head(pima.split.train, 100);
  const AttributionRequest req{pima.split.test.row(0), background, 1};
  for (auto _ : state) {
    benchmark::DoNotOptimize(SampledShapley(pima.model, req, state.range(0), 1));
  }
}
BENCHMARK(BM_SampledShapley)->Arg(64)->Arg(2048)->Unit(benchmark::kMillisecond);

void BM_LimeExplain(benchmark::State& state) {
  const auto& pima = Fixture();
  const auto disc = BuildDiscretizer(ComputeStats(pima.split.train));
  LimeParams params;
  params.n_samples = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(ExplainInstance(pima.model, pima.split.test.row(0),
                                             pima.split.train, disc, params));
  }
}
BENCHMARK(BM_LimeExplain)->Arg(1000)->Arg(5000)->Unit(benchmark::kMillisecond);

void BM_Pdp(benchmark::State& state) {
  const auto& pima = Fixture();
  const auto background = Head(pima.split.train, 200);
  const GridSpec spec{{1}, static_cast<std::size_t>(state.range(0))};
  for (auto _ : state) {
    benchmark::DoNotOptimize(Pdp(pima.model, background, spec));
  }
}
BENCHMARK(BM_Pdp)->Arg(20)->Unit(benchmark::kMillisecond);

}  // namespace
}  // namespace tabxai

BENCHMARK_MAIN();
