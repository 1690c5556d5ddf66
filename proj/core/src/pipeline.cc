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

#include "tabxai/pipeline.h"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <ctime>
#include <numeric>
#include <string>
#include <system_error>

#include "json.hpp"
#include "tabxai/error.h"
#include "tabxai/io.h"
#include "tabxai/parallel.h"
#include "tabxai/random.h"

namespace tabxai {
namespace {

using Json = nlohmann::json;

std::string_view Trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::string_view Unquote(std::string_view s) {
  s = Trim(s);
  if (s.size() >= 2 && s.front() == '"' && s.back() == '"') {
    return s.substr(1, s.size() - 2);
  }
  return s;
}

[[noreturn]] void BadValue(std::string_view key, std::string_view value) {
  Fail(ErrorCode::kValidation, "invalid value \"" + std::string(value) +
                                   "\" for config key \"" + std::string(key) +
                                   "\"");
}

template <typename T>
T ParseNumber(std::string_view key, std::string_view text) {
  T out{};
  const char* end = text.data() + text.size();
  const auto result = std::from_chars(text.data(), end, out);
  if (result.ec != std::errc() || result.ptr != end) BadValue(key, text);
  if constexpr (std::is_floating_point_v<T>) {
    if (!std::isfinite(out)) BadValue(key, text);
  }
  return out;
}

std::size_t ParseCount(std::string_view key, std::string_view text) {
  return static_cast<std::size_t>(ParseNumber<unsigned long long>(key, text));
}

int ParsePositiveInt(std::string_view key, std::string_view text) {
  const int v = ParseNumber<int>(key, text);
  if (v < 1) BadValue(key, text);
  return v;
}

bool ParseBool(std::string_view key, std::string_view text) {
  if (text == "true") return true;
  if (text == "false") return false;
  BadValue(key, text);
}

std::vector<std::string> ParseList(std::string_view text) {
  std::vector<std::string> items;
  std::size_t start = 0;
  while (start <= text.size()) {
    auto comma = text.find(',', start);
    if (comma == std::string_view::npos) comma = text.size();
    const auto item = Trim(text.substr(start, comma - start));
    if (!item.empty()) items.emplace_back(item);
    start = comma + 1;
  }
  return items;
}

TabularDataset Subsample(const TabularDataset& data, std::size_t limit,
                         uint64_t seed) {
  if (data.num_rows() <= limit) return data;
  std::vector<std::size_t> order(data.num_rows());
  std::iota(order.begin(), order.end(), std::size_t{0});
  Rng rng(seed);
  for (std::size_t k = 0; k < limit; ++k) {
    std::swap(order[k], order[k + rng.UniformIndex(order.size() - k)]);
  }
  order.resize(limit);
  std::sort(order.begin(), order.end());
  return data.Subset(order);
}

struct LoadedModel {
  ForestModel model;
  std::string config_hash;
};

LoadedModel LoadModel(const std::filesystem::path& path,
                      const TabularDataset& data) {
  std::error_code ec;
  if (!std::filesystem::is_regular_file(path, ec)) {
    Fail(ErrorCode::kIo, "model file not found: " + path.string());
  }
  std::string hash;
  ForestModel model = ModelFromJson(ReadFile(path), &hash);
  if (model.num_features() != data.num_features()) {
    Fail(ErrorCode::kValidation,
         "feature-count mismatch: model has " +
             std::to_string(model.num_features()) + " features, data has " +
             std::to_string(data.num_features()));
  }
  if (model.feature_names() != data.feature_names()) {
    Fail(ErrorCode::kValidation, "model feature names differ from the data");
  }
  return {std::move(model), std::move(hash)};
}

std::string FileDigest(const std::filesystem::path& path) {
  return HexDigest(Fnv1a64(ReadFile(path)));
}

void Emit(const std::filesystem::path& path, std::string_view contents,
          std::vector<std::filesystem::path>& written) {
  WriteFileAtomic(path, contents);
  written.push_back(path);
}

Json ConfigJson(const RunConfig& c) {
  Json pairs = Json::array();
  for (const auto& [a, b] : c.effect_pairs) pairs.push_back(a + ":" + b);
  return Json{
      {"label", c.label},
      {"seed", c.seed},
      {"test_fraction", c.test_fraction},
      {"stratified", c.stratified},
      {"n_trees", c.n_trees},
      {"max_depth", c.max_depth ? Json(*c.max_depth) : Json(nullptr)},
      {"min_samples_leaf", c.min_samples_leaf},
      {"max_features", c.max_features ? Json(*c.max_features) : Json(nullptr)},
      {"bootstrap", c.bootstrap},
      {"shap.background", c.shap_background},
      {"shap.coalitions", c.shap_coalitions},
      {"lime.samples", c.lime_samples},
      {"lime.top_k", c.lime_top_k},
      {"lime.kernel_width", c.lime_kernel_width},
      {"lime.lambda", c.lime_lambda},
      {"effects.background", c.effects_background},
      {"effects.resolution", c.grid_resolution},
      {"effects.grid",
       c.grid_strategy == GridStrategy::kQuantile ? "quantile" : "uniform"},
      {"effects.ale_bins", c.ale_bins},
      {"effects.features", c.effect_features},
      {"effects.pairs", pairs},
      {"explain.reference", c.reference_profile},
  };
}

}  // namespace

void ApplyConfigValue(std::string_view key, std::string_view raw,
                      RunConfig& c) {
  const std::string_view value = Unquote(raw);
  if (key == "data") {
    c.data_path = std::string(value);
  } else if (key == "label") {
    c.label = std::string(value);
  } else if (key == "seed") {
    c.seed = ParseNumber<uint64_t>(key, value);
  } else if (key == "out") {
    c.out_dir = std::string(value);
  } else if (key == "threads") {
    c.threads = ParseNumber<unsigned>(key, value);
  } else if (key == "test_fraction") {
    c.test_fraction = ParseNumber<double>(key, value);
    if (!(c.test_fraction > 0.0 && c.test_fraction < 1.0)) BadValue(key, value);
  } else if (key == "stratified") {
    c.stratified = ParseBool(key, value);
  } else if (key == "n_trees") {
    c.n_trees = ParsePositiveInt(key, value);
  } else if (key == "max_depth") {
    if (value == "none") {
      c.max_depth.reset();
    } else {
      c.max_depth = ParsePositiveInt(key, value);
    }
  } else if (key == "min_samples_leaf") {
    c.min_samples_leaf = ParsePositiveInt(key, value);
  } else if (key == "max_features") {
    if (value == "auto") {
      c.max_features.reset();
    } else {
      c.max_features = ParsePositiveInt(key, value);
    }
  } else if (key == "bootstrap") {
    c.bootstrap = ParseBool(key, value);
  } else if (key == "shap.background") {
    c.shap_background = ParseCount(key, value);
    if (c.shap_background == 0) BadValue(key, value);
  } else if (key == "shap.coalitions") {
    c.shap_coalitions = ParseCount(key, value);
  } else if (key == "lime.samples") {
    c.lime_samples = ParseCount(key, value);
  } else if (key == "lime.top_k") {
    c.lime_top_k = ParseCount(key, value);
  } else if (key == "lime.kernel_width") {
    c.lime_kernel_width = ParseNumber<double>(key, value);
  } else if (key == "lime.lambda") {
    c.lime_lambda = ParseNumber<double>(key, value);
    if (c.lime_lambda < 0.0) BadValue(key, value);
  } else if (key == "effects.background") {
    c.effects_background = ParseCount(key, value);
    if (c.effects_background == 0) BadValue(key, value);
  } else if (key == "effects.resolution") {
    c.grid_resolution = ParseCount(key, value);
    if (c.grid_resolution < 2) BadValue(key, value);
  } else if (key == "effects.grid") {
    if (value == "quantile") {
      c.grid_strategy = GridStrategy::kQuantile;
    } else if (value == "uniform") {
      c.grid_strategy = GridStrategy::kUniform;
    } else {
      BadValue(key, value);
    }
  } else if (key == "effects.ale_bins") {
    c.ale_bins = ParseCount(key, value);
    if (c.ale_bins == 0) BadValue(key, value);
  } else if (key == "effects.features") {
    c.effect_features = ParseList(value);
  } else if (key == "effects.pairs") {
    c.effect_pairs.clear();
    for (const auto& item : ParseList(value)) {
      const auto colon = item.find(':');
      if (colon == std::string::npos) BadValue(key, value);
      c.effect_pairs.emplace_back(item.substr(0, colon),
                                  item.substr(colon + 1));
    }
  } else if (key == "explain.reference") {
    c.reference_profile.clear();
    for (const auto& item : ParseList(value)) {
      c.reference_profile.push_back(ParseNumber<double>(key, item));
    }
  } else if (key == "timestamps") {
    c.timestamps = ParseBool(key, value);
  } else {
    Fail(ErrorCode::kValidation,
         "unknown config key \"" + std::string(key) + "\"");
  }
}

void ApplyConfigText(std::string_view text, RunConfig& config) {
  std::size_t line_number = 0;
  std::size_t start = 0;
  while (start <= text.size()) {
    auto end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(start, end - start);
    start = end + 1;
    ++line_number;

    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
      if (line[i] == '"') quoted = !quoted;
      if (line[i] == '#' && !quoted) {
        line = line.substr(0, i);
        break;
      }
    }
    line = Trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      Fail(ErrorCode::kValidation,
           "config line " + std::to_string(line_number) + ": expected key = value");
    }
    try {
      ApplyConfigValue(Trim(line.substr(0, eq)), line.substr(eq + 1), config);
    } catch (const Error& e) {
      Fail(e.code(),
           "config line " + std::to_string(line_number) + ": " + e.what());
    }
  }
}

void ApplyConfigFile(const std::filesystem::path& path, RunConfig& config) {
  std::error_code ec;
  if (!std::filesystem::is_regular_file(path, ec)) {
    Fail(ErrorCode::kIo, "config file not found: " + path.string());
  }
  ApplyConfigText(ReadFile(path), config);
}

ForestParams MakeForestParams(const RunConfig& config) {
  ForestParams params;
  params.n_trees = config.n_trees;
  params.max_depth = config.max_depth;
  params.min_samples_leaf = config.min_samples_leaf;
  params.max_features_per_split = config.max_features;
  params.bootstrap = config.bootstrap;
  params.seed = DeriveSeed(config.seed, "forest");
  return params;
}

std::string CanonicalConfig(const RunConfig& config,
                            std::string_view data_digest) {
  Json doc = ConfigJson(config);
  doc["data_digest"] = std::string(data_digest);
  return doc.dump();
}

std::string ConfigHash(const RunConfig& config, std::string_view data_digest) {
  return HexDigest(Fnv1a64(CanonicalConfig(config, data_digest)));
}

PreparedData PrepareData(const RunConfig& config) {
  std::error_code ec;
  if (!std::filesystem::is_regular_file(config.data_path, ec)) {
    Fail(ErrorCode::kIo, "data file not found: " + config.data_path.string());
  }
  const std::string text = ReadFile(config.data_path);
  PreparedData prepared;
  prepared.full = ParseCsv(text, config.label, config.data_path.string());
  prepared.data_digest = HexDigest(Fnv1a64(text));
  SplitSpec spec;
  spec.test_fraction = config.test_fraction;
  spec.stratified = config.stratified;
  spec.seed = DeriveSeed(config.seed, "split");
  prepared.split = Split(prepared.full, spec);
  return prepared;
}

TrainResult RunTrain(const RunConfig& config) {
  const PreparedData data = PrepareData(config);
  const std::string hash = ConfigHash(config, data.data_digest);
  ForestModel model =
      Fit(data.split.train, MakeForestParams(config), config.threads);
  ClassificationReport report = Evaluate(model, data.split.test);

  std::vector<std::filesystem::path> written;
  Emit(config.out_dir / "model.json", ModelToJson(model, hash), written);
  Emit(config.out_dir / "report.json", ReportToJson(report, hash), written);
  Emit(config.out_dir / "report.txt",
       "# config_hash=" + hash + "\n" + ReportToText(report), written);
  return {std::move(model), report, hash};
}

std::size_t NearestRow(const TabularDataset& test, const FeatureStats& stats,
                       std::span<const double> profile) {
  if (test.empty()) Fail(ErrorCode::kValidation, "no rows to search");
  if (profile.size() != test.num_features() ||
      stats.size() != test.num_features()) {
    Fail(ErrorCode::kValidation,
         "reference profile needs " + std::to_string(test.num_features()) +
             " values");
  }
  std::size_t best = 0;
  double best_distance = 0.0;
  for (std::size_t r = 0; r < test.num_rows(); ++r) {
    double distance = 0.0;
    for (std::size_t f = 0; f < test.num_features(); ++f) {
      if (stats[f].std <= 0.0) continue;
      const double z = (test.at(r, f) - profile[f]) / stats[f].std;
      distance += z * z;
    }
    if (r == 0 || distance < best_distance) {
      best = r;
      best_distance = distance;
    }
  }
  return best;
}

ExplainResult RunExplain(const RunConfig& config,
                         const std::filesystem::path& model_path,
                         const InstanceSelector& selector,
                         bool global_outputs) {
  const PreparedData data = PrepareData(config);
  const auto loaded = LoadModel(model_path, data.full);
  const ForestModel& model = loaded.model;
  const std::string hash = loaded.config_hash.empty()
                               ? ConfigHash(config, data.data_digest)
                               : loaded.config_hash;
  const auto& names = model.feature_names();
  const TabularDataset& train = data.split.train;
  const TabularDataset& test = data.split.test;
  const FeatureStats train_stats = ComputeStats(train);

  ExplainResult result;
  switch (selector.kind) {
    case InstanceSelector::Kind::kTestRow:
      if (selector.row >= test.num_rows()) {
        Fail(ErrorCode::kValidation,
             "test row " + std::to_string(selector.row) +
                 " out of range (test split has " +
                 std::to_string(test.num_rows()) + " rows)");
      }
      result.test_row = selector.row;
      break;
    case InstanceSelector::Kind::kValues:
      if (selector.values.size() != model.num_features()) {
        Fail(ErrorCode::kValidation,
             "feature-count mismatch: got " +
                 std::to_string(selector.values.size()) + " values, model has " +
                 std::to_string(model.num_features()) + " features");
      }
      result.instance = selector.values;
      break;
    case InstanceSelector::Kind::kNearestProfile:
      result.test_row = NearestRow(test, train_stats, config.reference_profile);
      break;
  }
  if (result.test_row) {
    const auto row = test.row(*result.test_row);
    result.instance.assign(row.begin(), row.end());
  }

  const TabularDataset background = Subsample(
      train, config.shap_background, DeriveSeed(config.seed, "shap.background"));
  const AttributionRequest request{result.instance, background, 1};
  result.exact = ExactShapley(model, request);
  result.sampled = SampledShapley(model, request, config.shap_coalitions,
                                  DeriveSeed(config.seed, "shap.sampled"));

  LimeParams lime;
  lime.n_samples = config.lime_samples;
  lime.top_k = config.lime_top_k;
  lime.kernel_width = config.lime_kernel_width;
  lime.ridge_lambda = config.lime_lambda;
  lime.seed = DeriveSeed(config.seed, "lime");
  lime.class_index = 1;
  result.lime = ExplainInstance(model, result.instance, train,
                                BuildDiscretizer(train_stats), lime);

  const auto& out = config.out_dir;
  Emit(out / "shap_exact.json", ExplanationToJson(result.exact, names, hash),
       result.files);
  Emit(out / "shap_sampled.json", ExplanationToJson(result.sampled, names, hash),
       result.files);
  Emit(out / "lime.json", LimeToJson(result.lime, names, hash), result.files);

  if (!global_outputs) return result;

  result.test_explanations.resize(test.num_rows());
  ParallelFor(test.num_rows(), config.threads, [&](std::size_t r) {
    result.test_explanations[r] =
        ExactShapley(model, AttributionRequest{test.row(r), background, 1});
  });
  result.importance = GlobalImportance(result.test_explanations, names);

  // For two classes the class-0 attributions are the negated class-1 ones.
  std::vector<ShapleyExplanation> class0 = result.test_explanations;
  for (auto& e : class0) {
    e.class_index = 0;
    e.base_value = 1.0 - e.base_value;
    e.prediction = 1.0 - e.prediction;
    for (double& phi : e.attributions) phi = -phi;
  }
  Emit(out / "importance.csv", ImportanceToCsv(result.importance, hash),
       result.files);
  Emit(out / "importance_class0.csv",
       ImportanceToCsv(GlobalImportance(class0, names), hash), result.files);
  Emit(out / "summary.csv",
       SummaryToCsv(SummaryPoints(result.test_explanations, train), hash),
       result.files);
  for (const auto& name : names) {
    Emit(out / ("dependence_" + name + ".csv"),
         DependenceToCsv(
             MakeDependenceSeries(result.test_explanations, names, name), hash),
         result.files);
  }
  return result;
}

std::vector<std::filesystem::path> RunEffects(
    const RunConfig& config, const std::filesystem::path& model_path,
    const std::vector<std::string>& features,
    const std::vector<std::pair<std::string, std::string>>& pairs) {
  const PreparedData data = PrepareData(config);
  const auto loaded = LoadModel(model_path, data.full);
  const ForestModel& model = loaded.model;
  const std::string hash = loaded.config_hash.empty()
                               ? ConfigHash(config, data.data_digest)
                               : loaded.config_hash;
  const TabularDataset& train = data.split.train;
  const TabularDataset background =
      Subsample(train, config.effects_background,
                DeriveSeed(config.seed, "effects.background"));

  std::vector<std::filesystem::path> written;
  const auto& out = config.out_dir;
  for (const auto& name : features) {
    const std::size_t f = train.feature_index(name);
    GridSpec grid;
    grid.features = {f};
    grid.resolution = config.grid_resolution;
    grid.strategy = config.grid_strategy;
    // The grid comes from the whole training split, not the subsample.
    grid.grids = {MakeGrid(train, f, grid.resolution, grid.strategy)};
    Emit(out / ("pdp_" + name + ".csv"),
         PdpToCsv(Pdp(model, background, grid, 1, config.threads), hash),
         written);
    Emit(out / ("ice_" + name + ".csv"),
         IceToCsv(Ice(model, background, grid, 1, config.threads), hash),
         written);
    Emit(out / ("ale_" + name + ".csv"),
         AleToCsv(Ale(model, train, f, config.ale_bins, 1), hash), written);
  }
  for (const auto& [a, b] : pairs) {
    const std::size_t fa = train.feature_index(a);
    const std::size_t fb = train.feature_index(b);
    GridSpec grid;
    grid.features = {fa, fb};
    grid.grids = {MakeGrid(train, fa, config.grid_resolution, config.grid_strategy),
                  MakeGrid(train, fb, config.grid_resolution, config.grid_strategy)};
    Emit(out / ("pdp2d_" + a + "_" + b + ".csv"),
         PdpToCsv(Pdp(model, background, grid, 1, config.threads), hash),
         written);
  }
  return written;
}

std::filesystem::path RunReport(const RunConfig& config) {
  const TrainResult trained = RunTrain(config);
  const auto model_path = config.out_dir / "model.json";
  const ExplainResult explained = RunExplain(
      config, model_path, InstanceSelector::NearestProfile(), true);
  RunEffects(config, model_path, config.effect_features, config.effect_pairs);

  double max_residual = 0.0;
  for (const auto& e : explained.test_explanations) {
    max_residual = std::max(max_residual, std::abs(e.EfficiencyResidual()));
  }

  Json files = Json::object();
  std::vector<std::filesystem::path> listing;
  for (const auto& entry : std::filesystem::directory_iterator(config.out_dir)) {
    if (entry.is_regular_file() && entry.path().filename() != "run_report.json") {
      listing.push_back(entry.path());
    }
  }
  std::sort(listing.begin(), listing.end());
  for (const auto& path : listing) {
    files[path.filename().string()] = FileDigest(path);
  }

  Json importance = Json::array();
  for (const auto& item : explained.importance) {
    importance.push_back({{"feature", item.feature},
                          {"importance", item.importance}});
  }
  Json rules = Json::array();
  for (const auto& rule : explained.lime.rules) {
    rules.push_back({{"rule", rule.rule}, {"weight", rule.weight}});
  }

  const auto& report = trained.report;
  Json doc{
      {"config_hash", trained.config_hash},
      {"config", ConfigJson(config)},
      {"files", std::move(files)},
      {"classification",
       {{"accuracy", report.accuracy},
        {"recall_0", report.per_class[0].recall},
        {"recall_1", report.per_class[1].recall},
        {"total_support", report.total_support}}},
      {"global_importance", std::move(importance)},
      {"shap_max_efficiency_residual", max_residual},
      {"local_explanation",
       {{"test_row", explained.test_row ? Json(*explained.test_row) : Json()},
        {"probability", explained.lime.probability},
        {"r2", explained.lime.r2},
        {"rules", std::move(rules)}}},
      {"provenance",
       {{"config_hash", trained.config_hash}, {"seed", config.seed}}},
  };
  if (config.timestamps) {
    const auto now = std::chrono::system_clock::to_time_t(
        std::chrono::system_clock::now());
    char stamp[32];
    std::strftime(stamp, sizeof(stamp), "%Y-%m-%dT%H:%M:%SZ",
                  std::gmtime(&now));
    doc["provenance"]["created_utc"] = stamp;
  }
  const auto path = config.out_dir / "run_report.json";
  WriteFileAtomic(path, doc.dump(2) + "\n");
  return path;
}

}  // namespace tabxai
