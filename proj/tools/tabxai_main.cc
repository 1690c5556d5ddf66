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

// Command-line front end: ingest -> train -> evaluate -> explain -> emit.
//
//   tabxai train   --data data/diabetes.csv --out out
//   tabxai explain --row 3 --global
//   tabxai effects --feature Age --pair Glucose:Age
//   tabxai report  --seed 7 --out out7
//
// Exit status: 0 success, 1 validation failure, 2 I/O failure. Failures
// print one line "error: <CODE>: <message>" on stderr.

#include <cstdio>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "tabxai/error.h"
#include "tabxai/io.h"
#include "tabxai/pipeline.h"

namespace {

struct CommonFlags {
  std::string config;
  std::string data;
  std::string label;
  std::string seed;
  std::string out;
  std::string threads;
};

struct ExplainFlags {
  std::string model;
  std::optional<std::size_t> row;
  std::string values;
  bool profile = false;
  bool global = false;
};

struct EffectsFlags {
  std::string model;
  std::vector<std::string> features;
  std::vector<std::string> pairs;
  std::string grid;
  std::string resolution;
};

void AddCommonFlags(CLI::App& app, CommonFlags& flags) {
  app.add_option("--config", flags.config, "Flat key = value config file");
  app.add_option("--data", flags.data, "CSV dataset with a header row");
  app.add_option("--label", flags.label, "Label column (0/1)");
  app.add_option("--seed", flags.seed, "Master seed");
  app.add_option("--out", flags.out, "Output directory");
  app.add_option("--threads", flags.threads,
                 "Worker threads (0 = all cores; never changes results)");
}

// Defaults, then the config file, then explicit flags.
tabxai::RunConfig ResolveConfig(const CommonFlags& flags) {
  tabxai::RunConfig config;
  if (!flags.config.empty()) tabxai::ApplyConfigFile(flags.config, config);
  const std::pair<const char*, const std::string*> overrides[] = {
      {"data", &flags.data},     {"label", &flags.label},
      {"seed", &flags.seed},     {"out", &flags.out},
      {"threads", &flags.threads},
  };
  for (const auto& [key, value] : overrides) {
    if (!value->empty()) tabxai::ApplyConfigValue(key, *value, config);
  }
  return config;
}

std::vector<double> ParseValues(const std::string& text) {
  std::vector<double> values;
  std::size_t start = 0;
  while (start <= text.size()) {
    auto comma = text.find(',', start);
    if (comma == std::string::npos) comma = text.size();
    const std::string item = text.substr(start, comma - start);
    try {
      std::size_t used = 0;
      values.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      tabxai::Fail(tabxai::ErrorCode::kValidation,
                   "--values: not a number: \"" + item + "\"");
    }
    start = comma + 1;
  }
  return values;
}

std::filesystem::path ModelPath(const std::string& flag,
                                const tabxai::RunConfig& config) {
  return flag.empty() ? config.out_dir / "model.json"
                      : std::filesystem::path(flag);
}

void PrintLocal(const tabxai::ExplainResult& result) {
  if (result.test_row) {
    std::cout << "instance: test row " << *result.test_row << "\n";
  } else {
    std::cout << "instance: inline values\n";
  }
  std::cout << "P(class 1) = " << tabxai::FormatFixed(result.exact.prediction, 4)
            << "\nexact SHAP base value = "
            << tabxai::FormatFixed(result.exact.base_value, 4)
            << ", efficiency residual = "
            << tabxai::FormatDouble(result.exact.EfficiencyResidual()) << "\n";
  std::cout << "LIME (r2 = " << tabxai::FormatFixed(result.lime.r2, 3) << "):\n";
  for (const auto& rule : result.lime.rules) {
    std::printf("  %-36s %+.4f\n", rule.rule.c_str(), rule.weight);
  }
}

int Run(int argc, char** argv) {
  CLI::App app{"Random-forest training and model-agnostic explanations for "
               "tabular data"};
  app.require_subcommand(1);

  CommonFlags common;
  auto* train = app.add_subcommand("train", "Fit the forest and evaluate it");
  auto* explain = app.add_subcommand(
      "explain", "SHAP (exact + sampled) and LIME for one instance");
  auto* effects = app.add_subcommand("effects", "PDP, ICE and ALE curves");
  auto* report = app.add_subcommand(
      "report", "Full pipeline: train, explain, effects and run_report.json");
  for (auto* sub : {train, explain, effects, report}) {
    AddCommonFlags(*sub, common);
  }

  ExplainFlags ex;
  explain->add_option("--model", ex.model, "Model JSON (default <out>/model.json)");
  auto* row_opt = explain->add_option("--row", ex.row, "Test-split row index");
  auto* values_opt =
      explain->add_option("--values", ex.values, "Comma-separated feature values");
  auto* profile_opt = explain->add_flag(
      "--profile", ex.profile,
      "Test row nearest to the configured reference profile");
  row_opt->excludes(values_opt)->excludes(profile_opt);
  values_opt->excludes(profile_opt);
  explain->add_flag("--global", ex.global,
                    "Also emit importance, summary and dependence series");

  EffectsFlags ef;
  effects->add_option("--model", ef.model, "Model JSON (default <out>/model.json)");
  effects->add_option("--feature", ef.features, "Feature for PDP/ICE/ALE");
  effects->add_option("--pair", ef.pairs, "Feature pair A:B for a 2-D PDP");
  effects->add_option("--grid", ef.grid, "quantile (default) or uniform");
  effects->add_option("--resolution", ef.resolution, "Grid points per feature");

  bool timestamps = false;
  report->add_flag("--timestamps", timestamps,
                   "Record wall-clock time in run_report.json");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: E_USAGE: " << e.what() << "\n";
    return 1;
  }

  tabxai::RunConfig config = ResolveConfig(common);

  if (train->parsed()) {
    const auto result = tabxai::RunTrain(config);
    std::cout << tabxai::ReportToText(result.report) << "\nconfig_hash "
              << result.config_hash << "\nwrote "
              << (config.out_dir / "model.json").string() << "\n";
  } else if (explain->parsed()) {
    tabxai::InstanceSelector selector = tabxai::InstanceSelector::TestRow(0);
    if (ex.row) selector = tabxai::InstanceSelector::TestRow(*ex.row);
    if (!ex.values.empty()) {
      selector = tabxai::InstanceSelector::Values(ParseValues(ex.values));
    }
    if (ex.profile) selector = tabxai::InstanceSelector::NearestProfile();
    const auto result = tabxai::RunExplain(config, ModelPath(ex.model, config),
                                           selector, ex.global);
    PrintLocal(result);
    if (!result.importance.empty()) {
      std::cout << "global importance (mean |SHAP|):\n";
      for (const auto& item : result.importance) {
        std::printf("  %-26s %.4f\n", item.feature.c_str(), item.importance);
      }
    }
    for (const auto& path : result.files) {
      std::cout << "wrote " << path.string() << "\n";
    }
  } else if (effects->parsed()) {
    if (!ef.grid.empty()) tabxai::ApplyConfigValue("effects.grid", ef.grid, config);
    if (!ef.resolution.empty()) {
      tabxai::ApplyConfigValue("effects.resolution", ef.resolution, config);
    }
    auto features = config.effect_features;
    auto pairs = config.effect_pairs;
    if (!ef.features.empty() || !ef.pairs.empty()) {
      features = ef.features;
      pairs.clear();
      for (const auto& p : ef.pairs) {
        const auto colon = p.find(':');
        if (colon == std::string::npos) {
          tabxai::Fail(tabxai::ErrorCode::kValidation,
                       "--pair expects A:B, got \"" + p + "\"");
        }
        pairs.emplace_back(p.substr(0, colon), p.substr(colon + 1));
      }
    }
    for (const auto& path : tabxai::RunEffects(
             config, ModelPath(ef.model, config), features, pairs)) {
      std::cout << "wrote " << path.string() << "\n";
    }
  } else if (report->parsed()) {
    config.timestamps = config.timestamps || timestamps;
    std::cout << "wrote " << tabxai::RunReport(config).string() << "\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return Run(argc, argv);
  } catch (const tabxai::Error& e) {
    std::cerr << "error: " << tabxai::ErrorCodeName(e.code()) << ": "
              << e.what() << "\n";
    return tabxai::ExitStatus(e.code());
  } catch (const std::exception& e) {
    std::cerr << "error: E_INTERNAL: " << e.what() << "\n";
    return 1;
  }
}
