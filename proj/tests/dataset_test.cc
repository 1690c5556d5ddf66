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
#include <numeric>
#include <set>

#include "gmock/gmock.h"
#include "gtest/gtest.h"
#include "json.hpp"
#include "tabxai/error.h"
#include "tabxai/io.h"
#include "test_util.h"

namespace tabxai {
namespace {

using ::testing::HasSubstr;
using testing::CodeOf;
using testing::MessageOf;

TEST(LoadCsv, PimaShape) {
  const auto data = LoadCsv(testing::PimaPath(), "Outcome");
  EXPECT_EQ(data.num_rows(), 768u);
  EXPECT_EQ(data.num_features(), 8u);
  EXPECT_THAT(data.feature_names(),
              ::testing::ElementsAre("Pregnancies", "Glucose", "BloodPressure",
                                     "SkinThickness", "Insulin", "BMI",
                                     "DiabetesPedigreeFunction", "Age"));
  EXPECT_EQ(std::count(data.labels().begin(), data.labels().end(), 1), 268);
  // Row order preserved: first Kaggle row.
  EXPECT_DOUBLE_EQ(data.at(0, 1), 148.0);
  EXPECT_EQ(data.label(0), 1);
}

TEST(ParseCsv, MinimalInput) {
  const auto data = ParseCsv("x,y\n3.0,1", "y");
  ASSERT_EQ(data.num_rows(), 1u);
  ASSERT_EQ(data.num_features(), 1u);
  EXPECT_EQ(data.feature_names()[0], "x");
  EXPECT_DOUBLE_EQ(data.at(0, 0), 3.0);
  EXPECT_EQ(data.labels(), std::vector<Label>{1});
}

TEST(ParseCsv, LabelColumnAnywhere) {
  const auto data = ParseCsv("y,a,b\r\n0,1,2\r\n1,3,4\r\n\r\n", "y");
  EXPECT_EQ(data.feature_names(), (std::vector<std::string>{"a", "b"}));
  EXPECT_DOUBLE_EQ(data.at(1, 1), 4.0);
  EXPECT_EQ(data.labels(), (std::vector<Label>{0, 1}));
}

TEST(ParseCsv, NonNumericCellNamesRowAndColumn) {
  const auto fn = [] { ParseCsv("x,y\nabc,1\n", "y", "f.csv"); };
  EXPECT_EQ(CodeOf(fn), ErrorCode::kParse);
  EXPECT_THAT(MessageOf(fn), HasSubstr("row 2, column \"x\""));
}

TEST(ParseCsv, Errors) {
  EXPECT_EQ(CodeOf([] { ParseCsv("", "y"); }), ErrorCode::kParse);
  EXPECT_EQ(CodeOf([] { ParseCsv("x,x,y\n1,2,0\n", "y"); }), ErrorCode::kParse);
  EXPECT_EQ(CodeOf([] { ParseCsv("x,z\n1,0\n", "y"); }), ErrorCode::kParse);
  EXPECT_EQ(CodeOf([] { ParseCsv("x,y\n1,2\n", "y"); }), ErrorCode::kParse);
  EXPECT_EQ(CodeOf([] { ParseCsv("x,y\n1,0.5\n", "y"); }), ErrorCode::kParse);
  EXPECT_EQ(CodeOf([] { ParseCsv("x,y\n1\n", "y"); }), ErrorCode::kParse);
  EXPECT_EQ(CodeOf([] { ParseCsv("x,y\nnan,1\n", "y"); }), ErrorCode::kParse);
  EXPECT_THAT(MessageOf([] { ParseCsv("x,y\n1,0\n2,7\n", "y"); }),
              HasSubstr("row 3, column \"y\""));
}

TEST(LoadCsv, MissingFileIsIoError) {
  EXPECT_EQ(CodeOf([] { LoadCsv("/nonexistent/data.csv", "y"); }),
            ErrorCode::kIo);
}

TEST(TabularDataset, RejectsInvalidConstruction) {
  EXPECT_EQ(CodeOf([] { TabularDataset({"a", "a"}, {1, 2}, {0}); }),
            ErrorCode::kValidation);
  EXPECT_EQ(CodeOf([] { TabularDataset({""}, {1}, {0}); }),
            ErrorCode::kValidation);
  EXPECT_EQ(CodeOf([] { TabularDataset({"a"}, {1, 2}, {0}); }),
            ErrorCode::kValidation);
  EXPECT_EQ(CodeOf([] { TabularDataset({"a"}, {1}, {2}); }),
            ErrorCode::kValidation);
}

TEST(ComputeStats, SymmetricInterpolation) {
  const TabularDataset data({"v"}, {5, 1, 4, 2, 3}, {0, 1, 0, 1, 0});
  const auto s = ComputeStats(data)[0];
  EXPECT_DOUBLE_EQ(s.min, 1);
  EXPECT_DOUBLE_EQ(s.q1, 2);
  EXPECT_DOUBLE_EQ(s.median, 3);
  EXPECT_DOUBLE_EQ(s.q3, 4);
  EXPECT_DOUBLE_EQ(s.max, 5);
  EXPECT_DOUBLE_EQ(s.mean, 3);
  EXPECT_DOUBLE_EQ(s.std, std::sqrt(2.0));
}

TEST(ComputeStats, ConstantFeature) {
  const TabularDataset data({"v"}, {7, 7, 7}, {0, 1, 0});
  const auto s = ComputeStats(data)[0];
  EXPECT_EQ(s.mean, 7);
  EXPECT_EQ(s.std, 0);
  for (double q : {s.min, s.q1, s.median, s.q3, s.max}) EXPECT_EQ(q, 7);
}

TEST(ComputeStats, InterpolatesBetweenRanks) {
  // h = 3 * 0.25 = 0.75 -> 10 + 0.75 * 10.
  const TabularDataset data({"v"}, {40, 10, 30, 20}, {0, 0, 1, 1});
  const auto s = ComputeStats(data)[0];
  EXPECT_DOUBLE_EQ(s.q1, 17.5);
  EXPECT_DOUBLE_EQ(s.median, 25);
  EXPECT_DOUBLE_EQ(s.q3, 32.5);
}

TEST(ComputeStats, EmptyDatasetFails) {
  EXPECT_EQ(CodeOf([] { ComputeStats(TabularDataset({"a"}, {}, {})); }),
            ErrorCode::kValidation);
}

TEST(ComputeStats, PimaGlucoseMatchesGolden) {
  const auto data = LoadCsv(testing::PimaPath(), "Outcome");
  const auto stats = ComputeStats(data);
  const auto golden =
      nlohmann::json::parse(ReadFile(testing::GoldenPath("pima_glucose_stats.json")));
  const auto& g = stats[data.feature_index("Glucose")];
  EXPECT_NEAR(g.mean, golden["mean"].get<double>(), 1e-12);
  EXPECT_NEAR(g.std, golden["std"].get<double>(), 1e-12);
  EXPECT_EQ(g.min, golden["min"].get<double>());
  EXPECT_EQ(g.q1, golden["q1"].get<double>());
  EXPECT_EQ(g.median, golden["median"].get<double>());
  EXPECT_EQ(g.q3, golden["q3"].get<double>());
  EXPECT_EQ(g.max, golden["max"].get<double>());
}

TEST(ComputeStats, OrderedAndPermutationInvariant) {
  const auto data = testing::RandomDataset(97, 4, 11);
  std::vector<std::size_t> order(data.num_rows());
  std::iota(order.begin(), order.end(), std::size_t{0});
  Rng rng(3);
  for (std::size_t i = order.size(); i > 1; --i) {
    std::swap(order[i - 1], order[rng.UniformIndex(i)]);
  }
  const auto a = ComputeStats(data);
  const auto b = ComputeStats(data.Subset(order));
  for (std::size_t f = 0; f < a.size(); ++f) {
    const auto& s = a[f];
    EXPECT_LE(s.min, s.q1);
    EXPECT_LE(s.q1, s.median);
    EXPECT_LE(s.median, s.q3);
    EXPECT_LE(s.q3, s.max);
    EXPECT_GT(s.std, 0.0);
    EXPECT_EQ(s.mean, b[f].mean);
    EXPECT_EQ(s.std, b[f].std);
    EXPECT_EQ(s.median, b[f].median);
  }
}

TEST(ComputeStats, JsonFieldNames) {
  const TabularDataset data({"v"}, {1, 2}, {0, 1});
  const auto doc = nlohmann::json::parse(StatsToJson(ComputeStats(data)));
  std::set<std::string> keys;
  for (const auto& [key, value] : doc["v"].items()) keys.insert(key);
  EXPECT_EQ(keys, (std::set<std::string>{"mean", "std", "min", "q1", "median",
                                         "q3", "max"}));
}

TEST(Split, PimaStratified) {
  const auto data = LoadCsv(testing::PimaPath(), "Outcome");
  const auto split = Split(data, {0.30, 42, true});
  EXPECT_TRUE(split.test.num_rows() == 230 || split.test.num_rows() == 231);
  const auto ones = std::count(split.test.labels().begin(),
                               split.test.labels().end(), 1);
  EXPECT_GT(ones, 0);
  EXPECT_LT(ones, static_cast<long>(split.test.num_rows()));
  const double full_rate = 268.0 / 768.0;
  const double test_rate =
      static_cast<double>(ones) / static_cast<double>(split.test.num_rows());
  EXPECT_LE(std::abs(test_rate - full_rate),
            1.0 / static_cast<double>(split.test.num_rows()));
}

TEST(Split, TwoRowsOnePerClass) {
  const TabularDataset data({"x"}, {1, 2}, {0, 1});
  const auto split = Split(data, {0.5, 1, true});
  ASSERT_EQ(split.train.num_rows(), 1u);
  ASSERT_EQ(split.test.num_rows(), 1u);
  EXPECT_NE(split.train.label(0), split.test.label(0));
}

TEST(Split, EmptyPartitionFails) {
  const auto data = testing::RandomDataset(10, 2, 1);
  EXPECT_EQ(CodeOf([&] { Split(data, {0.01, 1, true}); }),
            ErrorCode::kValidation);
  EXPECT_EQ(CodeOf([&] { Split(data, {0.99, 1, false}); }),
            ErrorCode::kValidation);
  EXPECT_EQ(CodeOf([&] { Split(data, {1.0, 1, false}); }),
            ErrorCode::kValidation);
  EXPECT_EQ(CodeOf([] { Split(TabularDataset({"a"}, {1}, {0}), {0.5, 1, true}); }),
            ErrorCode::kValidation);
}

TEST(Split, DeterministicPerSeed) {
  const auto data = LoadCsv(testing::PimaPath(), "Outcome");
  const auto a = Split(data, {0.3, 9, true});
  const auto b = Split(data, {0.3, 9, true});
  const auto c = Split(data, {0.3, 10, true});
  EXPECT_EQ(a.test_indices, b.test_indices);
  EXPECT_NE(a.test_indices, c.test_indices);
}

// Round trip, disjointness and stratification over many seeds and sizes.
TEST(Split, PartitionProperties) {
  for (uint64_t seed = 0; seed < 40; ++seed) {
    Rng rng(seed);
    const std::size_t n = 2 + rng.UniformIndex(200);
    const double fraction = 0.1 + 0.8 * rng.Uniform01();
    const auto data = testing::RandomDataset(
        n, 3, seed, [&](std::span<const double> row, std::size_t) {
          return row[1] < 0.3 ? 1 : 0;
        });
    const auto expected_test =
        static_cast<std::size_t>(std::llround(static_cast<double>(n) * fraction));
    if (expected_test == 0 || expected_test == n) continue;
    for (bool stratified : {true, false}) {
      const auto split = Split(data, {fraction, seed, stratified});
      ASSERT_EQ(split.test.num_rows(), expected_test);
      std::vector<std::size_t> all = split.train_indices;
      all.insert(all.end(), split.test_indices.begin(), split.test_indices.end());
      std::sort(all.begin(), all.end());
      std::vector<std::size_t> iota(n);
      std::iota(iota.begin(), iota.end(), std::size_t{0});
      ASSERT_EQ(all, iota) << "seed " << seed;
      for (std::size_t i = 0; i < split.test_indices.size(); ++i) {
        const auto r = data.row(split.test_indices[i]);
        ASSERT_TRUE(std::equal(r.begin(), r.end(), split.test.row(i).begin()));
      }
      if (stratified) {
        const auto full_ones =
            std::count(data.labels().begin(), data.labels().end(), 1);
        const auto test_ones = std::count(split.test.labels().begin(),
                                          split.test.labels().end(), 1);
        const double gap = std::abs(
            static_cast<double>(test_ones) / static_cast<double>(expected_test) -
            static_cast<double>(full_ones) / static_cast<double>(n));
        EXPECT_LE(gap, 1.0 / static_cast<double>(expected_test) + 1e-12)
            << "seed " << seed;
      }
    }
  }
}

}  // namespace
}  // namespace tabxai
