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

#ifndef TABXAI_TESTS_TEST_UTIL_H_
#define TABXAI_TESTS_TEST_UTIL_H_

#include <cstdint>
#include <filesystem>
#include <map>
#include <functional>
#include <string>
#include <vector>

#include "gtest/gtest.h"
#include "tabxai/dataset.h"
#include "tabxai/error.h"
#include "tabxai/io.h"
#include "tabxai/random.h"

namespace tabxai::testing {

inline std::filesystem::path PimaPath() {
  return std::filesystem::path(TABXAI_DATA_DIR) / "diabetes.csv";
}

inline std::filesystem::path GoldenPath(const std::string& name) {
  return std::filesystem::path(TABXAI_GOLDEN_DIR) / name;
}

// Code of the tabxai::Error thrown by fn; records a failure otherwise.
inline ErrorCode CodeOf(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "expected tabxai::Error";
  return static_cast<ErrorCode>(-1);
}

inline std::string MessageOf(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.what();
  }
  return {};
}

// Relative path -> file contents for every regular file under dir.
inline std::map<std::string, std::string> DirectoryContents(
    const std::filesystem::path& dir) {
  std::map<std::string, std::string> files;
  for (const auto& entry : std::filesystem::recursive_directory_iterator(dir)) {
    if (entry.is_regular_file()) {
      files[std::filesystem::relative(entry.path(), dir).string()] =
          ReadFile(entry.path());
    }
  }
  return files;
}

// Fresh empty directory under the system temp dir.
inline std::filesystem::path ScratchDir(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / ("tabxai_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

inline std::vector<std::string> Names(std::size_t m) {
  std::vector<std::string> names;
  for (std::size_t f = 0; f < m; ++f) names.push_back("x" + std::to_string(f));
  return names;
}

// n x m uniform values in [lo, hi); labels from `rule`, or alternating.
template <typename Rule>
TabularDataset RandomDataset(std::size_t n, std::size_t m, uint64_t seed,
                             Rule rule, double lo = 0.0, double hi = 1.0) {
  Rng rng(seed);
  std::vector<double> values(n * m);
  std::vector<Label> labels(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t f = 0; f < m; ++f) {
      values[i * m + f] = lo + (hi - lo) * rng.Uniform01();
    }
    labels[i] = rule(std::span<const double>(values.data() + i * m, m), i);
  }
  return TabularDataset(Names(m), std::move(values), std::move(labels));
}

inline TabularDataset RandomDataset(std::size_t n, std::size_t m,
                                    uint64_t seed) {
  return RandomDataset(n, m, seed, [](std::span<const double> row, std::size_t i) {
    return (row[0] + 0.1 * static_cast<double>(i % 3) > 0.55) ? 1 : 0;
  });
}

}  // namespace tabxai::testing

#endif  // TABXAI_TESTS_TEST_UTIL_H_
