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

#ifndef TABXAI_IO_H_
#define TABXAI_IO_H_

#include <filesystem>
#include <string>
#include <string_view>

namespace tabxai {

// Shortest decimal that round-trips to the same double.
std::string FormatDouble(double value);

// Fixed-point with the given number of decimals.
std::string FormatFixed(double value, int decimals);

std::string ReadFile(const std::filesystem::path& path);

// Writes to a sibling temporary file, then renames over `path`.
void WriteFileAtomic(const std::filesystem::path& path,
                     std::string_view contents);

// "# config_hash=<hash>\n", or nothing for an empty hash.
std::string CsvPreamble(std::string_view config_hash);

// 16 lowercase hex digits.
std::string HexDigest(unsigned long long value);

}  // namespace tabxai

#endif  // TABXAI_IO_H_
