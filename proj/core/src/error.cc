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

#include "tabxai/error.h"

namespace tabxai {

std::string_view ErrorCodeName(ErrorCode code) {
  switch (code) {
    case ErrorCode::kIo:
      return "E_IO";
    case ErrorCode::kParse:
      return "E_PARSE";
    case ErrorCode::kValidation:
      return "E_VALIDATION";
    case ErrorCode::kNumeric:
      return "E_NUMERIC";
  }
  return "E_UNKNOWN";
}

int ExitStatus(ErrorCode code) { return code == ErrorCode::kIo ? 2 : 1; }

}  // namespace tabxai
