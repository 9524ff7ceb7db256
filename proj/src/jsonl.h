// Copyright 2026 The Compass Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef COMPASS_SRC_JSONL_H_
#define COMPASS_SRC_JSONL_H_

// Helpers for the line-oriented record formats.

#include <cstdint>
#include <string>
#include <string_view>

#include "compass/error.h"
#include "json.hpp"

namespace compass::internal {

// Calls `fn(record, line_number)` for every non-blank line of `source`.
// Lines that are not JSON objects raise "malformed record at line k".
template <typename Fn>
void ForEachRecord(std::string_view source, Fn &&fn) {
  size_t line_no = 0;
  size_t pos = 0;
  while (pos <= source.size()) {
    size_t end = source.find('\n', pos);
    if (end == std::string_view::npos) end = source.size();
    std::string_view line = source.substr(pos, end - pos);
    ++line_no;
    pos = end + 1;
    if (line.find_first_not_of(" \t\r") == std::string_view::npos) {
      if (end == source.size()) break;
      continue;
    }
    nlohmann::json record = nlohmann::json::parse(line, nullptr, false);
    if (record.is_discarded() || !record.is_object()) {
      ThrowInvalid("malformed record at line " + std::to_string(line_no));
    }
    fn(record, line_no);
    if (end == source.size()) break;
  }
}

inline std::string RequireString(const nlohmann::json &record,
                                 const char *key, size_t line_no) {
  auto it = record.find(key);
  if (it == record.end() || !it->is_string()) {
    ThrowInvalid("malformed record at line " + std::to_string(line_no) +
                 ": missing string \"" + key + "\"");
  }
  return it->get<std::string>();
}

// Reads a non-negative integer count. Negative values raise
// "negative count at line k".
inline uint64_t RequireCount(const nlohmann::json &record, const char *key,
                             size_t line_no) {
  auto it = record.find(key);
  if (it == record.end() || !it->is_number_integer()) {
    ThrowInvalid("malformed record at line " + std::to_string(line_no) +
                 ": missing integer \"" + key + "\"");
  }
  if (it->is_number_unsigned()) return it->get<uint64_t>();
  int64_t value = it->get<int64_t>();
  if (value < 0) {
    ThrowInvalid("negative count at line " + std::to_string(line_no));
  }
  return static_cast<uint64_t>(value);
}

}  // namespace compass::internal

#endif  // COMPASS_SRC_JSONL_H_
