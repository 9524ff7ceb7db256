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

#ifndef COMPASS_LABEL_SET_H_
#define COMPASS_LABEL_SET_H_

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>

#include "compass/coverage.h"

namespace compass {

// Data-flow provenance of a blocking conditional. Empty means unlabeled.
class LabelSet {
 public:
  enum Flag : uint8_t { kInput = 1, kHarness = 2 };

  constexpr LabelSet() = default;
  constexpr explicit LabelSet(uint8_t bits) : bits_(bits & 3) {}

  bool has(Flag f) const { return (bits_ & f) != 0; }
  bool empty() const { return bits_ == 0; }
  uint8_t bits() const { return bits_; }

  LabelSet &operator|=(LabelSet other) {
    bits_ |= other.bits_;
    return *this;
  }
  friend LabelSet operator|(LabelSet a, LabelSet b) { return a |= b; }
  bool operator==(const LabelSet &) const = default;

  // "I", "H", "IH" or "".
  std::string ToString() const {
    std::string s;
    if (has(kInput)) s += 'I';
    if (has(kHarness)) s += 'H';
    return s;
  }
  static std::optional<LabelSet> FromString(std::string_view s) {
    if (s.empty()) return LabelSet();
    if (s == "I") return LabelSet(kInput);
    if (s == "H") return LabelSet(kHarness);
    if (s == "IH") return LabelSet(kInput | kHarness);
    return std::nullopt;
  }

 private:
  uint8_t bits_ = 0;
};

// Conditional block -> union of observed labels.
using LabelMap = std::map<BlockKey, LabelSet>;

}  // namespace compass

#endif  // COMPASS_LABEL_SET_H_
