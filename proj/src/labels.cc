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

#include "compass/labels.h"

#include "compass/error.h"
#include "jsonl.h"

namespace compass {

using nlohmann::json;

LabelMap LoadLabels(std::string_view source) {
  LabelMap map;
  internal::ForEachRecord(source, [&](const json &r, size_t line) {
    BlockKey key{internal::RequireString(r, "fn", line),
                 internal::RequireString(r, "block", line)};
    auto labels = r.find("labels");
    if (labels == r.end() || !labels->is_array()) {
      ThrowInvalid("malformed record at line " + std::to_string(line) +
                   ": missing array \"labels\"");
    }
    LabelSet set;
    for (const json &l : *labels) {
      if (l == "input") {
        set |= LabelSet(LabelSet::kInput);
      } else if (l == "harness") {
        set |= LabelSet(LabelSet::kHarness);
      } else {
        ThrowInvalid("unknown label at line " + std::to_string(line));
      }
    }
    map[key] |= set;
  });
  return map;
}

std::string DumpLabels(const LabelMap &labels) {
  std::string out;
  for (const auto &[key, set] : labels) {
    nlohmann::ordered_json r;
    r["fn"] = key.function;
    r["block"] = key.block;
    nlohmann::ordered_json names = nlohmann::ordered_json::array();
    if (set.has(LabelSet::kInput)) names.push_back("input");
    if (set.has(LabelSet::kHarness)) names.push_back("harness");
    r["labels"] = std::move(names);
    out += r.dump();
    out += '\n';
  }
  return out;
}

namespace {

void AnnotateOne(Compartment &c, const LabelMap &labels) {
  c.labels = LabelSet();
  if (c.kind != CompartmentKind::kFrontier) return;
  auto it = labels.find(BlockKey{c.function, c.conditional_block});
  if (it != labels.end()) c.labels = it->second;
}

}  // namespace

CompartmentReport Annotate(CompartmentReport report, const LabelMap &labels) {
  for (Compartment &c : report.entries) AnnotateOne(c, labels);
  for (Compartment &c : report.closed) AnnotateOne(c, labels);
  return report;
}

}  // namespace compass
