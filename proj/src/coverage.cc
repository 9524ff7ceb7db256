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

#include "compass/coverage.h"

#include <algorithm>
#include <limits>
#include <tuple>

#include "compass/error.h"
#include "jsonl.h"

namespace compass {

using nlohmann::json;

uint64_t ProfileSnapshot::Count(std::string_view function,
                                std::string_view block) const {
  auto it = counts_.find(BlockKey{std::string(function), std::string(block)});
  return it == counts_.end() ? 0 : it->second;
}

void ProfileSnapshot::Add(const BlockKey &key, uint64_t count) {
  if (count == 0) return;
  uint64_t &slot = counts_[key];
  if (slot > std::numeric_limits<uint64_t>::max() - count) {
    ThrowInvalid("count overflow at " + key.function + ":" + key.block);
  }
  slot += count;
}

ProfileSnapshot LoadProfile(std::string_view source, std::string tag) {
  ProfileSnapshot snapshot(std::move(tag));
  internal::ForEachRecord(source, [&](const json &r, size_t line) {
    BlockKey key{internal::RequireString(r, "fn", line),
                 internal::RequireString(r, "block", line)};
    snapshot.Add(key, internal::RequireCount(r, "count", line));
  });
  return snapshot;
}

std::string DumpProfile(const ProfileSnapshot &snapshot) {
  std::string out;
  for (const auto &[key, count] : snapshot.counts()) {
    if (count == 0) continue;
    nlohmann::ordered_json r;
    r["fn"] = key.function;
    r["block"] = key.block;
    r["count"] = count;
    out += r.dump();
    out += '\n';
  }
  return out;
}

ProfileSnapshot MergeProfiles(const ProfileSnapshot &a,
                              const ProfileSnapshot &b) {
  std::string tag;
  if (a.tag().empty() || a.tag() == b.tag()) {
    tag = b.tag();
  } else if (b.tag().empty()) {
    tag = a.tag();
  } else {
    tag = a.tag() + "+" + b.tag();
  }
  ProfileSnapshot out(std::move(tag));
  for (const auto &[key, count] : a.counts()) out.Add(key, count);
  for (const auto &[key, count] : b.counts()) out.Add(key, count);
  return out;
}

void AnalysisConfig::Validate() const {
  if (top_k == 0) ThrowInvalid("top_k must be at least 1");
}

BlockCounts BlockCounts::Zero(const Icfg &icfg) {
  BlockCounts c;
  c.counts_.resize(icfg.function_count());
  c.entries_.resize(icfg.function_count());
  for (int f = 0; f < static_cast<int>(icfg.function_count()); ++f) {
    c.counts_[f].assign(icfg.function(f).blocks.size(), 0);
    c.entries_[f] = icfg.entry_block(f);
  }
  return c;
}

BlockCounts BlockCounts::Resolve(const Icfg &icfg,
                                 const ProfileSnapshot &snapshot) {
  BlockCounts c = Zero(icfg);
  for (const auto &[key, count] : snapshot.counts()) {
    auto ref = icfg.FindBlock(key.function, key.block);
    if (!ref) {
      ThrowInvalid("snapshot references unknown block " + key.function + ":" +
                   key.block);
    }
    c.counts_[ref->function][ref->block] = count;
  }
  return c;
}

uint64_t EntryCount(const ProfileSnapshot &snapshot, const Icfg &icfg,
                    std::string_view function) {
  auto f = icfg.FindFunction(function);
  if (!f) ThrowNotFound("unknown function " + std::string(function));
  const FunctionRecord &fn = icfg.function(*f);
  return snapshot.Count(fn.name, fn.entry);
}

std::vector<FrontierEdge> CoverageFrontier(const Icfg &icfg,
                                           const ProfileSnapshot &snapshot,
                                           const AnalysisConfig &config) {
  const BlockCounts counts = BlockCounts::Resolve(icfg, snapshot);
  const uint64_t theta = config.max_exec_count;
  std::vector<FrontierEdge> out;
  for (int f : icfg.functions_by_name()) {
    const FunctionRecord &fn = icfg.function(f);
    const size_t first = out.size();
    for (int u = 0; u < static_cast<int>(fn.blocks.size()); ++u) {
      const uint64_t from_count = counts.at({f, u});
      if (from_count <= theta) continue;
      for (int v : icfg.successors(f, u)) {
        if (counts.at({f, v}) > theta) continue;
        out.push_back({fn.name, fn.blocks[u].id, fn.blocks[v].id, from_count});
      }
    }
    std::sort(out.begin() + first, out.end(),
              [](const FrontierEdge &a, const FrontierEdge &b) {
                return std::tie(a.from, a.to) < std::tie(b.from, b.to);
              });
  }
  return out;
}

InputCoverage InputCoverageFromJson(const json &entry) {
  if (!entry.is_object()) ThrowInvalid("coverage entry must be an object");
  InputCoverage cov;
  auto name = entry.find("input");
  if (name == entry.end() || !name->is_string()) {
    ThrowInvalid("coverage entry: missing string \"input\"");
  }
  cov.input = name->get<std::string>();
  auto covered = entry.find("covered");
  if (covered == entry.end() || !covered->is_array()) {
    ThrowInvalid("coverage entry " + cov.input + ": missing array \"covered\"");
  }
  for (const json &b : *covered) {
    if (!b.is_object() || !b.contains("fn") || !b.contains("block") ||
        !b["fn"].is_string() || !b["block"].is_string()) {
      ThrowInvalid("coverage entry " + cov.input +
                   ": covered items need string \"fn\" and \"block\"");
    }
    cov.covered.insert({b["fn"].get<std::string>(), b["block"].get<std::string>()});
  }
  return cov;
}

nlohmann::ordered_json InputCoverageToJson(const InputCoverage &coverage) {
  nlohmann::ordered_json entry;
  entry["input"] = coverage.input;
  nlohmann::ordered_json covered = nlohmann::ordered_json::array();
  for (const BlockKey &k : coverage.covered) {
    covered.push_back({{"fn", k.function}, {"block", k.block}});
  }
  entry["covered"] = std::move(covered);
  return entry;
}

std::vector<InputCoverage> LoadCoverageManifest(std::string_view source) {
  std::vector<InputCoverage> out;
  internal::ForEachRecord(source, [&](const json &r, size_t line) {
    try {
      out.push_back(InputCoverageFromJson(r));
    } catch (const Error &e) {
      ThrowInvalid(std::string(e.what()) + " at line " + std::to_string(line));
    }
  });
  return out;
}

std::string DumpCoverageManifest(std::span<const InputCoverage> corpus) {
  std::string out;
  for (const InputCoverage &c : corpus) {
    out += InputCoverageToJson(c).dump();
    out += '\n';
  }
  return out;
}

}  // namespace compass
