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

#ifndef COMPASS_COVERAGE_H_
#define COMPASS_COVERAGE_H_

// Cumulative block execution profiles, the saturation threshold, and the
// coverage frontier.

#include <compare>
#include <cstdint>
#include <map>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "compass/icfg.h"
#include "json.hpp"

namespace compass {

// (function name, block id).
struct BlockKey {
  std::string function;
  BlockId block;

  auto operator<=>(const BlockKey &) const = default;
  bool operator==(const BlockKey &) const = default;
};

// Per-block execution counts accumulated over a fuzzing interval. Absent keys
// read as zero.
class ProfileSnapshot {
 public:
  ProfileSnapshot() = default;
  explicit ProfileSnapshot(std::string tag) : tag_(std::move(tag)) {}

  const std::string &tag() const { return tag_; }
  void set_tag(std::string tag) { tag_ = std::move(tag); }

  uint64_t Count(std::string_view function, std::string_view block) const;
  // Adds `count` to the key. Throws Error(kInvalidInput) on 64-bit overflow.
  void Add(const BlockKey &key, uint64_t count);

  const std::map<BlockKey, uint64_t> &counts() const { return counts_; }
  bool empty() const { return counts_.empty(); }

  // Counts only; the tag is metadata.
  bool operator==(const ProfileSnapshot &other) const {
    return counts_ == other.counts_;
  }

 private:
  std::string tag_;
  std::map<BlockKey, uint64_t> counts_;
};

// Parses a profile: one {"fn","block","count"} per line. Duplicate keys are
// summed.
ProfileSnapshot LoadProfile(std::string_view source, std::string tag);
// Writes non-zero counts in key order.
std::string DumpProfile(const ProfileSnapshot &snapshot);

// Pointwise sum. Throws on overflow rather than wrapping.
ProfileSnapshot MergeProfiles(const ProfileSnapshot &a,
                              const ProfileSnapshot &b);

struct AnalysisConfig {
  static constexpr uint64_t kDefaultMaxExecCount = 50;
  static constexpr size_t kDefaultTopK = 20;

  uint64_t max_exec_count = kDefaultMaxExecCount;
  size_t top_k = kDefaultTopK;
  // Harness entry points; never reported as indirect-call-target compartments.
  std::vector<std::string> roots = {"main", "LLVMFuzzerTestOneInput"};

  // Throws Error(kInvalidInput) if top_k == 0.
  void Validate() const;

  bool operator==(const AnalysisConfig &) const = default;
};

// Snapshot resolved against an Icfg, indexed like the Icfg. Construction
// rejects keys that name unknown functions or blocks.
class BlockCounts {
 public:
  static BlockCounts Resolve(const Icfg &icfg, const ProfileSnapshot &snapshot);
  // All-zero counts shaped like `icfg`.
  static BlockCounts Zero(const Icfg &icfg);

  uint64_t at(BlockRef ref) const { return counts_[ref.function][ref.block]; }
  uint64_t entry(int function) const {
    return counts_[function][entries_[function]];
  }
  void Set(BlockRef ref, uint64_t count) {
    counts_[ref.function][ref.block] = count;
  }
  const std::vector<uint64_t> &function_counts(int function) const {
    return counts_[function];
  }

  bool operator==(const BlockCounts &) const = default;

 private:
  std::vector<std::vector<uint64_t>> counts_;
  std::vector<int> entries_;
};

// Count at the function's entry block. Throws Error(kNotFound) for an unknown
// function.
uint64_t EntryCount(const ProfileSnapshot &snapshot, const Icfg &icfg,
                    std::string_view function);

struct FrontierEdge {
  std::string function;
  BlockId from;
  BlockId to;
  uint64_t from_count = 0;

  bool operator==(const FrontierEdge &) const = default;
};

// Intraprocedural edges u->v with count(u) > max_exec_count and
// count(v) <= max_exec_count, ordered by (function, from, to).
std::vector<FrontierEdge> CoverageFrontier(const Icfg &icfg,
                                           const ProfileSnapshot &snapshot,
                                           const AnalysisConfig &config);

// Blocks covered by one input.
struct InputCoverage {
  std::string input;
  std::set<BlockKey> covered;

  bool Covers(std::string_view function, std::string_view block) const {
    return covered.contains(BlockKey{std::string(function), std::string(block)});
  }
  bool operator==(const InputCoverage &) const = default;
};

InputCoverage InputCoverageFromJson(const nlohmann::json &entry);
nlohmann::ordered_json InputCoverageToJson(const InputCoverage &coverage);
// One manifest entry per line, order preserved.
std::vector<InputCoverage> LoadCoverageManifest(std::string_view source);
std::string DumpCoverageManifest(std::span<const InputCoverage> corpus);

}  // namespace compass

#endif  // COMPASS_COVERAGE_H_
