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

#ifndef COMPASS_COMPARTMENTS_H_
#define COMPASS_COMPARTMENTS_H_

// Compartment weighting, candidate enumeration, ranking, what-if unlocking and
// stability measures.
//
// A compartment is an under-covered entry block b together with everything it
// dominates and every function reachable only through calls made from that
// region. Its weight is the instruction count of that code:
//
//   block_weight = size(b) + sum of sizes of b's dominator-tree descendants
//   calls_weight = sum of sizes of functions reached depth-first from calls in
//                  the region, stopping at any function that was already
//                  visited, whose entry count exceeds the threshold, or that
//                  has more than one incoming call site.
//
// A block executed more than the threshold has weight zero.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "compass/coverage.h"
#include "compass/icfg.h"
#include "compass/label_set.h"

namespace compass {

// The static program facts the weighting needs, built once per session.
class ProgramModel {
 public:
  ProgramModel(Icfg icfg, CallGraph call_graph);
  static ProgramModel Build(Icfg icfg, std::span<const DynamicCallEdge> edges);

  const Icfg &icfg() const { return icfg_; }
  const CallGraph &call_graph() const { return call_graph_; }
  const DominatorTree &dominators(int function) const {
    return dominators_[function];
  }

 private:
  Icfg icfg_;
  CallGraph call_graph_;
  std::vector<DominatorTree> dominators_;
};

struct WeightBreakdown {
  uint64_t block_weight = 0;
  uint64_t calls_weight = 0;
  uint64_t total = 0;

  static WeightBreakdown Of(uint64_t block, uint64_t calls) {
    return {block, calls, block + calls};
  }
  bool operator==(const WeightBreakdown &) const = default;
};

// Weight of code uniquely reachable through a call to `function`. `visited` is
// indexed by function and shared across one BlockWeight evaluation. Functions
// whose size was counted are appended to `contributors` when non-null.
uint64_t CallsWeight(const ProgramModel &model, int function,
                     std::vector<bool> &visited, const BlockCounts &counts,
                     uint64_t max_exec_count,
                     std::vector<int> *contributors = nullptr);

// Throws Error(kInvalidInput) if `block` is unreachable from its function's
// entry (it has no place in the dominator tree).
WeightBreakdown BlockWeight(const ProgramModel &model, BlockRef block,
                            const BlockCounts &counts, uint64_t max_exec_count,
                            std::vector<int> *contributors = nullptr);

enum class CompartmentKind { kFrontier, kIndirectTarget };
enum class CompartmentStatus { kLocked, kUnlocked, kResolved };

std::string_view ToString(CompartmentKind kind);
std::string_view ToString(CompartmentStatus status);
std::optional<CompartmentKind> ParseCompartmentKind(std::string_view s);
std::optional<CompartmentStatus> ParseCompartmentStatus(std::string_view s);

struct Compartment {
  std::string id;  // "fn:entry_block"
  std::string function;
  BlockId block;
  CompartmentKind kind = CompartmentKind::kFrontier;
  WeightBreakdown weight;
  // Blocking conditional; empty/zero for indirect-call targets.
  BlockId conditional_block;
  uint64_t conditional_count = 0;
  std::string conditional_loc;
  std::string entry_loc;
  LabelSet labels;
  CompartmentStatus status = CompartmentStatus::kLocked;
  std::string input;     // corpus input reaching the conditional
  std::string solution;  // corpus input covering the entry block
  size_t rank = 0;       // 1-based within the locked list, 0 when closed

  static std::string MakeId(std::string_view function, std::string_view block);
  bool operator==(const Compartment &) const = default;
};

// Where a report's artifacts came from, so later commands can reload them.
struct ReportSources {
  std::string icfg;
  std::vector<std::string> profiles;
  std::string callgraph;
  std::string labels;
  std::string corpus;

  bool empty() const { return icfg.empty(); }
  bool operator==(const ReportSources &) const = default;
};

struct CompartmentReport {
  AnalysisConfig config;
  std::string snapshot_tag;
  // Locked compartments, rank order: total weight desc, function asc, block
  // asc. Ranks are 1..n.
  std::vector<Compartment> entries;
  // Unlocked or resolved compartments in the order they were closed.
  std::vector<Compartment> closed;
  ReportSources sources;

  const Compartment *Find(std::string_view id) const;
  bool operator==(const CompartmentReport &) const = default;
};

// Frontier successors (with their hottest conditional) plus under-covered
// entries of functions with no direct call sites, excluding configured roots
// and blocks unreachable within their function. Weights are left empty.
std::vector<Compartment> EnumerateCandidates(const ProgramModel &model,
                                             const BlockCounts &counts,
                                             const AnalysisConfig &config);

// Weighs every candidate, sorts by the report order and keeps top_k.
CompartmentReport RankCompartments(std::vector<Compartment> candidates,
                                   const ProgramModel &model,
                                   const BlockCounts &counts,
                                   const AnalysisConfig &config,
                                   std::string snapshot_tag);

// `base` with every closed compartment's region raised to at least
// max_exec_count + 1, applied in closing order. The region is the entry
// block, its dominator-tree descendants and all blocks of the functions that
// contributed to its calls weight.
BlockCounts HypotheticalCounts(const ProgramModel &model, BlockCounts base,
                               std::span<const Compartment> closed,
                               uint64_t max_exec_count);

// Re-ranks `report` as if compartment `id` were unlocked. The compartment
// moves to `closed` with `status`. Annotations of surviving entries carry
// over. Throws Error(kNotFound) "unknown compartment <id>" if `id` is not a
// locked entry.
CompartmentReport WhatIfUnlock(const CompartmentReport &report,
                               std::string_view id, const ProgramModel &model,
                               const BlockCounts &base,
                               CompartmentStatus status =
                                   CompartmentStatus::kResolved);

// Number of locked entries whose entry block is still at or below the
// report's threshold in `later`. With `icfg`, keys of `later` are checked
// against it first.
size_t StillLocked(const CompartmentReport &report,
                   const ProfileSnapshot &later, const Icfg *icfg = nullptr);

struct OverlapResult {
  size_t overlap = 0;
  size_t k = 0;
  // Set when k exceeded either report's length.
  bool truncated = false;
};

OverlapResult TopKOverlap(const CompartmentReport &a,
                          const CompartmentReport &b, size_t k);

}  // namespace compass

#endif  // COMPASS_COMPARTMENTS_H_
