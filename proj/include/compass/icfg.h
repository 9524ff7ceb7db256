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

#ifndef COMPASS_ICFG_H_
#define COMPASS_ICFG_H_

// Interprocedural control-flow graph: functions, basic blocks, intraprocedural
// successor edges and call sites. Also the per-function dominator tree and the
// call graph augmented with dynamically observed indirect-call edges.

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "json.hpp"

namespace compass {

using BlockId = std::string;

struct CallSiteRecord {
  enum class Kind { kDirect, kIndirect };

  Kind kind = Kind::kDirect;
  // Callee name for kDirect, site identifier for kIndirect.
  std::string name;

  static CallSiteRecord Direct(std::string target) {
    return {Kind::kDirect, std::move(target)};
  }
  static CallSiteRecord Indirect(std::string site) {
    return {Kind::kIndirect, std::move(site)};
  }
  bool operator==(const CallSiteRecord &) const = default;
};

struct BasicBlockRecord {
  BlockId id;
  uint64_t size = 0;  // IR instruction count, >= 1
  std::vector<BlockId> succs;
  std::string loc;  // "file:line"
  std::vector<CallSiteRecord> calls;

  bool operator==(const BasicBlockRecord &) const = default;
};

struct FunctionRecord {
  std::string name;
  uint64_t size = 0;  // sum of block sizes
  BlockId entry;
  std::vector<BasicBlockRecord> blocks;

  bool operator==(const FunctionRecord &) const = default;
};

// Indexed view of a block: (function index, block index).
struct BlockRef {
  int function = -1;
  int block = -1;

  bool operator==(const BlockRef &) const = default;
  auto operator<=>(const BlockRef &) const = default;
};

struct IndirectSiteInfo {
  std::string site;
  BlockRef owner;
};

// Validated, immutable ICFG. All ids are resolved to indices at construction.
class Icfg {
 public:
  Icfg() = default;

  // Validates `functions` and builds the index. Throws Error(kInvalidInput)
  // naming the offending entity.
  static Icfg Build(std::vector<FunctionRecord> functions);

  const std::vector<FunctionRecord> &functions() const { return functions_; }
  const FunctionRecord &function(int index) const { return functions_[index]; }
  size_t function_count() const { return functions_.size(); }

  std::optional<int> FindFunction(std::string_view name) const;
  std::optional<BlockRef> FindBlock(std::string_view function,
                                    std::string_view block) const;
  const BasicBlockRecord &block(BlockRef ref) const {
    return functions_[ref.function].blocks[ref.block];
  }
  int entry_block(int function) const { return entry_[function]; }
  // Successor block indices of `block` within `function`.
  const std::vector<int> &successors(int function, int block) const {
    return succ_[function][block];
  }
  const std::vector<int> &predecessors(int function, int block) const {
    return pred_[function][block];
  }

  const std::vector<IndirectSiteInfo> &indirect_sites() const {
    return indirect_sites_;
  }
  std::optional<int> FindIndirectSite(std::string_view site) const;
  // Total number of call-site records (direct and indirect).
  size_t total_call_sites() const { return total_call_sites_; }

  // Function indices in ascending name order.
  const std::vector<int> &functions_by_name() const { return by_name_; }

  bool operator==(const Icfg &other) const {
    return functions_ == other.functions_;
  }

 private:
  std::vector<FunctionRecord> functions_;
  std::vector<int> by_name_;
  std::unordered_map<std::string, int> function_index_;
  std::vector<std::unordered_map<std::string, int>> block_index_;
  std::vector<int> entry_;
  std::vector<std::vector<std::vector<int>>> succ_;
  std::vector<std::vector<std::vector<int>>> pred_;
  std::vector<IndirectSiteInfo> indirect_sites_;
  std::unordered_map<std::string, int> site_index_;
  size_t total_call_sites_ = 0;
};

// Parses and validates an icfg document. Unknown keys are ignored so that the
// simulator's extended format loads unchanged.
Icfg LoadIcfg(std::string_view source);
Icfg IcfgFromJson(const nlohmann::json &doc);
nlohmann::ordered_json IcfgToJson(const Icfg &icfg);

// Immediate-dominator tree of one function. Blocks unreachable from the entry
// are excluded and listed in unreachable().
class DominatorTree {
 public:
  static constexpr int kNone = -1;

  static DominatorTree Build(const Icfg &icfg, int function);

  int function() const { return function_; }
  int root() const { return root_; }
  // kNone for the root and for unreachable blocks.
  int idom(int block) const { return idom_[block]; }
  bool reachable(int block) const { return reachable_[block]; }
  const std::vector<int> &children(int block) const { return children_[block]; }
  const std::vector<int> &unreachable() const { return unreachable_; }
  size_t size() const { return idom_.size(); }

  // Strict descendants of `block` in preorder.
  std::vector<int> Descendants(int block) const;
  // True iff `a` dominates `b` (reflexive). False if either is unreachable.
  bool Dominates(int a, int b) const;

 private:
  int function_ = -1;
  int root_ = 0;
  std::vector<int> idom_;
  std::vector<bool> reachable_;
  std::vector<std::vector<int>> children_;
  std::vector<int> unreachable_;
  // Preorder entry/exit numbers for O(1) ancestor queries.
  std::vector<int> pre_;
  std::vector<int> post_;
};

struct DynamicCallEdge {
  std::string site;
  std::string caller;
  std::string target;
  uint64_t count = 1;

  bool operator==(const DynamicCallEdge &) const = default;
};

// Parses a callgraph log: one {"site","caller","target","count"} per line.
std::vector<DynamicCallEdge> LoadCallEdges(std::string_view source);
std::string DumpCallEdges(std::span<const DynamicCallEdge> edges);

// Call graph over function indices. Each function's incoming call sites are
// its static direct call sites plus distinct observed (indirect site, target)
// bindings.
class CallGraph {
 public:
  CallGraph() = default;

  int function_count() const { return static_cast<int>(incoming_.size()); }
  // Callees invoked from one block, in call order. Indirect sites expand to
  // their observed targets in name order.
  const std::vector<int> &BlockCallees(BlockRef ref) const {
    return block_callees_[ref.function][ref.block];
  }
  // All callees of a function (deduplicated, ascending index).
  const std::vector<int> &FunctionCallees(int function) const {
    return function_callees_[function];
  }
  size_t IncomingCallSites(int function) const { return incoming_[function]; }
  size_t DirectCallSites(int function) const { return direct_incoming_[function]; }

  // Deduplicated observed edges in (site, target) order with summed counts.
  const std::vector<DynamicCallEdge> &edges() const { return edges_; }

  // Functions reachable from `roots` (inclusive) over call edges.
  std::vector<bool> Reachable(std::span<const int> roots) const;

  bool operator==(const CallGraph &) const = default;

 private:
  friend CallGraph AugmentCallGraph(const Icfg &,
                                    std::span<const DynamicCallEdge>);

  std::vector<std::vector<std::vector<int>>> block_callees_;
  std::vector<std::vector<int>> function_callees_;
  std::vector<size_t> incoming_;
  std::vector<size_t> direct_incoming_;
  std::vector<DynamicCallEdge> edges_;
};

// Builds the call graph from static direct calls plus the observed edges.
// Throws Error(kInvalidInput) on an unknown site, unknown target, or a caller
// that does not own the site.
CallGraph AugmentCallGraph(const Icfg &icfg,
                           std::span<const DynamicCallEdge> edges);

struct IndirectStats {
  size_t total_call_sites = 0;
  size_t indirect_call_sites = 0;
  size_t discovered_targets = 0;

  bool operator==(const IndirectStats &) const = default;
};

IndirectStats IndirectCallSummary(const Icfg &icfg,
                                  std::span<const DynamicCallEdge> edges);

}  // namespace compass

#endif  // COMPASS_ICFG_H_
