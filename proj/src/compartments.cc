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

#include "compass/compartments.h"

#include <algorithm>
#include <map>
#include <set>
#include <tuple>
#include <utility>

#include "compass/error.h"

namespace compass {

ProgramModel::ProgramModel(Icfg icfg, CallGraph call_graph)
    : icfg_(std::move(icfg)), call_graph_(std::move(call_graph)) {
  if (call_graph_.function_count() !=
      static_cast<int>(icfg_.function_count())) {
    throw Error(ErrorCode::kInternal, "call graph does not match icfg");
  }
  dominators_.reserve(icfg_.function_count());
  for (int f = 0; f < static_cast<int>(icfg_.function_count()); ++f) {
    dominators_.push_back(DominatorTree::Build(icfg_, f));
  }
}

ProgramModel ProgramModel::Build(Icfg icfg,
                                 std::span<const DynamicCallEdge> edges) {
  CallGraph cg = AugmentCallGraph(icfg, edges);
  return ProgramModel(std::move(icfg), std::move(cg));
}

uint64_t CallsWeight(const ProgramModel &model, int function,
                     std::vector<bool> &visited, const BlockCounts &counts,
                     uint64_t max_exec_count, std::vector<int> *contributors) {
  if (visited[function]) return 0;
  visited[function] = true;
  if (counts.entry(function) > max_exec_count ||
      model.call_graph().IncomingCallSites(function) > 1) {
    return 0;
  }
  const FunctionRecord &fn = model.icfg().function(function);
  if (contributors) contributors->push_back(function);
  uint64_t weight = fn.size;
  for (int b = 0; b < static_cast<int>(fn.blocks.size()); ++b) {
    for (int callee : model.call_graph().BlockCallees({function, b})) {
      weight += CallsWeight(model, callee, visited, counts, max_exec_count,
                            contributors);
    }
  }
  return weight;
}

WeightBreakdown BlockWeight(const ProgramModel &model, BlockRef block,
                            const BlockCounts &counts, uint64_t max_exec_count,
                            std::vector<int> *contributors) {
  const DominatorTree &dt = model.dominators(block.function);
  if (!dt.reachable(block.block)) {
    const FunctionRecord &fn = model.icfg().function(block.function);
    ThrowInvalid("block " + fn.name + ":" + fn.blocks[block.block].id +
                 " is unreachable from its function entry");
  }
  if (counts.at(block) > max_exec_count) return {};

  const FunctionRecord &fn = model.icfg().function(block.function);
  const CallGraph &cg = model.call_graph();
  uint64_t block_weight = fn.blocks[block.block].size;
  std::vector<int> called = cg.BlockCallees(block);
  for (int d : dt.Descendants(block.block)) {
    block_weight += fn.blocks[d].size;
    const auto &more = cg.BlockCallees({block.function, d});
    called.insert(called.end(), more.begin(), more.end());
  }
  std::vector<bool> visited(model.icfg().function_count(), false);
  uint64_t calls_weight = 0;
  for (int callee : called) {
    calls_weight +=
        CallsWeight(model, callee, visited, counts, max_exec_count, contributors);
  }
  return WeightBreakdown::Of(block_weight, calls_weight);
}

std::string_view ToString(CompartmentKind kind) {
  return kind == CompartmentKind::kFrontier ? "frontier" : "indirect_target";
}

std::string_view ToString(CompartmentStatus status) {
  switch (status) {
    case CompartmentStatus::kLocked:
      return "locked";
    case CompartmentStatus::kUnlocked:
      return "unlocked";
    case CompartmentStatus::kResolved:
      return "resolved";
  }
  return "locked";
}

std::optional<CompartmentKind> ParseCompartmentKind(std::string_view s) {
  if (s == "frontier") return CompartmentKind::kFrontier;
  if (s == "indirect_target") return CompartmentKind::kIndirectTarget;
  return std::nullopt;
}

std::optional<CompartmentStatus> ParseCompartmentStatus(std::string_view s) {
  if (s == "locked") return CompartmentStatus::kLocked;
  if (s == "unlocked") return CompartmentStatus::kUnlocked;
  if (s == "resolved") return CompartmentStatus::kResolved;
  return std::nullopt;
}

std::string Compartment::MakeId(std::string_view function,
                                std::string_view block) {
  std::string id(function);
  id += ':';
  id += block;
  return id;
}

const Compartment *CompartmentReport::Find(std::string_view id) const {
  for (const auto *list : {&entries, &closed}) {
    for (const Compartment &c : *list) {
      if (c.id == id) return &c;
    }
  }
  return nullptr;
}

std::vector<Compartment> EnumerateCandidates(const ProgramModel &model,
                                             const BlockCounts &counts,
                                             const AnalysisConfig &config) {
  const Icfg &icfg = model.icfg();
  const uint64_t theta = config.max_exec_count;
  // Keyed by entry block so duplicates collapse.
  std::map<BlockRef, Compartment> found;

  for (int f = 0; f < static_cast<int>(icfg.function_count()); ++f) {
    const FunctionRecord &fn = icfg.function(f);
    const DominatorTree &dt = model.dominators(f);
    for (int u = 0; u < static_cast<int>(fn.blocks.size()); ++u) {
      const uint64_t from_count = counts.at({f, u});
      if (from_count <= theta) continue;
      for (int v : icfg.successors(f, u)) {
        if (counts.at({f, v}) > theta || !dt.reachable(v)) continue;
        auto [it, inserted] = found.try_emplace(BlockRef{f, v});
        Compartment &c = it->second;
        // Keep the hottest conditional; equal counts keep the smaller id.
        if (!inserted && (c.conditional_count > from_count ||
                          (c.conditional_count == from_count &&
                           c.conditional_block < fn.blocks[u].id))) {
          continue;
        }
        c.id = Compartment::MakeId(fn.name, fn.blocks[v].id);
        c.function = fn.name;
        c.block = fn.blocks[v].id;
        c.kind = CompartmentKind::kFrontier;
        c.conditional_block = fn.blocks[u].id;
        c.conditional_count = from_count;
        c.conditional_loc = fn.blocks[u].loc;
        c.entry_loc = fn.blocks[v].loc;
      }
    }
  }

  const std::set<std::string> roots(config.roots.begin(), config.roots.end());
  for (int f = 0; f < static_cast<int>(icfg.function_count()); ++f) {
    const FunctionRecord &fn = icfg.function(f);
    if (roots.contains(fn.name)) continue;
    if (model.call_graph().DirectCallSites(f) != 0) continue;
    if (counts.entry(f) > theta) continue;
    const int entry = icfg.entry_block(f);
    auto [it, inserted] = found.try_emplace(BlockRef{f, entry});
    if (!inserted) continue;  // already a frontier compartment
    Compartment &c = it->second;
    c.id = Compartment::MakeId(fn.name, fn.blocks[entry].id);
    c.function = fn.name;
    c.block = fn.blocks[entry].id;
    c.kind = CompartmentKind::kIndirectTarget;
    c.entry_loc = fn.blocks[entry].loc;
  }

  std::vector<Compartment> out;
  out.reserve(found.size());
  for (auto &[ref, c] : found) out.push_back(std::move(c));
  std::sort(out.begin(), out.end(),
            [](const Compartment &a, const Compartment &b) {
              return std::tie(a.function, a.block) <
                     std::tie(b.function, b.block);
            });
  return out;
}

namespace {

bool RankOrder(const Compartment &a, const Compartment &b) {
  if (a.weight.total != b.weight.total) return a.weight.total > b.weight.total;
  return std::tie(a.function, a.block) < std::tie(b.function, b.block);
}

}  // namespace

CompartmentReport RankCompartments(std::vector<Compartment> candidates,
                                   const ProgramModel &model,
                                   const BlockCounts &counts,
                                   const AnalysisConfig &config,
                                   std::string snapshot_tag) {
  config.Validate();
  for (Compartment &c : candidates) {
    auto ref = model.icfg().FindBlock(c.function, c.block);
    if (!ref) ThrowNotFound("unknown compartment " + c.id);
    c.weight = BlockWeight(model, *ref, counts, config.max_exec_count);
  }
  std::sort(candidates.begin(), candidates.end(), RankOrder);
  if (candidates.size() > config.top_k) candidates.resize(config.top_k);
  for (size_t i = 0; i < candidates.size(); ++i) {
    candidates[i].rank = i + 1;
    candidates[i].status = CompartmentStatus::kLocked;
  }
  CompartmentReport report;
  report.config = config;
  report.snapshot_tag = std::move(snapshot_tag);
  report.entries = std::move(candidates);
  return report;
}

BlockCounts HypotheticalCounts(const ProgramModel &model, BlockCounts base,
                               std::span<const Compartment> closed,
                               uint64_t max_exec_count) {
  const uint64_t covered = max_exec_count + 1;
  auto raise = [&](BlockRef ref) {
    if (base.at(ref) < covered) base.Set(ref, covered);
  };
  for (const Compartment &c : closed) {
    auto ref = model.icfg().FindBlock(c.function, c.block);
    if (!ref) ThrowNotFound("unknown compartment " + c.id);
    const DominatorTree &dt = model.dominators(ref->function);
    if (!dt.reachable(ref->block)) continue;
    std::vector<int> contributors;
    BlockWeight(model, *ref, base, max_exec_count, &contributors);
    raise(*ref);
    for (int d : dt.Descendants(ref->block)) raise({ref->function, d});
    for (int f : contributors) {
      const int nb = static_cast<int>(model.icfg().function(f).blocks.size());
      for (int b = 0; b < nb; ++b) raise({f, b});
    }
  }
  return base;
}

CompartmentReport WhatIfUnlock(const CompartmentReport &report,
                               std::string_view id, const ProgramModel &model,
                               const BlockCounts &base,
                               CompartmentStatus status) {
  auto target = std::find_if(report.entries.begin(), report.entries.end(),
                             [&](const Compartment &c) { return c.id == id; });
  if (target == report.entries.end()) {
    ThrowNotFound("unknown compartment " + std::string(id));
  }

  std::vector<Compartment> closed = report.closed;
  Compartment done = *target;
  done.status = status;
  done.rank = 0;
  closed.push_back(std::move(done));

  const uint64_t theta = report.config.max_exec_count;
  BlockCounts hypothetical = HypotheticalCounts(model, base, closed, theta);
  std::set<std::string> closed_ids;
  for (const Compartment &c : closed) closed_ids.insert(c.id);

  std::vector<Compartment> candidates;
  for (Compartment &c : EnumerateCandidates(model, hypothetical, report.config)) {
    if (!closed_ids.contains(c.id)) candidates.push_back(std::move(c));
  }
  CompartmentReport next = RankCompartments(
      std::move(candidates), model, hypothetical, report.config,
      report.snapshot_tag);
  for (Compartment &c : next.entries) {
    if (const Compartment *old = report.Find(c.id)) {
      c.labels = old->labels;
      c.input = old->input;
      c.solution = old->solution;
    }
  }
  next.closed = std::move(closed);
  next.sources = report.sources;
  return next;
}

size_t StillLocked(const CompartmentReport &report,
                   const ProfileSnapshot &later, const Icfg *icfg) {
  if (icfg) BlockCounts::Resolve(*icfg, later);
  size_t locked = 0;
  for (const Compartment &c : report.entries) {
    if (later.Count(c.function, c.block) <= report.config.max_exec_count) {
      ++locked;
    }
  }
  return locked;
}

OverlapResult TopKOverlap(const CompartmentReport &a,
                          const CompartmentReport &b, size_t k) {
  OverlapResult result;
  result.k = k;
  result.truncated = k > a.entries.size() || k > b.entries.size();
  std::set<std::string> ids;
  for (size_t i = 0; i < std::min(k, a.entries.size()); ++i) {
    ids.insert(a.entries[i].id);
  }
  for (size_t i = 0; i < std::min(k, b.entries.size()); ++i) {
    if (ids.contains(b.entries[i].id)) ++result.overlap;
  }
  return result;
}

}  // namespace compass
