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

#include "testing/properties.h"

#include <algorithm>
#include <random>
#include <set>
#include <sstream>

#include "compass/compartments.h"
#include "testing/oracle.h"
#include "testing/random_program.h"

namespace compass::testing {

namespace {

std::string Describe(const WeightBreakdown &w) {
  std::ostringstream s;
  s << w.total << " = " << w.block_weight << " + " << w.calls_weight;
  return s.str();
}

// Frontier successors plus never-called, under-covered, non-root functions,
// straight from the records.
std::set<std::string> OracleCandidates(const RandomProgram &p,
                                       const AnalysisConfig &cfg) {
  std::set<std::string> ids;
  std::set<std::string> directly_called;
  for (const FunctionRecord &fn : p.functions) {
    for (const BasicBlockRecord &b : fn.blocks) {
      for (const CallSiteRecord &c : b.calls) {
        if (c.kind == CallSiteRecord::Kind::kDirect) directly_called.insert(c.name);
      }
    }
  }
  const uint64_t theta = cfg.max_exec_count;
  for (const FunctionRecord &fn : p.functions) {
    const std::set<std::string> reach = ReachableWithout(fn, "");
    for (const BasicBlockRecord &b : fn.blocks) {
      if (p.snapshot.Count(fn.name, b.id) <= theta) continue;
      for (const std::string &s : b.succs) {
        if (p.snapshot.Count(fn.name, s) <= theta && reach.contains(s)) {
          ids.insert(fn.name + ":" + s);
        }
      }
    }
    const bool root = std::find(cfg.roots.begin(), cfg.roots.end(), fn.name) !=
                      cfg.roots.end();
    if (!root && !directly_called.contains(fn.name) &&
        p.snapshot.Count(fn.name, fn.entry) <= theta) {
      ids.insert(fn.name + ":" + fn.entry);
    }
  }
  return ids;
}

}  // namespace

std::string CheckOracleEquivalence(uint64_t seed) {
  std::mt19937_64 rng(seed);
  const RandomProgram p = RandomProgramOf(rng, RandomProgramOptions{});
  AnalysisConfig cfg;
  cfg.roots = {"f0"};
  const ProgramModel model =
      ProgramModel::Build(Icfg::Build(p.functions), p.edges);
  const BlockCounts counts = BlockCounts::Resolve(model.icfg(), p.snapshot);
  const std::vector<Compartment> cands = EnumerateCandidates(model, counts, cfg);

  std::set<std::string> got;
  for (const Compartment &c : cands) got.insert(c.id);
  if (got != OracleCandidates(p, cfg)) {
    return "seed " + std::to_string(seed) + ": candidate sets differ";
  }
  for (const Compartment &c : cands) {
    const WeightBreakdown have = BlockWeight(
        model, *model.icfg().FindBlock(c.function, c.block), counts,
        cfg.max_exec_count);
    const WeightBreakdown want =
        OracleWeight(p.functions, p.edges, p.snapshot, cfg.max_exec_count,
                     c.function, c.block);
    if (have != want || have.total != have.block_weight + have.calls_weight) {
      return "seed " + std::to_string(seed) + " " + c.id + ": got " +
             Describe(have) + ", oracle " + Describe(want);
    }
  }
  return "";
}

std::string CheckDominators(uint64_t seed, int max_blocks) {
  std::mt19937_64 rng(seed);
  const FunctionRecord fn = RandomFunction(
      rng, "f", 1 + static_cast<int>(rng() % static_cast<uint64_t>(max_blocks)));
  const Icfg icfg = Icfg::Build({fn});
  const DominatorTree dt = DominatorTree::Build(icfg, 0);
  const auto want = OracleIdoms(fn);
  for (size_t b = 0; b < fn.blocks.size(); ++b) {
    const std::string &id = fn.blocks[b].id;
    auto it = want.find(id);
    const bool reachable = it != want.end();
    if (dt.reachable(static_cast<int>(b)) != reachable) {
      return "seed " + std::to_string(seed) + " " + id + ": reachability differs";
    }
    if (!reachable) continue;
    const int idom = dt.idom(static_cast<int>(b));
    const std::string have = idom == DominatorTree::kNone ? "" : fn.blocks[idom].id;
    if (have != it->second) {
      return "seed " + std::to_string(seed) + " " + id + ": idom " + have +
             ", oracle " + it->second;
    }
  }
  return "";
}

std::string CheckMonotonicity(uint64_t seed) {
  std::mt19937_64 rng(seed);
  const RandomProgram p = RandomProgramOf(rng, RandomProgramOptions{});
  const ProfileSnapshot later = RaiseCounts(rng, p.snapshot, p.functions);
  AnalysisConfig cfg;
  cfg.roots = {"f0"};
  const ProgramModel model =
      ProgramModel::Build(Icfg::Build(p.functions), p.edges);
  const BlockCounts before = BlockCounts::Resolve(model.icfg(), p.snapshot);
  const BlockCounts after = BlockCounts::Resolve(model.icfg(), later);
  for (const Compartment &c : EnumerateCandidates(model, before, cfg)) {
    const BlockRef ref = *model.icfg().FindBlock(c.function, c.block);
    const WeightBreakdown w0 = BlockWeight(model, ref, before, cfg.max_exec_count);
    const WeightBreakdown w1 = BlockWeight(model, ref, after, cfg.max_exec_count);
    if (w1.total > w0.total || w1.calls_weight > w0.calls_weight) {
      return "seed " + std::to_string(seed) + " " + c.id + ": " + Describe(w0) +
             " grew to " + Describe(w1);
    }
  }
  return "";
}

}  // namespace compass::testing
