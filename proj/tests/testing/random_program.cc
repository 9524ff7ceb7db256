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

#include "testing/random_program.h"

#include <algorithm>
#include <set>

namespace compass::testing {

namespace {

uint64_t Below(std::mt19937_64 &rng, uint64_t n) { return rng() % n; }

uint64_t RandomCount(std::mt19937_64 &rng, uint64_t theta) {
  switch (Below(rng, 4)) {
    case 0:
    case 1:
      return 0;
    case 2:
      return Below(rng, theta + 1);
    default:
      return theta + 1 + Below(rng, 10000);
  }
}

}  // namespace

FunctionRecord RandomFunction(std::mt19937_64 &rng, const std::string &name,
                              int blocks) {
  FunctionRecord fn;
  fn.name = name;
  for (int b = 0; b < blocks; ++b) {
    BasicBlockRecord bb;
    bb.id = "b" + std::to_string(b);
    bb.size = 1 + Below(rng, 20);
    bb.loc = name + ".c:" + std::to_string(10 + b);
    std::set<int> succ;
    const int n = static_cast<int>(Below(rng, 4));
    for (int i = 0; i < n; ++i) {
      // Bias towards forward edges so graphs have interesting dominance.
      int s = Below(rng, 3) == 0 ? static_cast<int>(Below(rng, blocks))
                                 : b + 1 + static_cast<int>(Below(rng, 3));
      if (s < blocks) succ.insert(s);
    }
    for (int s : succ) bb.succs.push_back("b" + std::to_string(s));
    fn.size += bb.size;
    fn.blocks.push_back(std::move(bb));
  }
  fn.entry = fn.blocks.front().id;
  // Shuffle the block order so the entry is not always first.
  std::shuffle(fn.blocks.begin(), fn.blocks.end(), rng);
  return fn;
}

RandomProgram RandomProgramOf(std::mt19937_64 &rng,
                              const RandomProgramOptions &options) {
  RandomProgram p;
  const int nf = 1 + static_cast<int>(Below(rng, options.max_functions));
  const int per_fn = std::max(1, options.max_blocks / nf);
  for (int f = 0; f < nf; ++f) {
    const int nb = 1 + static_cast<int>(Below(rng, per_fn));
    p.functions.push_back(RandomFunction(rng, "f" + std::to_string(f), nb));
  }
  // Calls: direct to any function (self included) or indirect sites.
  int site_counter = 0;
  std::vector<std::pair<std::string, std::string>> sites;  // (site, owner)
  for (FunctionRecord &fn : p.functions) {
    for (BasicBlockRecord &bb : fn.blocks) {
      const int ncalls = static_cast<int>(Below(rng, 3));
      for (int i = 0; i < ncalls; ++i) {
        if (Below(rng, 4) == 0) {
          std::string site = "s" + std::to_string(site_counter++);
          bb.calls.push_back(CallSiteRecord::Indirect(site));
          sites.emplace_back(site, fn.name);
        } else {
          bb.calls.push_back(CallSiteRecord::Direct(
              p.functions[Below(rng, nf)].name));
        }
      }
    }
  }
  for (const auto &[site, owner] : sites) {
    const int ntargets = static_cast<int>(Below(rng, 3));
    for (int i = 0; i < ntargets; ++i) {
      const std::string &target = p.functions[Below(rng, nf)].name;
      p.edges.push_back({site, owner, target, 1 + Below(rng, 5)});
      // Occasionally log the same binding twice.
      if (Below(rng, 4) == 0) p.edges.push_back({site, owner, target, 1});
    }
  }
  std::shuffle(p.edges.begin(), p.edges.end(), rng);
  p.snapshot.set_tag("random");
  for (const FunctionRecord &fn : p.functions) {
    for (const BasicBlockRecord &bb : fn.blocks) {
      uint64_t c = RandomCount(rng, options.max_exec_count);
      if (c > 0) p.snapshot.Add({fn.name, bb.id}, c);
    }
  }
  return p;
}

ProfileSnapshot RaiseCounts(std::mt19937_64 &rng, const ProfileSnapshot &base,
                            const std::vector<FunctionRecord> &functions) {
  ProfileSnapshot out = base;
  for (const FunctionRecord &fn : functions) {
    for (const BasicBlockRecord &bb : fn.blocks) {
      if (Below(rng, 3) == 0) out.Add({fn.name, bb.id}, Below(rng, 200));
    }
  }
  return out;
}

}  // namespace compass::testing
