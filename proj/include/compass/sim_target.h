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

#ifndef COMPASS_SIM_TARGET_H_
#define COMPASS_SIM_TARGET_H_

// A toy program format, its interpreter and a small deterministic
// coverage-guided mutational fuzzer. The fuzzer emits the same profile,
// callgraph, label and coverage files a real campaign would feed the analysis.
//
// Execution semantics:
//  * Execution starts at the entry block of the root function.
//  * A block's calls run in order when the block executes. A direct call runs
//    the callee to completion. An indirect call reads input[offset] and calls
//    the function its table maps that byte to; a missing byte or unmapped
//    value makes no call.
//  * A guarded block has two successors: the first is taken when the guard
//    holds, the second otherwise. An unguarded block has at most one
//    successor. A block without successors returns.
//  * Every executed block costs one step. When the step budget runs out, the
//    execution stops and the trace is flagged truncated.
//
// The fuzzer draws all randomness from std::mt19937_64 seeded with rng_seed,
// using raw engine output reduced modulo the range.

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "compass/coverage.h"
#include "compass/icfg.h"
#include "compass/label_set.h"

namespace compass::sim {

struct Guard {
  enum class Kind { kBytes, kFlag, kLenGe };

  Kind kind = Kind::kBytes;
  size_t offset = 0;  // kBytes
  std::string value;  // kBytes, raw bytes
  int bit = 0;        // kFlag
  size_t n = 0;       // kLenGe

  bool Holds(std::string_view input, uint64_t flags) const;
  // Input for byte and length guards, harness for flag guards.
  LabelSet Labels() const;
};

struct DispatchTable {
  size_t offset = 0;
  std::map<uint8_t, std::string> targets;
};

class SimTarget {
 public:
  // Parses the sim spec format: the icfg format plus optional per-block
  // "guard" and per-indirect-call "offset"/"table" keys, and an optional
  // top-level "root" (default "main").
  static SimTarget Load(std::string_view source);

  const Icfg &icfg() const { return icfg_; }
  int root() const { return root_; }
  const std::optional<Guard> &guard(BlockRef ref) const {
    return guards_[ref.function][ref.block];
  }
  // Indexed like Icfg::indirect_sites(); target function indices by byte.
  const std::map<uint8_t, int> &table(int site) const { return tables_[site]; }
  size_t table_offset(int site) const { return table_offsets_[site]; }

 private:
  Icfg icfg_;
  int root_ = 0;
  std::vector<std::vector<std::optional<Guard>>> guards_;
  std::vector<std::map<uint8_t, int>> tables_;
  std::vector<size_t> table_offsets_;
};

struct ExecOptions {
  static constexpr uint64_t kDefaultStepBudget = 10000;
  uint64_t step_budget = kDefaultStepBudget;
  size_t max_call_depth = 256;
};

struct ExecutionTrace {
  // hits[function][block].
  std::vector<std::vector<uint64_t>> hits;
  // (indirect site index, target function index) -> times taken.
  std::map<std::pair<int, int>, uint64_t> indirect;
  // Executed guarded blocks and their operand labels.
  std::map<BlockRef, LabelSet> labels;
  uint64_t steps = 0;
  bool truncated = false;

  uint64_t hit(BlockRef ref) const { return hits[ref.function][ref.block]; }
  InputCoverage Coverage(const Icfg &icfg, std::string input_name) const;
};

ExecutionTrace Execute(const SimTarget &target, std::string_view input,
                       uint64_t flags, const ExecOptions &options = {});

struct FuzzRunConfig {
  std::vector<std::string> seeds;
  // Queue names for the seeds; "seed_NNN" when empty.
  std::vector<std::string> seed_names;
  uint64_t harness_flags = 0;
  uint64_t iterations = 1;
  uint64_t rng_seed = 0;
  size_t max_input_size = 4096;
  ExecOptions exec;
  // Keep every executed input in FuzzResult::executed.
  bool record_executed = false;
};

struct FuzzResult {
  ProfileSnapshot profile;
  // Seeds first, then admitted mutants, with their file names.
  std::vector<std::pair<std::string, std::string>> queue;
  std::vector<DynamicCallEdge> callgraph;
  LabelMap labels;
  std::vector<InputCoverage> per_input;  // one per queue entry
  std::vector<std::string> executed;
  uint64_t executions = 0;
  uint64_t truncated_executions = 0;
};

// Runs every seed, then `iterations` mutants picked round-robin from the
// queue. A mutant joins the queue iff it covers a block no earlier input
// covered. Seeds always join. Throws Error(kInvalidInput) without seeds.
FuzzResult SimFuzz(const SimTarget &target, const FuzzRunConfig &config);

// Writes profile.jsonl, callgraph.jsonl, labels.jsonl, coverage.jsonl,
// icfg.json and queue/<name> under `dir`.
void WriteFuzzOutputs(const SimTarget &target, const FuzzResult &result,
                      const std::filesystem::path &dir);

}  // namespace compass::sim

#endif  // COMPASS_SIM_TARGET_H_
