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

#ifndef COMPASS_TESTS_TESTING_FIXTURES_H_
#define COMPASS_TESTS_TESTING_FIXTURES_H_

#include <filesystem>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "compass/coverage.h"
#include "compass/icfg.h"
#include "compass/pipeline.h"
#include "compass/sim_target.h"

namespace compass::testing {

std::filesystem::path Testdata(std::string_view relative);

// Four font loaders whose compartments carry known block/calls splits, plus a
// corpus and labels for attribution.
PipelineInputs FontLoaderInputs();
// One entity-reference compartment dominating 257 instructions and uniquely
// calling a 267-instruction function.
PipelineInputs EntityRefInputs();

sim::SimTarget LoadSimSpec(std::string_view name);

// Five regions gated by these magics, heaviest first.
const std::vector<std::string> &FiveRegionMagics();
// Entry block ids of the five regions, heaviest first.
const std::vector<std::string> &FiveRegionEntries();

// The documents a fuzzing run would hand the analysis.
PipelineDocuments DocumentsOf(const sim::SimTarget &target,
                              const sim::FuzzResult &result);

// A single function with a chain of hot conditionals c0..c{n-1}, each guarding
// a cold region r{i} of strictly decreasing weight.
struct GatedRegions {
  std::vector<FunctionRecord> functions;
  int regions = 0;

  static GatedRegions Make(int regions);
  // Hot chain plus the listed regions raised above the threshold.
  ProfileSnapshot Snapshot(const std::set<int> &covered,
                           uint64_t max_exec_count = 50) const;
  static std::string RegionId(int i);
};

}  // namespace compass::testing

#endif  // COMPASS_TESTS_TESTING_FIXTURES_H_
