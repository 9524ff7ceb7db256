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

#ifndef COMPASS_TESTS_TESTING_RANDOM_PROGRAM_H_
#define COMPASS_TESTS_TESTING_RANDOM_PROGRAM_H_

// Random well-formed programs for property tests.

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "compass/coverage.h"
#include "compass/icfg.h"

namespace compass::testing {

// A random block graph with `blocks` blocks; every block has 0-3 successors
// and some blocks are unreachable from the entry.
FunctionRecord RandomFunction(std::mt19937_64 &rng, const std::string &name,
                              int blocks);

struct RandomProgramOptions {
  int max_functions = 12;
  int max_blocks = 60;  // across all functions
  uint64_t max_exec_count = 50;
};

struct RandomProgram {
  std::vector<FunctionRecord> functions;
  std::vector<DynamicCallEdge> edges;
  ProfileSnapshot snapshot;
};

// Random functions with random direct calls, indirect sites with random
// observed targets, and counts drawn around the threshold.
RandomProgram RandomProgramOf(std::mt19937_64 &rng,
                              const RandomProgramOptions &options);

// A snapshot pointwise >= `base` over the same keys plus a few new ones.
ProfileSnapshot RaiseCounts(std::mt19937_64 &rng, const ProfileSnapshot &base,
                            const std::vector<FunctionRecord> &functions);

}  // namespace compass::testing

#endif  // COMPASS_TESTS_TESTING_RANDOM_PROGRAM_H_
