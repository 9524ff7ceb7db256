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

#ifndef COMPASS_EVALUATION_H_
#define COMPASS_EVALUATION_H_

// Attribution of corpus inputs and candidate seeds to compartments.

#include <span>
#include <string>
#include <vector>

#include "compass/compartments.h"
#include "compass/coverage.h"
#include "json.hpp"

namespace compass {

// Fills Input (first input covering the conditional) and Solution (first input
// covering the entry block) in corpus order. Indirect-call targets only get a
// Solution.
CompartmentReport AttributeCorpus(CompartmentReport report,
                                  std::span<const InputCoverage> corpus);

struct CompartmentEvaluation {
  std::string id;
  bool reaches_conditional = false;
  bool unlocks_entry = false;

  bool operator==(const CompartmentEvaluation &) const = default;
};

struct CandidateEvaluation {
  std::string input;
  // One record per locked entry, report order.
  std::vector<CompartmentEvaluation> records;

  std::vector<std::string> Unlocked() const;
  bool operator==(const CandidateEvaluation &) const = default;
};

CandidateEvaluation EvaluateCandidate(const CompartmentReport &report,
                                      const InputCoverage &candidate);

nlohmann::ordered_json EvaluationToJson(const CandidateEvaluation &evaluation);

}  // namespace compass

#endif  // COMPASS_EVALUATION_H_
