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

#include "compass/evaluation.h"

namespace compass {

namespace {

void AttributeOne(Compartment &c, std::span<const InputCoverage> corpus) {
  c.input.clear();
  c.solution.clear();
  const bool frontier = c.kind == CompartmentKind::kFrontier;
  for (const InputCoverage &in : corpus) {
    if (frontier && c.input.empty() && in.Covers(c.function, c.conditional_block)) {
      c.input = in.input;
    }
    if (c.solution.empty() && in.Covers(c.function, c.block)) {
      c.solution = in.input;
    }
    if ((!frontier || !c.input.empty()) && !c.solution.empty()) break;
  }
}

}  // namespace

CompartmentReport AttributeCorpus(CompartmentReport report,
                                  std::span<const InputCoverage> corpus) {
  for (Compartment &c : report.entries) AttributeOne(c, corpus);
  for (Compartment &c : report.closed) AttributeOne(c, corpus);
  return report;
}

std::vector<std::string> CandidateEvaluation::Unlocked() const {
  std::vector<std::string> ids;
  for (const CompartmentEvaluation &r : records) {
    if (r.unlocks_entry) ids.push_back(r.id);
  }
  return ids;
}

CandidateEvaluation EvaluateCandidate(const CompartmentReport &report,
                                      const InputCoverage &candidate) {
  CandidateEvaluation eval;
  eval.input = candidate.input;
  for (const Compartment &c : report.entries) {
    CompartmentEvaluation r;
    r.id = c.id;
    r.reaches_conditional = c.kind == CompartmentKind::kFrontier &&
                            candidate.Covers(c.function, c.conditional_block);
    r.unlocks_entry = candidate.Covers(c.function, c.block);
    eval.records.push_back(std::move(r));
  }
  return eval;
}

nlohmann::ordered_json EvaluationToJson(const CandidateEvaluation &evaluation) {
  nlohmann::ordered_json out;
  out["input"] = evaluation.input;
  nlohmann::ordered_json records = nlohmann::ordered_json::array();
  for (const CompartmentEvaluation &r : evaluation.records) {
    records.push_back({{"id", r.id},
                       {"reaches_conditional", r.reaches_conditional},
                       {"unlocks_entry", r.unlocks_entry}});
  }
  out["records"] = std::move(records);
  return out;
}

}  // namespace compass
