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

#ifndef COMPASS_PIPELINE_H_
#define COMPASS_PIPELINE_H_

// load -> augment -> enumerate -> rank -> annotate -> attribute.

#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "compass/compartments.h"
#include "compass/coverage.h"
#include "compass/icfg.h"
#include "compass/label_set.h"

namespace compass {

struct PipelineInputs {
  std::string icfg_path;
  std::vector<std::string> profile_paths;
  std::string callgraph_path;  // optional
  std::string labels_path;     // optional
  std::string corpus_path;     // optional
};

// Artifact contents, for callers that already hold them in memory.
struct PipelineDocuments {
  std::string icfg;
  // (tag, profile text); merged in order.
  std::vector<std::pair<std::string, std::string>> profiles;
  std::string callgraph;
  std::string labels;
  std::string corpus;
};

// The loaded, cross-validated artifacts of one analysis.
class Analysis {
 public:
  // Errors carry the artifact name (or path) as a prefix.
  static Analysis FromDocuments(const PipelineDocuments &docs,
                                AnalysisConfig config);
  static Analysis FromFiles(const PipelineInputs &inputs, AnalysisConfig config);

  const AnalysisConfig &config() const { return config_; }
  const ProgramModel &model() const { return model_; }
  const ProfileSnapshot &snapshot() const { return snapshot_; }
  const BlockCounts &counts() const { return counts_; }
  const LabelMap &labels() const { return labels_; }
  const std::vector<InputCoverage> &corpus() const { return corpus_; }

  // The initial, fully annotated report.
  CompartmentReport Run() const;
  // WhatIfUnlock followed by re-annotation and re-attribution.
  CompartmentReport Unlock(const CompartmentReport &report, std::string_view id,
                           CompartmentStatus status) const;
  // Run() followed by unlocking `closed` in order.
  CompartmentReport Replay(const std::vector<Compartment> &closed) const;

 private:
  Analysis(AnalysisConfig config, ProgramModel model, ProfileSnapshot snapshot,
           LabelMap labels, std::vector<InputCoverage> corpus);

  CompartmentReport Finish(CompartmentReport report) const;

  AnalysisConfig config_;
  ProgramModel model_;
  ProfileSnapshot snapshot_;
  BlockCounts counts_;
  LabelMap labels_;
  std::vector<InputCoverage> corpus_;
  ReportSources sources_;
};

CompartmentReport RunPipeline(const PipelineInputs &inputs,
                              const AnalysisConfig &config);

}  // namespace compass

#endif  // COMPASS_PIPELINE_H_
