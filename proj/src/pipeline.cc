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

#include "compass/pipeline.h"

#include <filesystem>

#include "compass/error.h"
#include "compass/evaluation.h"
#include "compass/file_util.h"
#include "compass/labels.h"

namespace compass {

namespace {

// Re-throws `fn`'s Error with "<what>: " prepended.
template <typename Fn>
auto WithContext(const std::string &what, Fn &&fn) {
  try {
    return fn();
  } catch (const Error &e) {
    throw Error(e.code(), what + ": " + e.what());
  }
}

}  // namespace

Analysis::Analysis(AnalysisConfig config, ProgramModel model,
                   ProfileSnapshot snapshot, LabelMap labels,
                   std::vector<InputCoverage> corpus)
    : config_(std::move(config)),
      model_(std::move(model)),
      snapshot_(std::move(snapshot)),
      counts_(BlockCounts::Zero(model_.icfg())),
      labels_(std::move(labels)),
      corpus_(std::move(corpus)) {}

Analysis Analysis::FromDocuments(const PipelineDocuments &docs,
                                 AnalysisConfig config) {
  config.Validate();
  Icfg icfg = WithContext("icfg", [&] { return LoadIcfg(docs.icfg); });
  ProfileSnapshot merged;
  for (const auto &[tag, text] : docs.profiles) {
    ProfileSnapshot s = WithContext("profile " + tag,
                                    [&] { return LoadProfile(text, tag); });
    merged = MergeProfiles(merged, s);
  }
  std::vector<DynamicCallEdge> edges = WithContext(
      "callgraph", [&] { return LoadCallEdges(docs.callgraph); });
  ProgramModel model = WithContext(
      "callgraph", [&] { return ProgramModel::Build(std::move(icfg), edges); });
  LabelMap labels = WithContext("labels", [&] { return LoadLabels(docs.labels); });
  std::vector<InputCoverage> corpus = WithContext(
      "corpus", [&] { return LoadCoverageManifest(docs.corpus); });

  Analysis a(std::move(config), std::move(model), std::move(merged),
             std::move(labels), std::move(corpus));
  a.counts_ = WithContext("profile", [&] {
    return BlockCounts::Resolve(a.model_.icfg(), a.snapshot_);
  });
  return a;
}

Analysis Analysis::FromFiles(const PipelineInputs &inputs,
                             AnalysisConfig config) {
  if (inputs.icfg_path.empty()) ThrowInvalid("no icfg given");
  if (inputs.profile_paths.empty()) ThrowInvalid("no profile given");
  PipelineDocuments docs;
  docs.icfg = ReadFile(inputs.icfg_path);
  for (const std::string &p : inputs.profile_paths) {
    docs.profiles.emplace_back(std::filesystem::path(p).stem().string(),
                               ReadFile(p));
  }
  if (!inputs.callgraph_path.empty()) docs.callgraph = ReadFile(inputs.callgraph_path);
  if (!inputs.labels_path.empty()) docs.labels = ReadFile(inputs.labels_path);
  if (!inputs.corpus_path.empty()) docs.corpus = ReadFile(inputs.corpus_path);

  // Re-label errors with the concrete path where it is unambiguous.
  Analysis a = [&] {
    try {
      return FromDocuments(docs, std::move(config));
    } catch (const Error &e) {
      std::string msg = e.what();
      auto replace = [&](const std::string &prefix, const std::string &path) {
        if (msg.rfind(prefix + ": ", 0) == 0) {
          msg = path + ": " + msg.substr(prefix.size() + 2);
        }
      };
      replace("icfg", inputs.icfg_path);
      replace("callgraph", inputs.callgraph_path);
      replace("labels", inputs.labels_path);
      replace("corpus", inputs.corpus_path);
      for (const std::string &p : inputs.profile_paths) {
        replace("profile " + std::filesystem::path(p).stem().string(), p);
      }
      throw Error(e.code(), msg);
    }
  }();

  auto absolute = [](const std::string &p) {
    return p.empty() ? p : std::filesystem::absolute(p).lexically_normal().string();
  };
  a.sources_.icfg = absolute(inputs.icfg_path);
  for (const std::string &p : inputs.profile_paths) {
    a.sources_.profiles.push_back(absolute(p));
  }
  a.sources_.callgraph = absolute(inputs.callgraph_path);
  a.sources_.labels = absolute(inputs.labels_path);
  a.sources_.corpus = absolute(inputs.corpus_path);
  return a;
}

CompartmentReport Analysis::Finish(CompartmentReport report) const {
  report = Annotate(std::move(report), labels_);
  report = AttributeCorpus(std::move(report), corpus_);
  report.sources = sources_;
  return report;
}

CompartmentReport Analysis::Run() const {
  auto candidates = EnumerateCandidates(model_, counts_, config_);
  return Finish(RankCompartments(std::move(candidates), model_, counts_,
                                 config_, snapshot_.tag()));
}

CompartmentReport Analysis::Unlock(const CompartmentReport &report,
                                   std::string_view id,
                                   CompartmentStatus status) const {
  return Finish(WhatIfUnlock(report, id, model_, counts_, status));
}

CompartmentReport Analysis::Replay(const std::vector<Compartment> &closed) const {
  CompartmentReport report = Run();
  for (const Compartment &c : closed) report = Unlock(report, c.id, c.status);
  return report;
}

CompartmentReport RunPipeline(const PipelineInputs &inputs,
                              const AnalysisConfig &config) {
  return Analysis::FromFiles(inputs, config).Run();
}

}  // namespace compass
