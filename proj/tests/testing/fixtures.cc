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

#include "testing/fixtures.h"

#include "compass/file_util.h"
#include "compass/labels.h"
#include "testing/builders.h"

namespace compass::testing {

std::filesystem::path Testdata(std::string_view relative) {
  return std::filesystem::path(COMPASS_TESTDATA_DIR) / relative;
}

namespace {

PipelineInputs InputsUnder(const std::string &dir, bool corpus) {
  PipelineInputs in;
  in.icfg_path = Testdata(dir + "/icfg.json").string();
  in.profile_paths = {Testdata(dir + "/profile.jsonl").string()};
  in.callgraph_path = Testdata(dir + "/callgraph.jsonl").string();
  in.labels_path = Testdata(dir + "/labels.jsonl").string();
  if (corpus) in.corpus_path = Testdata(dir + "/corpus.jsonl").string();
  return in;
}

}  // namespace

PipelineInputs FontLoaderInputs() { return InputsUnder("table2", true); }
PipelineInputs EntityRefInputs() { return InputsUnder("entity_ref", false); }

sim::SimTarget LoadSimSpec(std::string_view name) {
  return sim::SimTarget::Load(ReadFile(Testdata(name)));
}

const std::vector<std::string> &FiveRegionMagics() {
  static const std::vector<std::string> magics = {"PFR0", "PCF1", "CID2",
                                                  "WOF3", "TTF4"};
  return magics;
}

const std::vector<std::string> &FiveRegionEntries() {
  static const std::vector<std::string> entries = {"r1", "r2", "r3", "r4",
                                                   "r5"};
  return entries;
}

PipelineDocuments DocumentsOf(const sim::SimTarget &target,
                              const sim::FuzzResult &result) {
  PipelineDocuments docs;
  docs.icfg = IcfgToJson(target.icfg()).dump();
  docs.profiles = {{result.profile.tag(), DumpProfile(result.profile)}};
  docs.callgraph = DumpCallEdges(result.callgraph);
  docs.labels = DumpLabels(result.labels);
  docs.corpus = DumpCoverageManifest(result.per_input);
  return docs;
}

GatedRegions GatedRegions::Make(int regions) {
  std::vector<BasicBlockRecord> blocks;
  for (int i = 0; i < regions; ++i) {
    const std::string next = i + 1 < regions ? "c" + std::to_string(i + 1)
                                             : std::string("done");
    blocks.push_back(Block("c" + std::to_string(i), 4, {RegionId(i), next}, {},
                           "parse.c:" + std::to_string(100 + 10 * i)));
    blocks.push_back(Block(RegionId(i), 1000 - 10 * i, {next}, {},
                           "parse.c:" + std::to_string(101 + 10 * i)));
  }
  blocks.push_back(Block("done", 1, {}, {}, "parse.c:999"));
  GatedRegions g;
  g.functions = {Function("main", std::move(blocks))};
  g.regions = regions;
  return g;
}

ProfileSnapshot GatedRegions::Snapshot(const std::set<int> &covered,
                                       uint64_t max_exec_count) const {
  const uint64_t hot = 1000 * (max_exec_count + 1);
  ProfileSnapshot s("gated");
  for (int i = 0; i < regions; ++i) {
    s.Add({"main", "c" + std::to_string(i)}, hot);
    if (covered.contains(i)) s.Add({"main", RegionId(i)}, max_exec_count + 1);
  }
  s.Add({"main", "done"}, hot);
  return s;
}

std::string GatedRegions::RegionId(int i) { return "r" + std::to_string(i); }

}  // namespace compass::testing
