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

// Python bindings. Reports cross the boundary as export-format JSON strings;
// the pure-Python wrapper in compass/__init__.py decodes them.

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <string>
#include <vector>

#include "compass/compartments.h"
#include "compass/coverage.h"
#include "compass/error.h"
#include "compass/evaluation.h"
#include "compass/icfg.h"
#include "compass/labels.h"
#include "compass/pipeline.h"
#include "compass/report.h"
#include "compass/sim_target.h"

namespace py = pybind11;

namespace {

compass::AnalysisConfig MakeConfig(uint64_t max_exec_count, size_t top_k,
                                   const std::vector<std::string> *roots) {
  compass::AnalysisConfig config;
  config.max_exec_count = max_exec_count;
  config.top_k = top_k;
  if (roots) config.roots = *roots;
  return config;
}

std::string Analyze(const std::string &icfg,
                    const std::vector<std::string> &profiles,
                    const std::string &callgraph, const std::string &labels,
                    const std::string &corpus, uint64_t max_exec_count,
                    size_t top_k, std::optional<std::vector<std::string>> roots) {
  compass::PipelineDocuments docs;
  docs.icfg = icfg;
  for (size_t i = 0; i < profiles.size(); ++i) {
    docs.profiles.emplace_back("profile" + std::to_string(i), profiles[i]);
  }
  docs.callgraph = callgraph;
  docs.labels = labels;
  docs.corpus = corpus;
  auto analysis = compass::Analysis::FromDocuments(
      docs, MakeConfig(max_exec_count, top_k, roots ? &*roots : nullptr));
  return compass::ReportToJson(analysis.Run()).dump();
}

std::string AnalyzeFiles(const std::string &icfg_path,
                         const std::vector<std::string> &profile_paths,
                         const std::string &callgraph_path,
                         const std::string &labels_path,
                         const std::string &corpus_path, uint64_t max_exec_count,
                         size_t top_k,
                         std::optional<std::vector<std::string>> roots) {
  compass::PipelineInputs inputs{icfg_path, profile_paths, callgraph_path,
                                 labels_path, corpus_path};
  return compass::ReportToJson(
             compass::RunPipeline(
                 inputs, MakeConfig(max_exec_count, top_k, roots ? &*roots : nullptr)))
      .dump();
}

std::string WhatIf(const std::string &report_json, const std::string &id) {
  compass::CompartmentReport report = compass::LoadReport(report_json);
  if (report.sources.empty()) {
    compass::ThrowInvalid("report does not record its sources");
  }
  compass::PipelineInputs inputs{report.sources.icfg, report.sources.profiles,
                                 report.sources.callgraph, report.sources.labels,
                                 report.sources.corpus};
  auto analysis = compass::Analysis::FromFiles(inputs, report.config);
  auto current = analysis.Replay(report.closed);
  return compass::ReportToJson(
             analysis.Unlock(current, id, compass::CompartmentStatus::kResolved))
      .dump();
}

std::string Render(const std::string &report_json, const std::string &format,
                   std::optional<std::vector<std::string>> columns) {
  compass::RenderOptions opts;
  auto parsed = compass::ParseReportFormat(format);
  if (!parsed) compass::ThrowInvalid("unknown format " + format);
  opts.format = *parsed;
  if (columns) opts.columns = *columns;
  return compass::Render(compass::LoadReport(report_json), opts);
}

py::dict Dominators(const std::string &icfg_text, const std::string &function) {
  compass::Icfg icfg = compass::LoadIcfg(icfg_text);
  auto f = icfg.FindFunction(function);
  if (!f) compass::ThrowNotFound("unknown function " + function);
  auto dt = compass::DominatorTree::Build(icfg, *f);
  const auto &fn = icfg.function(*f);
  py::dict out;
  for (size_t b = 0; b < fn.blocks.size(); ++b) {
    if (!dt.reachable(static_cast<int>(b))) continue;
    int idom = dt.idom(static_cast<int>(b));
    out[py::str(fn.blocks[b].id)] =
        idom == compass::DominatorTree::kNone ? py::object(py::none())
                                              : py::object(py::str(fn.blocks[idom].id));
  }
  return out;
}

py::dict Simulate(const std::string &spec, const std::vector<py::bytes> &seeds,
                  uint64_t iterations, uint64_t rng_seed, uint64_t flags,
                  const std::string &out_dir) {
  auto target = compass::sim::SimTarget::Load(spec);
  compass::sim::FuzzRunConfig config;
  for (const py::bytes &s : seeds) config.seeds.push_back(std::string(s));
  config.iterations = iterations;
  config.rng_seed = rng_seed;
  config.harness_flags = flags;
  compass::sim::FuzzResult result;
  {
    py::gil_scoped_release release;
    result = compass::sim::SimFuzz(target, config);
    if (!out_dir.empty()) compass::sim::WriteFuzzOutputs(target, result, out_dir);
  }
  py::dict out;
  out["profile"] = compass::DumpProfile(result.profile);
  out["callgraph"] = compass::DumpCallEdges(result.callgraph);
  out["labels"] = compass::DumpLabels(result.labels);
  out["coverage"] = compass::DumpCoverageManifest(result.per_input);
  py::list queue;
  for (const auto &[name, bytes] : result.queue) {
    queue.append(py::make_tuple(name, py::bytes(bytes)));
  }
  out["queue"] = queue;
  out["executions"] = result.executions;
  return out;
}

py::dict ExecuteOnce(const std::string &spec, const py::bytes &input,
                     uint64_t flags, uint64_t step_budget) {
  auto target = compass::sim::SimTarget::Load(spec);
  compass::sim::ExecOptions opts;
  opts.step_budget = step_budget;
  auto trace = compass::sim::Execute(target, std::string(input), flags, opts);
  py::dict out;
  out["coverage"] =
      compass::InputCoverageToJson(trace.Coverage(target.icfg(), "input")).dump();
  py::list indirect;
  for (const auto &[key, n] : trace.indirect) {
    indirect.append(py::make_tuple(target.icfg().indirect_sites()[key.first].site,
                                   target.icfg().function(key.second).name, n));
  }
  out["indirect"] = indirect;
  out["truncated"] = trace.truncated;
  out["steps"] = trace.steps;
  return out;
}

}  // namespace

PYBIND11_MODULE(_compass, m) {
  m.doc() = "Compartment analysis for fuzzing campaigns";
  py::register_exception<compass::Error>(m, "CompassError", PyExc_ValueError);

  m.def("analyze", &Analyze, py::arg("icfg"), py::arg("profiles"),
        py::arg("callgraph") = "", py::arg("labels") = "", py::arg("corpus") = "",
        py::arg("max_exec_count") = compass::AnalysisConfig::kDefaultMaxExecCount,
        py::arg("top_k") = compass::AnalysisConfig::kDefaultTopK,
        py::arg("roots") = py::none());
  m.def("analyze_files", &AnalyzeFiles, py::arg("icfg_path"),
        py::arg("profile_paths"), py::arg("callgraph_path") = "",
        py::arg("labels_path") = "", py::arg("corpus_path") = "",
        py::arg("max_exec_count") = compass::AnalysisConfig::kDefaultMaxExecCount,
        py::arg("top_k") = compass::AnalysisConfig::kDefaultTopK,
        py::arg("roots") = py::none());
  m.def("whatif", &WhatIf, py::arg("report"), py::arg("unlock"));
  m.def("render", &Render, py::arg("report"), py::arg("format") = "table",
        py::arg("columns") = py::none());
  m.def(
      "still_locked",
      [](const std::string &report, const std::string &later) {
        return compass::StillLocked(compass::LoadReport(report),
                                    compass::LoadProfile(later, "later"));
      },
      py::arg("report"), py::arg("later_profile"));
  m.def(
      "topk_overlap",
      [](const std::string &a, const std::string &b, size_t k) {
        auto r = compass::TopKOverlap(compass::LoadReport(a), compass::LoadReport(b), k);
        return py::make_tuple(r.overlap, r.truncated);
      },
      py::arg("a"), py::arg("b"), py::arg("k"));
  m.def(
      "evaluate",
      [](const std::string &report, const std::string &candidate) {
        auto cov = compass::InputCoverageFromJson(nlohmann::json::parse(candidate));
        return compass::EvaluationToJson(
                   compass::EvaluateCandidate(compass::LoadReport(report), cov))
            .dump();
      },
      py::arg("report"), py::arg("candidate"));
  m.def("dominators", &Dominators, py::arg("icfg"), py::arg("function"));
  m.def(
      "indirect_summary",
      [](const std::string &icfg, const std::string &callgraph) {
        auto s = compass::IndirectCallSummary(compass::LoadIcfg(icfg),
                                              compass::LoadCallEdges(callgraph));
        return py::make_tuple(s.total_call_sites, s.indirect_call_sites,
                              s.discovered_targets);
      },
      py::arg("icfg"), py::arg("callgraph") = "");
  m.def("simulate", &Simulate, py::arg("spec"), py::arg("seeds"),
        py::arg("iterations"), py::arg("rng_seed"), py::arg("flags") = 0,
        py::arg("out_dir") = "");
  m.def("execute", &ExecuteOnce, py::arg("spec"), py::arg("input"),
        py::arg("flags") = 0,
        py::arg("step_budget") = compass::sim::ExecOptions::kDefaultStepBudget);
}
