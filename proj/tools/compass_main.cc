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

// compass: compartment analysis for fuzzing campaigns.
//
// Exit codes: 0 success, 1 usage error, 2 input-format error, 3 internal
// invariant violation. COMPASS_LOG=off|error|warn|info|debug sets stderr
// verbosity (default warn).

#include <csignal>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "compass/compartments.h"
#include "compass/coverage.h"
#include "compass/error.h"
#include "compass/evaluation.h"
#include "compass/file_util.h"
#include "compass/pipeline.h"
#include "compass/report.h"
#include "compass/service.h"
#include "compass/sim_target.h"
#include "json.hpp"
#include "spdlog/sinks/stdout_sinks.h"
#include "spdlog/spdlog.h"

namespace {

namespace fs = std::filesystem;
using compass::Error;
using compass::ErrorCode;

constexpr int kExitUsage = 1;
constexpr int kExitInput = 2;
constexpr int kExitInternal = 3;

void SetUpLogging() {
  auto logger = spdlog::stderr_logger_mt("compass");
  spdlog::set_default_logger(logger);
  spdlog::set_pattern("[%l] %v");
  const char *level = std::getenv("COMPASS_LOG");
  spdlog::set_level(level ? spdlog::level::from_str(level) : spdlog::level::warn);
}

void Emit(const std::string &text, const std::string &out_path) {
  if (out_path.empty()) {
    std::cout << text;
  } else {
    compass::WriteFile(out_path, text);
    spdlog::info("wrote {}", out_path);
  }
}

compass::ReportFormat FormatOrThrow(const std::string &name) {
  auto format = compass::ParseReportFormat(name);
  if (!format) throw CLI::ValidationError("--format", "unknown format " + name);
  return *format;
}

// Rebuilds the analysis a report was produced from.
compass::Analysis ReloadAnalysis(const compass::CompartmentReport &report) {
  if (report.sources.empty()) {
    compass::ThrowInvalid("report does not record its sources; re-run analyze");
  }
  compass::PipelineInputs inputs;
  inputs.icfg_path = report.sources.icfg;
  inputs.profile_paths = report.sources.profiles;
  inputs.callgraph_path = report.sources.callgraph;
  inputs.labels_path = report.sources.labels;
  inputs.corpus_path = report.sources.corpus;
  return compass::Analysis::FromFiles(inputs, report.config);
}

std::vector<std::string> SplitCommas(const std::string &s) {
  std::vector<std::string> out;
  size_t pos = 0;
  while (pos <= s.size()) {
    size_t end = s.find(',', pos);
    if (end == std::string::npos) end = s.size();
    if (end > pos) out.push_back(s.substr(pos, end - pos));
    pos = end + 1;
  }
  return out;
}

compass::service::HttpService *g_service = nullptr;

void HandleSignal(int) {
  if (g_service) g_service->Stop();
}

}  // namespace

int main(int argc, char **argv) {
  SetUpLogging();
  CLI::App app{"Compartment analysis for fuzzing campaigns"};
  app.require_subcommand(1);

  // analyze
  compass::PipelineInputs inputs;
  compass::AnalysisConfig config;
  std::string format = "table";
  std::string roots;
  std::string columns;
  std::string out_path;
  size_t max_width = 0;
  auto *analyze = app.add_subcommand("analyze", "Rank compartments");
  analyze->add_option("--icfg", inputs.icfg_path, "ICFG document")->required();
  analyze->add_option("--profile", inputs.profile_paths, "Profile(s), merged")
      ->required();
  analyze->add_option("--callgraph", inputs.callgraph_path, "Callgraph log")
      ->required();
  analyze->add_option("--labels", inputs.labels_path, "Label log");
  analyze->add_option("--corpus", inputs.corpus_path, "Per-input coverage manifest");
  analyze->add_option("--max-exec-count", config.max_exec_count,
                      "Saturation threshold")
      ->capture_default_str();
  analyze->add_option("--top", config.top_k, "Report size")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  analyze->add_option("--format", format, "table|json|csv")->capture_default_str();
  analyze->add_option("--roots", roots, "Comma-separated harness entry functions");
  analyze->add_option("--columns", columns, "Comma-separated columns (table/csv)");
  analyze->add_option("--max-width", max_width, "Cell width limit (table)");
  analyze->add_option("--out", out_path, "Write here instead of stdout");

  // whatif
  std::string report_path;
  std::string unlock_id;
  std::string whatif_format = "json";
  auto *whatif = app.add_subcommand("whatif", "Re-rank as if a compartment were unlocked");
  whatif->add_option("--report", report_path, "Report (json)")->required();
  whatif->add_option("--unlock", unlock_id, "Compartment id fn:block")->required();
  whatif->add_option("--format", whatif_format, "table|json|csv")
      ->capture_default_str();
  whatif->add_option("--out", out_path, "Write here instead of stdout");

  // stability
  std::string later_profile;
  std::string other_report;
  size_t k = compass::AnalysisConfig::kDefaultTopK;
  auto *stability = app.add_subcommand("stability", "Still-locked count or top-K overlap");
  stability->add_option("--report", report_path, "Report (json)")->required();
  auto *later_opt =
      stability->add_option("--later-profile", later_profile, "Later profile");
  auto *other_opt =
      stability->add_option("--other-report", other_report, "Second report (json)");
  stability->add_option("--k", k, "Top-K size")->capture_default_str();
  later_opt->excludes(other_opt);

  // evaluate
  std::string candidate_path;
  auto *evaluate = app.add_subcommand("evaluate", "Evaluate candidate inputs");
  evaluate->add_option("--report", report_path, "Report (json)")->required();
  evaluate->add_option("--candidate-coverage", candidate_path,
                       "Coverage manifest of the candidate(s)")
      ->required();

  // simulate
  std::string spec_path;
  std::string seeds_dir;
  std::string sim_out;
  uint64_t iters = 1;
  uint64_t rng_seed = 0;
  uint64_t flags = 0;
  uint64_t step_budget = compass::sim::ExecOptions::kDefaultStepBudget;
  auto *simulate = app.add_subcommand("simulate", "Fuzz a simulated target");
  simulate->add_option("--spec", spec_path, "Sim spec")->required();
  simulate->add_option("--seeds", seeds_dir, "Seed directory")->required();
  simulate->add_option("--iters", iters, "Mutation iterations")->required();
  simulate->add_option("--rng-seed", rng_seed, "PRNG seed")->required();
  simulate->add_option("--out", sim_out, "Output directory")->required();
  simulate->add_option("--flags", flags, "Harness flag bits")->capture_default_str();
  simulate->add_option("--step-budget", step_budget, "Steps per execution")
      ->capture_default_str();

  // serve
  std::string state_dir;
  std::string listen = "127.0.0.1:8080";
  auto *serve = app.add_subcommand("serve", "Serve the HTTP API");
  serve->add_option("--state", state_dir, "State directory")->required();
  serve->add_option("--listen", listen, "host:port")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError &e) {
    int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }

  try {
    if (*analyze) {
      if (!roots.empty()) config.roots = SplitCommas(roots);
      compass::RenderOptions opts;
      opts.format = FormatOrThrow(format);
      if (!columns.empty()) opts.columns = SplitCommas(columns);
      opts.max_cell_width = max_width;
      spdlog::info("analyzing {} with {} profile(s)", inputs.icfg_path,
                   inputs.profile_paths.size());
      compass::CompartmentReport report = compass::RunPipeline(inputs, config);
      spdlog::info("{} compartment(s) ranked", report.entries.size());
      Emit(compass::Render(report, opts), out_path);
    } else if (*whatif) {
      compass::RenderOptions opts;
      opts.format = FormatOrThrow(whatif_format);
      compass::CompartmentReport report =
          compass::LoadReport(compass::ReadFile(report_path));
      compass::Analysis analysis = ReloadAnalysis(report);
      compass::CompartmentReport current = analysis.Replay(report.closed);
      compass::CompartmentReport next =
          analysis.Unlock(current, unlock_id, compass::CompartmentStatus::kResolved);
      Emit(compass::Render(next, opts), out_path);
    } else if (*stability) {
      if (later_profile.empty() && other_report.empty()) {
        throw CLI::ValidationError("stability",
                                   "needs --later-profile or --other-report");
      }
      compass::CompartmentReport report =
          compass::LoadReport(compass::ReadFile(report_path));
      nlohmann::ordered_json out;
      if (!later_profile.empty()) {
        compass::ProfileSnapshot later =
            compass::LoadProfile(compass::ReadFile(later_profile), "later");
        out["still_locked"] = compass::StillLocked(report, later);
        out["entries"] = report.entries.size();
      } else {
        compass::CompartmentReport other =
            compass::LoadReport(compass::ReadFile(other_report));
        compass::OverlapResult r = compass::TopKOverlap(report, other, k);
        out["topk_overlap"] = r.overlap;
        out["k"] = r.k;
        out["truncated"] = r.truncated;
        if (r.truncated) spdlog::warn("k exceeds a report's length");
      }
      std::cout << out.dump(2) << "\n";
    } else if (*evaluate) {
      compass::CompartmentReport report =
          compass::LoadReport(compass::ReadFile(report_path));
      auto candidates =
          compass::LoadCoverageManifest(compass::ReadFile(candidate_path));
      nlohmann::ordered_json out = nlohmann::ordered_json::array();
      for (const compass::InputCoverage &c : candidates) {
        out.push_back(compass::EvaluationToJson(compass::EvaluateCandidate(report, c)));
      }
      std::cout << out.dump(2) << "\n";
    } else if (*simulate) {
      compass::sim::SimTarget target =
          compass::sim::SimTarget::Load(compass::ReadFile(spec_path));
      compass::sim::FuzzRunConfig run;
      std::vector<fs::path> files;
      for (const auto &entry : fs::directory_iterator(seeds_dir)) {
        if (entry.is_regular_file()) files.push_back(entry.path());
      }
      std::sort(files.begin(), files.end());
      for (const fs::path &f : files) {
        run.seeds.push_back(compass::ReadFile(f));
        run.seed_names.push_back(f.filename().string());
      }
      run.iterations = iters;
      run.rng_seed = rng_seed;
      run.harness_flags = flags;
      run.exec.step_budget = step_budget;
      compass::sim::FuzzResult result = compass::sim::SimFuzz(target, run);
      compass::sim::WriteFuzzOutputs(target, result, sim_out);
      spdlog::info("{} executions, {} queued, {} truncated", result.executions,
                   result.queue.size(), result.truncated_executions);
      nlohmann::ordered_json summary;
      summary["executions"] = result.executions;
      summary["queue"] = result.queue.size();
      summary["truncated_executions"] = result.truncated_executions;
      summary["out"] = sim_out;
      std::cout << summary.dump(2) << "\n";
    } else if (*serve) {
      auto [host, port] = compass::service::ParseListenAddress(listen);
      compass::service::SessionStore store(state_dir);
      compass::service::HttpService service(store);
      if (!service.Bind(host, port)) {
        spdlog::error("cannot bind {}", listen);
        return kExitUsage;
      }
      g_service = &service;
      std::signal(SIGINT, HandleSignal);
      std::signal(SIGTERM, HandleSignal);
      spdlog::info("serving {} session(s) on {}", store.Ids().size(), listen);
      service.ListenAfterBind();
      g_service = nullptr;
    }
  } catch (const CLI::Error &e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const Error &e) {
    std::cerr << "error: " << e.what() << "\n";
    return e.code() == ErrorCode::kInternal ? kExitInternal : kExitInput;
  } catch (const fs::filesystem_error &e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInput;
  } catch (const std::exception &e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return kExitInternal;
  }
  return 0;
}
