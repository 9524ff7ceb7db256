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

#include "compass/service.h"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <random>

#include "compass/error.h"
#include "compass/file_util.h"
#include "compass/report.h"
#include "httplib.h"

namespace compass::service {

using nlohmann::json;
using nlohmann::ordered_json;

namespace {

constexpr char kActionsFile[] = "actions.jsonl";

json ConfigToJson(const AnalysisConfig &config) {
  return json{{"max_exec_count", config.max_exec_count},
              {"top_k", config.top_k},
              {"roots", config.roots}};
}

// Accepts any JSON integer >= `min`, signed or not.
bool IntegerAtLeast(const json &j, int64_t min) {
  if (j.is_number_unsigned()) {
    return min <= 0 || j.get<uint64_t>() >= static_cast<uint64_t>(min);
  }
  return j.is_number_integer() && j.get<int64_t>() >= min;
}

AnalysisConfig ConfigFromJson(const json &j) {
  AnalysisConfig config;
  if (j.is_null()) return config;
  if (!j.is_object()) ThrowInvalid("config must be an object");
  if (auto it = j.find("max_exec_count"); it != j.end()) {
    if (!IntegerAtLeast(*it, 0)) {
      ThrowInvalid("config: max_exec_count must be a non-negative integer");
    }
    config.max_exec_count = it->get<uint64_t>();
  }
  if (auto it = j.find("top_k"); it != j.end()) {
    if (!IntegerAtLeast(*it, 1)) ThrowInvalid("config: top_k must be a positive integer");
    config.top_k = it->get<size_t>();
  }
  if (auto it = j.find("roots"); it != j.end()) {
    if (!it->is_array()) ThrowInvalid("config: roots must be an array");
    config.roots.clear();
    for (const json &r : *it) {
      if (!r.is_string()) ThrowInvalid("config: roots must be strings");
      config.roots.push_back(r.get<std::string>());
    }
  }
  config.Validate();
  return config;
}

std::string OptionalText(const json &request, const char *inline_key,
                         const char *path_key) {
  if (auto it = request.find(inline_key); it != request.end() && !it->is_null()) {
    if (!it->is_string()) ThrowInvalid(std::string(inline_key) + " must be a string");
    return it->get<std::string>();
  }
  if (auto it = request.find(path_key); it != request.end() && !it->is_null()) {
    if (!it->is_string()) ThrowInvalid(std::string(path_key) + " must be a string");
    return ReadFile(it->get<std::string>());
  }
  return "";
}

PipelineDocuments DocumentsFromRequest(const json &request) {
  if (!request.is_object()) ThrowInvalid("request body must be a JSON object");
  PipelineDocuments docs;
  if (auto it = request.find("icfg"); it != request.end()) {
    docs.icfg = it->is_string() ? it->get<std::string>() : it->dump();
  } else if (auto p = request.find("icfg_path"); p != request.end() && p->is_string()) {
    docs.icfg = ReadFile(p->get<std::string>());
  } else {
    ThrowInvalid("missing icfg");
  }
  if (auto it = request.find("profiles"); it != request.end()) {
    if (!it->is_array()) ThrowInvalid("profiles must be an array of strings");
    for (size_t i = 0; i < it->size(); ++i) {
      if (!(*it)[i].is_string()) ThrowInvalid("profiles must be an array of strings");
      docs.profiles.emplace_back("profile" + std::to_string(i),
                                 (*it)[i].get<std::string>());
    }
  } else if (auto p = request.find("profile_paths"); p != request.end()) {
    if (!p->is_array()) ThrowInvalid("profile_paths must be an array of strings");
    for (const json &path : *p) {
      if (!path.is_string()) ThrowInvalid("profile_paths must be an array of strings");
      const std::filesystem::path fp(path.get<std::string>());
      docs.profiles.emplace_back(fp.stem().string(), ReadFile(fp));
    }
  }
  if (docs.profiles.empty()) ThrowInvalid("missing profiles");
  docs.callgraph = OptionalText(request, "callgraph", "callgraph_path");
  docs.labels = OptionalText(request, "labels", "labels_path");
  docs.corpus = OptionalText(request, "corpus", "corpus_path");
  return docs;
}

void PersistDocuments(const std::filesystem::path &dir,
                      const PipelineDocuments &docs,
                      const AnalysisConfig &config) {
  WriteFile(dir / "icfg.json", docs.icfg);
  json profiles = json::array();
  for (size_t i = 0; i < docs.profiles.size(); ++i) {
    const std::string file = "profile_" + std::to_string(i) + ".jsonl";
    WriteFile(dir / file, docs.profiles[i].second);
    profiles.push_back({{"tag", docs.profiles[i].first}, {"file", file}});
  }
  WriteFile(dir / "profiles.json", profiles.dump(2));
  WriteFile(dir / "callgraph.jsonl", docs.callgraph);
  WriteFile(dir / "labels.jsonl", docs.labels);
  WriteFile(dir / "corpus.jsonl", docs.corpus);
  WriteFile(dir / "config.json", ConfigToJson(config).dump(2));
  WriteFile(dir / kActionsFile, "");
}

std::string NewSessionId() {
  static std::mt19937_64 rng{std::random_device{}()};
  static std::mutex mu;
  std::lock_guard<std::mutex> lock(mu);
  static constexpr char kHex[] = "0123456789abcdef";
  uint64_t v = rng();
  std::string id;
  for (int i = 0; i < 16; ++i, v >>= 4) id += kHex[v & 15];
  return id;
}

bool IsClosed(const CompartmentReport &report, std::string_view cid) {
  for (const Compartment &c : report.closed) {
    if (c.id == cid) return true;
  }
  return false;
}

bool IsLocked(const CompartmentReport &report, std::string_view cid) {
  for (const Compartment &c : report.entries) {
    if (c.id == cid) return true;
  }
  return false;
}

}  // namespace

Session::Session(std::string id, std::filesystem::path dir,
                 PipelineDocuments docs, AnalysisConfig config)
    : id_(std::move(id)),
      dir_(std::move(dir)),
      analysis_(Analysis::FromDocuments(docs, std::move(config))),
      report_(analysis_.Run()) {}

std::unique_ptr<Session> Session::Open(const std::filesystem::path &dir) {
  PipelineDocuments docs;
  docs.icfg = ReadFile(dir / "icfg.json");
  json profiles = json::parse(ReadFile(dir / "profiles.json"));
  for (const json &p : profiles) {
    docs.profiles.emplace_back(p.at("tag").get<std::string>(),
                               ReadFile(dir / p.at("file").get<std::string>()));
  }
  docs.callgraph = ReadFile(dir / "callgraph.jsonl");
  docs.labels = ReadFile(dir / "labels.jsonl");
  docs.corpus = ReadFile(dir / "corpus.jsonl");
  AnalysisConfig config = ConfigFromJson(json::parse(ReadFile(dir / "config.json")));
  auto session = std::make_unique<Session>(dir.filename().string(), dir,
                                           std::move(docs), std::move(config));
  std::string log = ReadFile(dir / kActionsFile);
  size_t pos = 0;
  while (pos < log.size()) {
    size_t end = log.find('\n', pos);
    if (end == std::string::npos) end = log.size();
    if (end > pos) session->actions_.push_back(json::parse(log.substr(pos, end - pos)));
    pos = end + 1;
  }
  session->extra_corpus_.clear();
  CompartmentReport report = session->analysis_.Run();
  for (const json &action : session->actions_) {
    report = session->Apply(report, action, session->extra_corpus_, nullptr);
  }
  session->report_ = std::move(report);
  return session;
}

CompartmentReport Session::Attribute(CompartmentReport report,
                                     const std::vector<InputCoverage> &extra) const {
  std::vector<InputCoverage> corpus = analysis_.corpus();
  corpus.insert(corpus.end(), extra.begin(), extra.end());
  return AttributeCorpus(std::move(report), corpus);
}

CompartmentReport Session::Apply(const CompartmentReport &report,
                                 const json &action,
                                 std::vector<InputCoverage> &extra,
                                 CandidateEvaluation *evaluation) const {
  const std::string type = action.at("type").get<std::string>();
  if (type == "resolve") {
    const std::string cid = action.at("id").get<std::string>();
    if (IsClosed(report, cid)) {
      throw Error(ErrorCode::kConflict, "compartment " + cid + " already closed");
    }
    return Attribute(analysis_.Unlock(report, cid, CompartmentStatus::kResolved),
                     extra);
  }
  if (type == "candidate") {
    InputCoverage candidate = InputCoverageFromJson(action.at("candidate"));
    CandidateEvaluation eval = EvaluateCandidate(report, candidate);
    extra.push_back(candidate);
    CompartmentReport next = report;
    for (const std::string &cid : eval.Unlocked()) {
      // An earlier unlock in this batch may already have covered it.
      if (!IsLocked(next, cid)) continue;
      next = analysis_.Unlock(next, cid, CompartmentStatus::kUnlocked);
    }
    if (evaluation) *evaluation = std::move(eval);
    return Attribute(std::move(next), extra);
  }
  throw Error(ErrorCode::kInternal, "unknown action type " + type);
}

void Session::Append(const json &action) {
  std::ofstream out(dir_ / kActionsFile, std::ios::app | std::ios::binary);
  if (!out) throw Error(ErrorCode::kInternal, "cannot append to action log");
  out << action.dump() << '\n';
  out.flush();
  if (!out) throw Error(ErrorCode::kInternal, "cannot append to action log");
  actions_.push_back(action);
}

CompartmentReport Session::Report() const {
  std::shared_lock lock(mu_);
  return report_;
}

Compartment Session::GetCompartment(std::string_view cid) const {
  std::shared_lock lock(mu_);
  if (const Compartment *c = report_.Find(cid)) return *c;
  ThrowNotFound("unknown compartment " + std::string(cid));
}

CandidateEvaluation Session::PostCandidate(const InputCoverage &candidate) {
  std::unique_lock lock(mu_);
  json action = {{"type", "candidate"},
                 {"candidate", json::parse(InputCoverageToJson(candidate).dump())}};
  std::vector<InputCoverage> extra = extra_corpus_;
  CandidateEvaluation eval;
  CompartmentReport next = Apply(report_, action, extra, &eval);
  Append(action);
  extra_corpus_ = std::move(extra);
  report_ = std::move(next);
  return eval;
}

CompartmentReport Session::Resolve(std::string_view cid) {
  std::unique_lock lock(mu_);
  if (!IsClosed(report_, cid) && !IsLocked(report_, cid)) {
    ThrowNotFound("unknown compartment " + std::string(cid));
  }
  json action = {{"type", "resolve"}, {"id", std::string(cid)}};
  CompartmentReport next = Apply(report_, action, extra_corpus_, nullptr);
  Append(action);
  report_ = std::move(next);
  return report_;
}

ordered_json Session::Stability(const json &body) const {
  if (!body.is_object()) ThrowInvalid("request body must be a JSON object");
  CompartmentReport report = Report();
  ordered_json out;
  if (auto it = body.find("later_profile"); it != body.end()) {
    if (!it->is_string()) ThrowInvalid("later_profile must be a string");
    ProfileSnapshot later = LoadProfile(it->get<std::string>(), "later");
    out["still_locked"] = StillLocked(report, later, &analysis_.model().icfg());
    out["entries"] = report.entries.size();
    return out;
  }
  if (auto it = body.find("other_report"); it != body.end()) {
    CompartmentReport other = it->is_string() ? LoadReport(it->get<std::string>())
                                              : ReportFromJson(*it);
    size_t k = report.config.top_k;
    if (auto kit = body.find("k"); kit != body.end()) {
      if (!IntegerAtLeast(*kit, 1)) ThrowInvalid("k must be a positive integer");
      k = kit->get<size_t>();
    }
    OverlapResult r = TopKOverlap(report, other, k);
    out["topk_overlap"] = r.overlap;
    out["k"] = r.k;
    out["truncated"] = r.truncated;
    return out;
  }
  ThrowInvalid("stability request needs later_profile or other_report");
}

std::vector<json> Session::Actions() const {
  std::shared_lock lock(mu_);
  return actions_;
}

CompartmentReport Session::Replay() const {
  std::vector<json> actions = Actions();
  std::vector<InputCoverage> extra;
  CompartmentReport report = analysis_.Run();
  for (const json &action : actions) report = Apply(report, action, extra, nullptr);
  return report;
}

SessionStore::SessionStore(std::filesystem::path state_dir)
    : state_dir_(std::move(state_dir)) {
  const auto root = state_dir_ / "sessions";
  std::filesystem::create_directories(root);
  std::vector<std::filesystem::path> dirs;
  for (const auto &entry : std::filesystem::directory_iterator(root)) {
    if (entry.is_directory()) dirs.push_back(entry.path());
  }
  std::sort(dirs.begin(), dirs.end());
  for (const auto &dir : dirs) {
    auto session = Session::Open(dir);
    sessions_.emplace(session->id(), std::move(session));
  }
}

Session &SessionStore::Create(const json &request) {
  PipelineDocuments docs = DocumentsFromRequest(request);
  AnalysisConfig config =
      ConfigFromJson(request.is_object() && request.contains("config")
                         ? request["config"]
                         : json());
  std::string id = NewSessionId();
  const auto dir = state_dir_ / "sessions" / id;
  // Validate before touching disk.
  auto session = std::make_unique<Session>(id, dir, docs, config);
  PersistDocuments(dir, docs, config);
  std::unique_lock lock(mu_);
  Session &ref = *session;
  sessions_.emplace(id, std::move(session));
  return ref;
}

Session &SessionStore::Get(std::string_view id) const {
  std::shared_lock lock(mu_);
  auto it = sessions_.find(id);
  if (it == sessions_.end()) ThrowNotFound("unknown session " + std::string(id));
  return *it->second;
}

std::vector<std::string> SessionStore::Ids() const {
  std::shared_lock lock(mu_);
  std::vector<std::string> ids;
  for (const auto &[id, s] : sessions_) ids.push_back(id);
  return ids;
}

namespace {

int StatusFor(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidInput:
      return 422;
    case ErrorCode::kNotFound:
      return 404;
    case ErrorCode::kConflict:
      return 409;
    case ErrorCode::kInternal:
      return 500;
  }
  return 500;
}

void SendJson(httplib::Response &res, int status, const ordered_json &body) {
  res.status = status;
  res.set_content(body.dump(2) + "\n", "application/json");
}

void SendError(httplib::Response &res, int status, const std::string &message) {
  SendJson(res, status, ordered_json{{"error", message}});
}

// Runs `fn`, mapping errors onto statuses.
template <typename Fn>
void Guarded(httplib::Response &res, Fn &&fn) {
  try {
    fn();
  } catch (const Error &e) {
    SendError(res, StatusFor(e.code()), e.what());
  } catch (const json::exception &e) {
    SendError(res, 400, std::string("bad request: ") + e.what());
  } catch (const std::exception &e) {
    SendError(res, 500, e.what());
  }
}

// Malformed bodies surface as json::parse_error, which maps to 400.
json ParseBody(const httplib::Request &req) { return json::parse(req.body); }

}  // namespace

HttpService::HttpService(SessionStore &store)
    : store_(store), server_(std::make_unique<httplib::Server>()) {
  httplib::Server &s = *server_;

  s.Get("/healthz", [](const httplib::Request &, httplib::Response &res) {
    SendJson(res, 200, ordered_json{{"status", "ok"}});
  });

  s.Post("/sessions", [this](const httplib::Request &req, httplib::Response &res) {
    Guarded(res, [&] {
      Session &session = store_.Create(ParseBody(req));
      ordered_json body;
      body["id"] = session.id();
      body["report"] = ReportToJson(session.Report());
      SendJson(res, 201, body);
    });
  });

  s.Get(R"(/sessions/([^/]+)/report)",
        [this](const httplib::Request &req, httplib::Response &res) {
          Guarded(res, [&] {
            CompartmentReport report = store_.Get(req.matches[1].str()).Report();
            std::string format =
                req.has_param("format") ? req.get_param_value("format") : "json";
            auto parsed = ParseReportFormat(format);
            if (!parsed) {
              SendError(res, 400, "unknown format " + format);
              return;
            }
            RenderOptions opts;
            opts.format = *parsed;
            res.status = 200;
            res.set_content(Render(report, opts),
                            *parsed == ReportFormat::kJson ? "application/json"
                            : *parsed == ReportFormat::kCsv ? "text/csv"
                                                            : "text/plain");
          });
        });

  s.Get(R"(/sessions/([^/]+)/compartments/([^/]+))",
        [this](const httplib::Request &req, httplib::Response &res) {
          Guarded(res, [&] {
            Session &session = store_.Get(req.matches[1].str());
            CompartmentReport single;
            single.entries.push_back(session.GetCompartment(req.matches[2].str()));
            SendJson(res, 200, ReportToJson(single)["entries"][0]);
          });
        });

  s.Post(R"(/sessions/([^/]+)/candidates)",
         [this](const httplib::Request &req, httplib::Response &res) {
           Guarded(res, [&] {
             Session &session = store_.Get(req.matches[1].str());
             InputCoverage candidate = InputCoverageFromJson(ParseBody(req));
             CandidateEvaluation eval = session.PostCandidate(candidate);
             ordered_json body = EvaluationToJson(eval);
             body["report"] = ReportToJson(session.Report());
             SendJson(res, 200, body);
           });
         });

  s.Post(R"(/sessions/([^/]+)/compartments/([^/]+)/resolve)",
         [this](const httplib::Request &req, httplib::Response &res) {
           Guarded(res, [&] {
             Session &session = store_.Get(req.matches[1].str());
             SendJson(res, 200, ReportToJson(session.Resolve(req.matches[2].str())));
           });
         });

  s.Post(R"(/sessions/([^/]+)/stability)",
         [this](const httplib::Request &req, httplib::Response &res) {
           Guarded(res, [&] {
             Session &session = store_.Get(req.matches[1].str());
             SendJson(res, 200, session.Stability(ParseBody(req)));
           });
         });
}

HttpService::~HttpService() = default;

int HttpService::BindToAnyPort(const std::string &host) {
  return server_->bind_to_any_port(host);
}

bool HttpService::Bind(const std::string &host, int port) {
  return server_->bind_to_port(host, port);
}

bool HttpService::ListenAfterBind() { return server_->listen_after_bind(); }

void HttpService::Stop() { server_->stop(); }

std::pair<std::string, int> ParseListenAddress(std::string_view address) {
  const size_t colon = address.rfind(':');
  if (colon == std::string_view::npos) {
    ThrowInvalid("listen address must be host:port");
  }
  std::string host(address.substr(0, colon));
  if (host.empty()) host = "127.0.0.1";
  std::string_view port_text = address.substr(colon + 1);
  int port = 0;
  auto [ptr, ec] =
      std::from_chars(port_text.data(), port_text.data() + port_text.size(), port);
  if (ec != std::errc() || ptr != port_text.data() + port_text.size() ||
      port < 0 || port > 65535) {
    ThrowInvalid("bad port in listen address " + std::string(address));
  }
  return {host, port};
}

}  // namespace compass::service
