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

#ifndef COMPASS_SERVICE_H_
#define COMPASS_SERVICE_H_

// Analysis sessions for the triage UI, persisted as artifacts plus an action
// log under a state directory. A session's report is always the replay of its
// log against its artifacts.

#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <string>
#include <string_view>
#include <vector>

#include "compass/compartments.h"
#include "compass/evaluation.h"
#include "compass/pipeline.h"
#include "json.hpp"

namespace httplib {
class Server;
}  // namespace httplib

namespace compass::service {

class Session {
 public:
  Session(std::string id, std::filesystem::path dir, PipelineDocuments docs,
          AnalysisConfig config);

  const std::string &id() const { return id_; }

  CompartmentReport Report() const;
  // Throws Error(kNotFound) for an unknown compartment id.
  Compartment GetCompartment(std::string_view cid) const;
  CandidateEvaluation PostCandidate(const InputCoverage &candidate);
  // Throws kNotFound for unknown ids, kConflict if already closed.
  CompartmentReport Resolve(std::string_view cid);
  nlohmann::ordered_json Stability(const nlohmann::json &body) const;

  // The action log, oldest first.
  std::vector<nlohmann::json> Actions() const;
  // Recomputes the report from the artifacts and the action log.
  CompartmentReport Replay() const;

  // Re-opens a persisted session.
  static std::unique_ptr<Session> Open(const std::filesystem::path &dir);

 private:
  // Applies one logged action to `report`; `extra` collects candidate inputs.
  CompartmentReport Apply(const CompartmentReport &report,
                          const nlohmann::json &action,
                          std::vector<InputCoverage> &extra,
                          CandidateEvaluation *evaluation) const;
  CompartmentReport Attribute(CompartmentReport report,
                              const std::vector<InputCoverage> &extra) const;
  void Append(const nlohmann::json &action);

  std::string id_;
  std::filesystem::path dir_;
  Analysis analysis_;
  mutable std::shared_mutex mu_;
  CompartmentReport report_;
  std::vector<nlohmann::json> actions_;
  std::vector<InputCoverage> extra_corpus_;
};

class SessionStore {
 public:
  // Loads every session already persisted under `state_dir`.
  explicit SessionStore(std::filesystem::path state_dir);

  // Request body: artifacts inline ("icfg" object or string, "profiles" list of
  // strings, "callgraph", "labels", "corpus" strings) or as paths ("icfg_path",
  // "profile_paths", "callgraph_path", "labels_path", "corpus_path"), plus an
  // optional "config" {"max_exec_count","top_k","roots"}.
  Session &Create(const nlohmann::json &request);
  // Throws Error(kNotFound) "unknown session <id>".
  Session &Get(std::string_view id) const;
  std::vector<std::string> Ids() const;

 private:
  std::filesystem::path state_dir_;
  mutable std::shared_mutex mu_;
  std::map<std::string, std::unique_ptr<Session>, std::less<>> sessions_;
};

// HTTP+JSON front end over a SessionStore.
class HttpService {
 public:
  explicit HttpService(SessionStore &store);
  ~HttpService();

  // Returns the bound port.
  int BindToAnyPort(const std::string &host);
  bool Bind(const std::string &host, int port);
  // Blocks until Stop().
  bool ListenAfterBind();
  void Stop();

 private:
  SessionStore &store_;
  std::unique_ptr<httplib::Server> server_;
};

// Parses "host:port" or ":port".
std::pair<std::string, int> ParseListenAddress(std::string_view address);

}  // namespace compass::service

#endif  // COMPASS_SERVICE_H_
