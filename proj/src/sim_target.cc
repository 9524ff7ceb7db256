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

#include "compass/sim_target.h"

#include <algorithm>
#include <cstdio>
#include <random>
#include <tuple>

#include "compass/error.h"
#include "compass/file_util.h"
#include "compass/labels.h"

namespace compass::sim {

using nlohmann::json;

bool Guard::Holds(std::string_view input, uint64_t flags) const {
  switch (kind) {
    case Kind::kBytes:
      return offset <= input.size() && input.size() - offset >= value.size() &&
             input.substr(offset, value.size()) == value;
    case Kind::kFlag:
      return ((flags >> bit) & 1) != 0;
    case Kind::kLenGe:
      return input.size() >= n;
  }
  return false;
}

LabelSet Guard::Labels() const {
  return kind == Kind::kFlag ? LabelSet(LabelSet::kHarness)
                             : LabelSet(LabelSet::kInput);
}

namespace {

std::string DecodeHex(const std::string &hex, const std::string &where) {
  if (hex.size() % 2 != 0 || hex.empty()) {
    ThrowInvalid(where + ": guard value must be a non-empty even-length hex string");
  }
  auto nibble = [&](char c) -> int {
    if (c >= '0' && c <= '9') return c - '0';
    if (c >= 'a' && c <= 'f') return c - 'a' + 10;
    if (c >= 'A' && c <= 'F') return c - 'A' + 10;
    ThrowInvalid(where + ": bad hex digit in guard value");
  };
  std::string out;
  for (size_t i = 0; i < hex.size(); i += 2) {
    out += static_cast<char>(nibble(hex[i]) * 16 + nibble(hex[i + 1]));
  }
  return out;
}

size_t NonNegative(const json &obj, const char *key, const std::string &where) {
  auto it = obj.find(key);
  if (it == obj.end() || !it->is_number_integer() ||
      (!it->is_number_unsigned() && it->get<int64_t>() < 0)) {
    ThrowInvalid(where + ": \"" + key + "\" must be a non-negative integer");
  }
  return it->get<size_t>();
}

Guard ParseGuard(const json &g, const std::string &where) {
  if (!g.is_object() || !g.contains("kind") || !g["kind"].is_string()) {
    ThrowInvalid(where + ": guard needs a string \"kind\"");
  }
  Guard guard;
  const std::string kind = g["kind"].get<std::string>();
  if (kind == "bytes") {
    guard.kind = Guard::Kind::kBytes;
    guard.offset = NonNegative(g, "offset", where);
    if (!g.contains("value") || !g["value"].is_string()) {
      ThrowInvalid(where + ": bytes guard needs a hex \"value\"");
    }
    guard.value = DecodeHex(g["value"].get<std::string>(), where);
  } else if (kind == "flag") {
    guard.kind = Guard::Kind::kFlag;
    size_t bit = NonNegative(g, "bit", where);
    if (bit >= 64) ThrowInvalid(where + ": flag bit out of range");
    guard.bit = static_cast<int>(bit);
  } else if (kind == "len_ge") {
    guard.kind = Guard::Kind::kLenGe;
    guard.n = NonNegative(g, "n", where);
  } else {
    ThrowInvalid(where + ": unknown guard kind \"" + kind + "\"");
  }
  return guard;
}

// Table keys are a single character or "0xNN".
uint8_t ParseTableKey(const std::string &key, const std::string &where) {
  if (key.size() == 1) return static_cast<uint8_t>(key[0]);
  if (key.size() == 4 && key[0] == '0' && (key[1] == 'x' || key[1] == 'X')) {
    return static_cast<uint8_t>(DecodeHex(key.substr(2), where)[0]);
  }
  ThrowInvalid(where + ": table key \"" + key +
               "\" must be one character or 0xNN");
}

}  // namespace

SimTarget SimTarget::Load(std::string_view source) {
  json doc = json::parse(source, nullptr, false);
  if (doc.is_discarded()) ThrowInvalid("sim spec: not a valid JSON document");
  SimTarget t;
  t.icfg_ = IcfgFromJson(doc);

  std::string root = "main";
  if (auto it = doc.find("root"); it != doc.end()) {
    if (!it->is_string()) ThrowInvalid("sim spec: \"root\" must be a string");
    root = it->get<std::string>();
  }
  auto root_index = t.icfg_.FindFunction(root);
  if (!root_index) ThrowInvalid("sim spec: unknown root function " + root);
  t.root_ = *root_index;

  const size_t nsites = t.icfg_.indirect_sites().size();
  t.tables_.resize(nsites);
  t.table_offsets_.assign(nsites, 0);
  t.guards_.resize(t.icfg_.function_count());

  const json &fns = doc["functions"];
  for (size_t f = 0; f < fns.size(); ++f) {
    const FunctionRecord &fn = t.icfg_.function(static_cast<int>(f));
    const json &blocks = fns[f]["blocks"];
    t.guards_[f].resize(fn.blocks.size());
    for (size_t b = 0; b < blocks.size(); ++b) {
      const json &jb = blocks[b];
      const std::string where = "sim block " + fn.name + ":" + fn.blocks[b].id;
      const size_t nsucc = fn.blocks[b].succs.size();
      if (auto g = jb.find("guard"); g != jb.end() && !g->is_null()) {
        if (nsucc != 2) ThrowInvalid(where + ": guarded block needs two successors");
        t.guards_[f][b] = ParseGuard(*g, where);
      } else if (nsucc > 1) {
        ThrowInvalid(where + ": unguarded block has more than one successor");
      }
      if (auto calls = jb.find("calls"); calls != jb.end()) {
        for (const json &jc : *calls) {
          if (jc.value("kind", "") != "indirect") continue;
          const int site = *t.icfg_.FindIndirectSite(jc["site"].get<std::string>());
          const std::string swhere = where + " site " + jc["site"].get<std::string>();
          if (jc.contains("offset")) {
            t.table_offsets_[site] = NonNegative(jc, "offset", swhere);
          }
          if (auto table = jc.find("table"); table != jc.end()) {
            if (!table->is_object()) ThrowInvalid(swhere + ": table must be an object");
            for (const auto &[key, target] : table->items()) {
              if (!target.is_string()) {
                ThrowInvalid(swhere + ": table targets must be function names");
              }
              auto callee = t.icfg_.FindFunction(target.get<std::string>());
              if (!callee) {
                ThrowInvalid(swhere + ": unknown table target " +
                             target.get<std::string>());
              }
              t.tables_[site][ParseTableKey(key, swhere)] = *callee;
            }
          }
        }
      }
    }
  }
  return t;
}

InputCoverage ExecutionTrace::Coverage(const Icfg &icfg,
                                       std::string input_name) const {
  InputCoverage cov;
  cov.input = std::move(input_name);
  for (int f = 0; f < static_cast<int>(hits.size()); ++f) {
    const FunctionRecord &fn = icfg.function(f);
    for (int b = 0; b < static_cast<int>(hits[f].size()); ++b) {
      if (hits[f][b] > 0) cov.covered.insert({fn.name, fn.blocks[b].id});
    }
  }
  return cov;
}

namespace {

class Interpreter {
 public:
  Interpreter(const SimTarget &target, std::string_view input, uint64_t flags,
              const ExecOptions &options, ExecutionTrace &trace)
      : target_(target), input_(input), flags_(flags), options_(options),
        trace_(trace) {}

  // Returns false once the execution is truncated.
  bool Run(int function, size_t depth) {
    if (depth > options_.max_call_depth) return Truncate();
    const Icfg &icfg = target_.icfg();
    const FunctionRecord &fn = icfg.function(function);
    int block = icfg.entry_block(function);
    while (true) {
      if (trace_.steps >= options_.step_budget) return Truncate();
      ++trace_.steps;
      ++trace_.hits[function][block];
      for (const CallSiteRecord &call : fn.blocks[block].calls) {
        int callee = -1;
        if (call.kind == CallSiteRecord::Kind::kDirect) {
          callee = *icfg.FindFunction(call.name);
        } else {
          const int site = *icfg.FindIndirectSite(call.name);
          const size_t offset = target_.table_offset(site);
          if (offset >= input_.size()) continue;
          const auto &table = target_.table(site);
          auto it = table.find(static_cast<uint8_t>(input_[offset]));
          if (it == table.end()) continue;
          callee = it->second;
          ++trace_.indirect[{site, callee}];
        }
        if (!Run(callee, depth + 1)) return false;
      }
      const auto &succ = icfg.successors(function, block);
      if (const auto &guard = target_.guard({function, block})) {
        trace_.labels[{function, block}] |= guard->Labels();
        block = guard->Holds(input_, flags_) ? succ[0] : succ[1];
      } else if (succ.empty()) {
        return true;
      } else {
        block = succ[0];
      }
    }
  }

 private:
  bool Truncate() {
    trace_.truncated = true;
    return false;
  }

  const SimTarget &target_;
  std::string_view input_;
  uint64_t flags_;
  const ExecOptions &options_;
  ExecutionTrace &trace_;
};

}  // namespace

ExecutionTrace Execute(const SimTarget &target, std::string_view input,
                       uint64_t flags, const ExecOptions &options) {
  ExecutionTrace trace;
  const Icfg &icfg = target.icfg();
  trace.hits.resize(icfg.function_count());
  for (int f = 0; f < static_cast<int>(icfg.function_count()); ++f) {
    trace.hits[f].assign(icfg.function(f).blocks.size(), 0);
  }
  Interpreter(target, input, flags, options, trace).Run(target.root(), 0);
  return trace;
}

namespace {

class Mutator {
 public:
  explicit Mutator(uint64_t seed) : rng_(seed) {}

  uint64_t Below(uint64_t n) { return rng_() % n; }

  std::string Mutate(std::string data,
                     const std::vector<std::pair<std::string, std::string>> &queue,
                     size_t max_size) {
    switch (Below(5)) {
      case 0:  // flip one bit
        if (data.empty()) {
          data.push_back(RandomByte());
        } else {
          data[Below(data.size())] ^= static_cast<char>(1u << Below(8));
        }
        break;
      case 1:  // replace one byte
        if (data.empty()) {
          data.push_back(RandomByte());
        } else {
          data[Below(data.size())] = RandomByte();
        }
        break;
      case 2: {  // duplicate a block
        if (data.empty()) {
          data.push_back(RandomByte());
          break;
        }
        const size_t start = Below(data.size());
        const size_t len = 1 + Below(std::min<size_t>(data.size() - start, 16));
        const std::string chunk = data.substr(start, len);
        data.insert(Below(data.size() + 1), chunk);
        break;
      }
      case 3: {  // delete a block
        if (data.size() <= 1) {
          data.assign(1, RandomByte());
          break;
        }
        const size_t start = Below(data.size());
        size_t len = 1 + Below(std::min<size_t>(data.size() - start, 16));
        if (len == data.size()) --len;
        data.erase(start, len);
        break;
      }
      default: {  // splice with another queue entry
        const std::string &other = queue[Below(queue.size())].second;
        const size_t cut = Below(data.size() + 1);
        const size_t from = Below(other.size() + 1);
        data = data.substr(0, cut) + other.substr(from);
        break;
      }
    }
    if (data.size() > max_size) data.resize(max_size);
    return data;
  }

 private:
  char RandomByte() { return static_cast<char>(Below(256)); }

  std::mt19937_64 rng_;
};

std::string Numbered(const char *prefix, uint64_t n, int width) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%s%0*llu", prefix, width,
                static_cast<unsigned long long>(n));
  return buf;
}

}  // namespace

FuzzResult SimFuzz(const SimTarget &target, const FuzzRunConfig &config) {
  if (config.seeds.empty()) ThrowInvalid("sim_fuzz: empty seed list");
  if (!config.seed_names.empty() &&
      config.seed_names.size() != config.seeds.size()) {
    ThrowInvalid("sim_fuzz: seed_names does not match seeds");
  }
  const Icfg &icfg = target.icfg();
  const int nf = static_cast<int>(icfg.function_count());
  std::vector<std::vector<uint64_t>> totals(nf);
  std::vector<std::vector<bool>> seen(nf);
  for (int f = 0; f < nf; ++f) {
    totals[f].assign(icfg.function(f).blocks.size(), 0);
    seen[f].assign(icfg.function(f).blocks.size(), false);
  }
  std::map<std::pair<int, int>, uint64_t> indirect;
  std::map<BlockRef, LabelSet> labels;

  FuzzResult result;
  // Executes one input, folds it into the totals and reports new coverage.
  auto run = [&](const std::string &input, ExecutionTrace &trace) {
    trace = Execute(target, input, config.harness_flags, config.exec);
    ++result.executions;
    if (trace.truncated) ++result.truncated_executions;
    if (config.record_executed) result.executed.push_back(input);
    bool novel = false;
    for (int f = 0; f < nf; ++f) {
      for (size_t b = 0; b < totals[f].size(); ++b) {
        const uint64_t h = trace.hits[f][b];
        if (h == 0) continue;
        totals[f][b] += h;
        if (!seen[f][b]) {
          seen[f][b] = true;
          novel = true;
        }
      }
    }
    for (const auto &[key, n] : trace.indirect) indirect[key] += n;
    for (const auto &[ref, l] : trace.labels) labels[ref] |= l;
    return novel;
  };

  ExecutionTrace trace;
  for (size_t i = 0; i < config.seeds.size(); ++i) {
    run(config.seeds[i], trace);
    std::string name = config.seed_names.empty() ? Numbered("seed_", i, 3)
                                                 : config.seed_names[i];
    result.per_input.push_back(trace.Coverage(icfg, name));
    result.queue.emplace_back(std::move(name), config.seeds[i]);
  }

  Mutator mutator(config.rng_seed);
  for (uint64_t it = 0; it < config.iterations; ++it) {
    const std::string &parent = result.queue[it % result.queue.size()].second;
    std::string mutant = mutator.Mutate(parent, result.queue, config.max_input_size);
    if (run(mutant, trace)) {
      std::string name = Numbered("id_", it, 6);
      result.per_input.push_back(trace.Coverage(icfg, name));
      result.queue.emplace_back(std::move(name), std::move(mutant));
    }
  }

  result.profile.set_tag("sim");
  for (int f = 0; f < nf; ++f) {
    const FunctionRecord &fn = icfg.function(f);
    for (size_t b = 0; b < totals[f].size(); ++b) {
      if (totals[f][b] > 0) result.profile.Add({fn.name, fn.blocks[b].id}, totals[f][b]);
    }
  }
  for (const auto &[key, count] : indirect) {
    const IndirectSiteInfo &site = icfg.indirect_sites()[key.first];
    result.callgraph.push_back({site.site, icfg.function(site.owner.function).name,
                                icfg.function(key.second).name, count});
  }
  std::sort(result.callgraph.begin(), result.callgraph.end(),
            [](const DynamicCallEdge &a, const DynamicCallEdge &b) {
              return std::tie(a.site, a.target) < std::tie(b.site, b.target);
            });
  for (const auto &[ref, l] : labels) {
    const FunctionRecord &fn = icfg.function(ref.function);
    result.labels[{fn.name, fn.blocks[ref.block].id}] |= l;
  }
  return result;
}

void WriteFuzzOutputs(const SimTarget &target, const FuzzResult &result,
                      const std::filesystem::path &dir) {
  std::filesystem::create_directories(dir / "queue");
  WriteFile(dir / "profile.jsonl", DumpProfile(result.profile));
  WriteFile(dir / "callgraph.jsonl", DumpCallEdges(result.callgraph));
  WriteFile(dir / "labels.jsonl", DumpLabels(result.labels));
  WriteFile(dir / "coverage.jsonl", DumpCoverageManifest(result.per_input));
  WriteFile(dir / "icfg.json", IcfgToJson(target.icfg()).dump(2) + "\n");
  for (const auto &[name, bytes] : result.queue) {
    WriteFile(dir / "queue" / name, bytes);
  }
}

}  // namespace compass::sim
