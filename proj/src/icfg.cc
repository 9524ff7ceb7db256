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

#include "compass/icfg.h"

#include <algorithm>
#include <map>
#include <set>
#include <string>
#include <utility>

#include "compass/error.h"
#include "jsonl.h"

namespace compass {

using nlohmann::json;

Icfg Icfg::Build(std::vector<FunctionRecord> functions) {
  Icfg g;
  g.functions_ = std::move(functions);
  const int nf = static_cast<int>(g.functions_.size());
  g.block_index_.resize(nf);
  g.entry_.resize(nf);
  g.succ_.resize(nf);
  g.pred_.resize(nf);

  for (int f = 0; f < nf; ++f) {
    const FunctionRecord &fn = g.functions_[f];
    if (fn.name.empty()) ThrowInvalid("function with empty name");
    if (!g.function_index_.emplace(fn.name, f).second) {
      ThrowInvalid("duplicate function " + fn.name);
    }
    uint64_t total = 0;
    auto &index = g.block_index_[f];
    for (int b = 0; b < static_cast<int>(fn.blocks.size()); ++b) {
      const BasicBlockRecord &bb = fn.blocks[b];
      if (!index.emplace(bb.id, b).second) {
        ThrowInvalid("duplicate block " + fn.name + ":" + bb.id);
      }
      if (bb.size == 0) ThrowInvalid("empty block " + fn.name + ":" + bb.id);
      total += bb.size;
    }
    if (total != fn.size) ThrowInvalid("size mismatch " + fn.name);
    auto entry = index.find(fn.entry);
    if (entry == index.end()) {
      ThrowInvalid("unknown entry block " + fn.name + ":" + fn.entry);
    }
    g.entry_[f] = entry->second;
  }

  for (int f = 0; f < nf; ++f) {
    const FunctionRecord &fn = g.functions_[f];
    const int nb = static_cast<int>(fn.blocks.size());
    g.succ_[f].resize(nb);
    g.pred_[f].resize(nb);
    for (int b = 0; b < nb; ++b) {
      const BasicBlockRecord &bb = fn.blocks[b];
      for (const BlockId &s : bb.succs) {
        auto it = g.block_index_[f].find(s);
        if (it == g.block_index_[f].end()) {
          ThrowInvalid("dangling successor " + fn.name + ":" + bb.id + "→" + s);
        }
        auto &out = g.succ_[f][b];
        if (std::find(out.begin(), out.end(), it->second) != out.end()) {
          ThrowInvalid("duplicate successor " + fn.name + ":" + bb.id + "→" +
                       s);
        }
        out.push_back(it->second);
        g.pred_[f][it->second].push_back(b);
      }
      for (const CallSiteRecord &call : bb.calls) {
        ++g.total_call_sites_;
        if (call.kind == CallSiteRecord::Kind::kDirect) {
          if (!g.function_index_.contains(call.name)) {
            ThrowInvalid("dangling call target " + fn.name + ":" + bb.id +
                         "→" + call.name);
          }
        } else {
          if (call.name.empty()) {
            ThrowInvalid("indirect call with empty site " + fn.name + ":" +
                         bb.id);
          }
          int site = static_cast<int>(g.indirect_sites_.size());
          if (!g.site_index_.emplace(call.name, site).second) {
            ThrowInvalid("duplicate indirect site " + call.name);
          }
          g.indirect_sites_.push_back({call.name, {f, b}});
        }
      }
    }
  }

  g.by_name_.resize(nf);
  for (int f = 0; f < nf; ++f) g.by_name_[f] = f;
  std::sort(g.by_name_.begin(), g.by_name_.end(), [&](int a, int b) {
    return g.functions_[a].name < g.functions_[b].name;
  });
  return g;
}

std::optional<int> Icfg::FindFunction(std::string_view name) const {
  auto it = function_index_.find(std::string(name));
  if (it == function_index_.end()) return std::nullopt;
  return it->second;
}

std::optional<BlockRef> Icfg::FindBlock(std::string_view function,
                                        std::string_view block) const {
  auto f = FindFunction(function);
  if (!f) return std::nullopt;
  auto it = block_index_[*f].find(std::string(block));
  if (it == block_index_[*f].end()) return std::nullopt;
  return BlockRef{*f, it->second};
}

std::optional<int> Icfg::FindIndirectSite(std::string_view site) const {
  auto it = site_index_.find(std::string(site));
  if (it == site_index_.end()) return std::nullopt;
  return it->second;
}

namespace {

const json &Field(const json &obj, const char *key, const std::string &where) {
  auto it = obj.find(key);
  if (it == obj.end()) ThrowInvalid(where + ": missing \"" + key + "\"");
  return *it;
}

std::string StringField(const json &obj, const char *key,
                        const std::string &where) {
  const json &v = Field(obj, key, where);
  if (!v.is_string()) ThrowInvalid(where + ": \"" + key + "\" must be a string");
  return v.get<std::string>();
}

uint64_t SizeField(const json &obj, const char *key, const std::string &where) {
  const json &v = Field(obj, key, where);
  if (!v.is_number_integer() ||
      (!v.is_number_unsigned() && v.get<int64_t>() < 0)) {
    ThrowInvalid(where + ": \"" + key + "\" must be a non-negative integer");
  }
  return v.get<uint64_t>();
}

}  // namespace

Icfg IcfgFromJson(const json &doc) {
  if (!doc.is_object()) ThrowInvalid("icfg: document must be an object");
  const json &fns = Field(doc, "functions", "icfg");
  if (!fns.is_array()) ThrowInvalid("icfg: \"functions\" must be an array");
  std::vector<FunctionRecord> functions;
  functions.reserve(fns.size());
  for (const json &jf : fns) {
    if (!jf.is_object()) ThrowInvalid("icfg: function must be an object");
    FunctionRecord fn;
    fn.name = StringField(jf, "name", "function");
    const std::string where = "function " + fn.name;
    fn.size = SizeField(jf, "size", where);
    fn.entry = StringField(jf, "entry", where);
    const json &blocks = Field(jf, "blocks", where);
    if (!blocks.is_array()) ThrowInvalid(where + ": \"blocks\" must be an array");
    for (const json &jb : blocks) {
      if (!jb.is_object()) ThrowInvalid(where + ": block must be an object");
      BasicBlockRecord bb;
      bb.id = StringField(jb, "id", where);
      const std::string bwhere = "block " + fn.name + ":" + bb.id;
      bb.size = SizeField(jb, "size", bwhere);
      if (auto it = jb.find("succs"); it != jb.end()) {
        if (!it->is_array()) ThrowInvalid(bwhere + ": \"succs\" must be an array");
        for (const json &s : *it) {
          if (!s.is_string()) ThrowInvalid(bwhere + ": successor must be a string");
          bb.succs.push_back(s.get<std::string>());
        }
      }
      if (auto it = jb.find("loc"); it != jb.end() && it->is_string()) {
        bb.loc = it->get<std::string>();
      }
      if (auto it = jb.find("calls"); it != jb.end()) {
        if (!it->is_array()) ThrowInvalid(bwhere + ": \"calls\" must be an array");
        for (const json &jc : *it) {
          if (!jc.is_object()) ThrowInvalid(bwhere + ": call must be an object");
          std::string kind = StringField(jc, "kind", bwhere);
          if (kind == "direct") {
            bb.calls.push_back(
                CallSiteRecord::Direct(StringField(jc, "target", bwhere)));
          } else if (kind == "indirect") {
            bb.calls.push_back(
                CallSiteRecord::Indirect(StringField(jc, "site", bwhere)));
          } else {
            ThrowInvalid(bwhere + ": unknown call kind \"" + kind + "\"");
          }
        }
      }
      fn.blocks.push_back(std::move(bb));
    }
    functions.push_back(std::move(fn));
  }
  return Icfg::Build(std::move(functions));
}

Icfg LoadIcfg(std::string_view source) {
  json doc = json::parse(source, nullptr, false);
  if (doc.is_discarded()) ThrowInvalid("icfg: not a valid JSON document");
  return IcfgFromJson(doc);
}

nlohmann::ordered_json IcfgToJson(const Icfg &icfg) {
  nlohmann::ordered_json fns = nlohmann::ordered_json::array();
  for (const FunctionRecord &fn : icfg.functions()) {
    nlohmann::ordered_json jf;
    jf["name"] = fn.name;
    jf["size"] = fn.size;
    jf["entry"] = fn.entry;
    nlohmann::ordered_json blocks = nlohmann::ordered_json::array();
    for (const BasicBlockRecord &bb : fn.blocks) {
      nlohmann::ordered_json jb;
      jb["id"] = bb.id;
      jb["size"] = bb.size;
      jb["succs"] = bb.succs;
      jb["loc"] = bb.loc;
      nlohmann::ordered_json calls = nlohmann::ordered_json::array();
      for (const CallSiteRecord &c : bb.calls) {
        if (c.kind == CallSiteRecord::Kind::kDirect) {
          calls.push_back({{"kind", "direct"}, {"target", c.name}});
        } else {
          calls.push_back({{"kind", "indirect"}, {"site", c.name}});
        }
      }
      jb["calls"] = std::move(calls);
      blocks.push_back(std::move(jb));
    }
    jf["blocks"] = std::move(blocks);
    fns.push_back(std::move(jf));
  }
  nlohmann::ordered_json doc;
  doc["functions"] = std::move(fns);
  return doc;
}

// Iterative algorithm of Cooper, Harvey and Kennedy over reverse postorder.
DominatorTree DominatorTree::Build(const Icfg &icfg, int function) {
  const int n = static_cast<int>(icfg.function(function).blocks.size());
  DominatorTree dt;
  dt.function_ = function;
  dt.root_ = icfg.entry_block(function);
  dt.idom_.assign(n, kNone);
  dt.reachable_.assign(n, false);
  dt.children_.assign(n, {});
  dt.pre_.assign(n, -1);
  dt.post_.assign(n, -1);

  // Postorder via explicit stack.
  std::vector<int> postorder;
  postorder.reserve(n);
  {
    std::vector<std::pair<int, size_t>> stack;
    stack.emplace_back(dt.root_, 0);
    dt.reachable_[dt.root_] = true;
    while (!stack.empty()) {
      auto &[b, i] = stack.back();
      const auto &succ = icfg.successors(function, b);
      if (i < succ.size()) {
        int s = succ[i++];
        if (!dt.reachable_[s]) {
          dt.reachable_[s] = true;
          stack.emplace_back(s, 0);
        }
      } else {
        postorder.push_back(b);
        stack.pop_back();
      }
    }
  }
  std::vector<int> po_number(n, -1);
  for (int i = 0; i < static_cast<int>(postorder.size()); ++i) {
    po_number[postorder[i]] = i;
  }

  std::vector<int> idom(n, kNone);
  idom[dt.root_] = dt.root_;
  auto intersect = [&](int a, int b) {
    while (a != b) {
      while (po_number[a] < po_number[b]) a = idom[a];
      while (po_number[b] < po_number[a]) b = idom[b];
    }
    return a;
  };
  bool changed = true;
  while (changed) {
    changed = false;
    for (auto it = postorder.rbegin(); it != postorder.rend(); ++it) {
      int b = *it;
      if (b == dt.root_) continue;
      int new_idom = kNone;
      for (int p : icfg.predecessors(function, b)) {
        if (idom[p] == kNone) continue;
        new_idom = new_idom == kNone ? p : intersect(p, new_idom);
      }
      if (idom[b] != new_idom) {
        idom[b] = new_idom;
        changed = true;
      }
    }
  }

  for (int b = 0; b < n; ++b) {
    if (!dt.reachable_[b]) {
      dt.unreachable_.push_back(b);
      continue;
    }
    if (b == dt.root_) continue;
    dt.idom_[b] = idom[b];
    dt.children_[idom[b]].push_back(b);
  }

  // Number the tree for ancestor queries.
  int clock = 0;
  std::vector<std::pair<int, size_t>> stack;
  stack.emplace_back(dt.root_, 0);
  dt.pre_[dt.root_] = clock++;
  while (!stack.empty()) {
    auto &[b, i] = stack.back();
    if (i < dt.children_[b].size()) {
      int c = dt.children_[b][i++];
      dt.pre_[c] = clock++;
      stack.emplace_back(c, 0);
    } else {
      dt.post_[b] = clock++;
      stack.pop_back();
    }
  }
  return dt;
}

std::vector<int> DominatorTree::Descendants(int block) const {
  std::vector<int> out;
  if (!reachable_[block]) return out;
  std::vector<int> stack(children_[block].rbegin(), children_[block].rend());
  while (!stack.empty()) {
    int b = stack.back();
    stack.pop_back();
    out.push_back(b);
    stack.insert(stack.end(), children_[b].rbegin(), children_[b].rend());
  }
  return out;
}

bool DominatorTree::Dominates(int a, int b) const {
  if (!reachable_[a] || !reachable_[b]) return false;
  return pre_[a] <= pre_[b] && post_[b] <= post_[a];
}

std::vector<DynamicCallEdge> LoadCallEdges(std::string_view source) {
  std::vector<DynamicCallEdge> edges;
  internal::ForEachRecord(source, [&](const json &r, size_t line) {
    DynamicCallEdge e;
    e.site = internal::RequireString(r, "site", line);
    e.caller = internal::RequireString(r, "caller", line);
    e.target = internal::RequireString(r, "target", line);
    e.count = r.contains("count") ? internal::RequireCount(r, "count", line) : 1;
    if (e.count == 0) {
      ThrowInvalid("zero count at line " + std::to_string(line));
    }
    edges.push_back(std::move(e));
  });
  return edges;
}

std::string DumpCallEdges(std::span<const DynamicCallEdge> edges) {
  std::string out;
  for (const DynamicCallEdge &e : edges) {
    nlohmann::ordered_json r;
    r["site"] = e.site;
    r["caller"] = e.caller;
    r["target"] = e.target;
    r["count"] = e.count;
    out += r.dump();
    out += '\n';
  }
  return out;
}

CallGraph AugmentCallGraph(const Icfg &icfg,
                           std::span<const DynamicCallEdge> edges) {
  const int nf = static_cast<int>(icfg.function_count());
  CallGraph cg;
  cg.block_callees_.resize(nf);
  cg.function_callees_.resize(nf);
  cg.incoming_.assign(nf, 0);
  cg.direct_incoming_.assign(nf, 0);

  // (site index, target index) -> accumulated count.
  std::map<std::pair<std::string, std::string>, uint64_t> merged;
  std::vector<std::set<std::string>> site_targets(icfg.indirect_sites().size());
  for (const DynamicCallEdge &e : edges) {
    auto site = icfg.FindIndirectSite(e.site);
    if (!site) ThrowInvalid("unknown indirect site " + e.site);
    if (!icfg.FindFunction(e.target)) {
      ThrowInvalid("unknown target function " + e.target + " at site " +
                   e.site);
    }
    const BlockRef owner = icfg.indirect_sites()[*site].owner;
    if (icfg.function(owner.function).name != e.caller) {
      ThrowInvalid("caller mismatch at site " + e.site + ": log says " +
                   e.caller + ", icfg says " +
                   icfg.function(owner.function).name);
    }
    uint64_t &count = merged[{e.site, e.target}];
    if (count > UINT64_MAX - e.count) {
      ThrowInvalid("count overflow at site " + e.site);
    }
    count += e.count;
    site_targets[*site].insert(e.target);
  }

  for (const auto &[key, count] : merged) {
    const auto &[site, target] = key;
    int owner = icfg.indirect_sites()[*icfg.FindIndirectSite(site)].owner.function;
    cg.edges_.push_back({site, icfg.function(owner).name, target, count});
    ++cg.incoming_[*icfg.FindFunction(target)];
  }

  for (int f = 0; f < nf; ++f) {
    const FunctionRecord &fn = icfg.function(f);
    cg.block_callees_[f].resize(fn.blocks.size());
    std::set<int> all;
    for (size_t b = 0; b < fn.blocks.size(); ++b) {
      auto &out = cg.block_callees_[f][b];
      for (const CallSiteRecord &call : fn.blocks[b].calls) {
        if (call.kind == CallSiteRecord::Kind::kDirect) {
          int target = *icfg.FindFunction(call.name);
          out.push_back(target);
          ++cg.incoming_[target];
          ++cg.direct_incoming_[target];
        } else {
          int site = *icfg.FindIndirectSite(call.name);
          for (const std::string &t : site_targets[site]) {
            out.push_back(*icfg.FindFunction(t));
          }
        }
      }
      all.insert(out.begin(), out.end());
    }
    cg.function_callees_[f].assign(all.begin(), all.end());
  }
  return cg;
}

std::vector<bool> CallGraph::Reachable(std::span<const int> roots) const {
  std::vector<bool> seen(function_callees_.size(), false);
  std::vector<int> work;
  for (int r : roots) {
    if (!seen[r]) {
      seen[r] = true;
      work.push_back(r);
    }
  }
  while (!work.empty()) {
    int f = work.back();
    work.pop_back();
    for (int c : function_callees_[f]) {
      if (!seen[c]) {
        seen[c] = true;
        work.push_back(c);
      }
    }
  }
  return seen;
}

IndirectStats IndirectCallSummary(const Icfg &icfg,
                                  std::span<const DynamicCallEdge> edges) {
  CallGraph cg = AugmentCallGraph(icfg, edges);
  IndirectStats stats;
  stats.total_call_sites = icfg.total_call_sites();
  stats.indirect_call_sites = icfg.indirect_sites().size();
  stats.discovered_targets = cg.edges().size();
  return stats;
}

}  // namespace compass
