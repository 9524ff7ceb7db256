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

#include "compass/report.h"

#include <algorithm>
#include <cctype>
#include <functional>

#include "compass/error.h"

namespace compass {

using nlohmann::json;
using nlohmann::ordered_json;

std::optional<ReportFormat> ParseReportFormat(std::string_view name) {
  if (name == "table") return ReportFormat::kTable;
  if (name == "json") return ReportFormat::kJson;
  if (name == "csv") return ReportFormat::kCsv;
  return std::nullopt;
}

const std::vector<std::string> &DefaultColumns() {
  static const std::vector<std::string> kColumns = {
      "Rank",        "Function", "Weight",      "Block Weight",
      "Calls Weight", "Profile Cnt", "Label",   "Conditional",
      "Compartment", "Input",    "Solution"};
  return kColumns;
}

namespace {

struct Column {
  const char *name;
  bool numeric;
  std::function<std::string(const Compartment &)> cell;
};

const std::vector<Column> &AllColumns() {
  static const std::vector<Column> kAll = {
      {"Rank", true, [](const Compartment &c) { return std::to_string(c.rank); }},
      {"Function", false, [](const Compartment &c) { return c.function; }},
      {"Weight", true,
       [](const Compartment &c) { return std::to_string(c.weight.total); }},
      {"Block Weight", true,
       [](const Compartment &c) { return std::to_string(c.weight.block_weight); }},
      {"Calls Weight", true,
       [](const Compartment &c) { return std::to_string(c.weight.calls_weight); }},
      {"Profile Cnt", true,
       [](const Compartment &c) { return std::to_string(c.conditional_count); }},
      {"Label", false, [](const Compartment &c) { return c.labels.ToString(); }},
      {"Conditional", false,
       [](const Compartment &c) { return c.conditional_loc; }},
      {"Compartment", false, [](const Compartment &c) { return c.entry_loc; }},
      {"Input", false, [](const Compartment &c) { return c.input; }},
      {"Solution", false, [](const Compartment &c) { return c.solution; }},
      {"Id", false, [](const Compartment &c) { return c.id; }},
      {"Kind", false,
       [](const Compartment &c) { return std::string(ToString(c.kind)); }},
      {"Status", false,
       [](const Compartment &c) { return std::string(ToString(c.status)); }},
  };
  return kAll;
}

bool SameName(std::string_view a, std::string_view b) {
  return std::equal(a.begin(), a.end(), b.begin(), b.end(), [](char x, char y) {
    return std::tolower(static_cast<unsigned char>(x)) ==
           std::tolower(static_cast<unsigned char>(y));
  });
}

std::vector<const Column *> ResolveColumns(const std::vector<std::string> &names) {
  std::vector<const Column *> out;
  for (const std::string &name : names) {
    auto it = std::find_if(AllColumns().begin(), AllColumns().end(),
                           [&](const Column &c) { return SameName(c.name, name); });
    if (it == AllColumns().end()) ThrowInvalid("unknown column " + name);
    out.push_back(&*it);
  }
  return out;
}

std::string Clip(std::string s, size_t width) {
  if (width == 0 || s.size() <= width) return s;
  if (width <= 3) return s.substr(0, width);
  return s.substr(0, width - 3) + "...";
}

std::string RenderTable(const CompartmentReport &report,
                        const std::vector<const Column *> &columns,
                        size_t max_width) {
  std::vector<std::vector<std::string>> rows;
  rows.emplace_back();
  for (const Column *c : columns) rows.back().push_back(Clip(c->name, max_width));
  for (const Compartment &entry : report.entries) {
    rows.emplace_back();
    for (const Column *c : columns) {
      rows.back().push_back(Clip(c->cell(entry), max_width));
    }
  }
  std::vector<size_t> widths(columns.size(), 0);
  for (const auto &row : rows) {
    for (size_t i = 0; i < row.size(); ++i) {
      widths[i] = std::max(widths[i], row[i].size());
    }
  }
  std::string out;
  for (const auto &row : rows) {
    std::string line;
    for (size_t i = 0; i < row.size(); ++i) {
      if (i > 0) line += "  ";
      const size_t pad = widths[i] - row[i].size();
      if (columns[i]->numeric) {
        line.append(pad, ' ');
        line += row[i];
      } else {
        line += row[i];
        if (i + 1 < row.size()) line.append(pad, ' ');
      }
    }
    while (!line.empty() && line.back() == ' ') line.pop_back();
    out += line;
    out += '\n';
  }
  if (!report.closed.empty()) {
    out += "\nclosed:\n";
    for (const Compartment &c : report.closed) {
      out += "  " + c.id + " (" + std::string(ToString(c.status)) + ")\n";
    }
  }
  return out;
}

std::string CsvField(const std::string &s) {
  if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char ch : s) {
    if (ch == '"') out += '"';
    out += ch;
  }
  out += '"';
  return out;
}

std::string RenderCsv(const CompartmentReport &report,
                      const std::vector<const Column *> &columns) {
  std::string out;
  auto emit = [&](const std::vector<std::string> &fields) {
    for (size_t i = 0; i < fields.size(); ++i) {
      if (i > 0) out += ',';
      out += CsvField(fields[i]);
    }
    out += "\r\n";
  };
  std::vector<std::string> header;
  for (const Column *c : columns) header.emplace_back(c->name);
  emit(header);
  for (const Compartment &entry : report.entries) {
    std::vector<std::string> fields;
    for (const Column *c : columns) fields.push_back(c->cell(entry));
    emit(fields);
  }
  return out;
}

ordered_json CompartmentToJson(const Compartment &c) {
  ordered_json j;
  j["rank"] = c.rank;
  j["id"] = c.id;
  j["kind"] = ToString(c.kind);
  j["function"] = c.function;
  j["block"] = c.block;
  j["weight"] = c.weight.total;
  j["block_weight"] = c.weight.block_weight;
  j["calls_weight"] = c.weight.calls_weight;
  j["profile_cnt"] = c.conditional_count;
  j["label"] = c.labels.ToString();
  j["conditional_block"] = c.conditional_block;
  j["conditional"] = c.conditional_loc;
  j["compartment"] = c.entry_loc;
  j["input"] = c.input;
  j["solution"] = c.solution;
  j["status"] = ToString(c.status);
  return j;
}

const json &Get(const json &obj, const char *key, const char *where) {
  auto it = obj.find(key);
  if (it == obj.end()) {
    ThrowInvalid(std::string("report ") + where + ": missing \"" + key + "\"");
  }
  return *it;
}

std::string GetString(const json &obj, const char *key, const char *where) {
  const json &v = Get(obj, key, where);
  if (!v.is_string()) {
    ThrowInvalid(std::string("report ") + where + ": \"" + key +
                 "\" must be a string");
  }
  return v.get<std::string>();
}

uint64_t GetCount(const json &obj, const char *key, const char *where) {
  const json &v = Get(obj, key, where);
  if (!v.is_number_unsigned()) {
    ThrowInvalid(std::string("report ") + where + ": \"" + key +
                 "\" must be a non-negative integer");
  }
  return v.get<uint64_t>();
}

Compartment CompartmentFromJson(const json &j) {
  if (!j.is_object()) ThrowInvalid("report entry must be an object");
  const char *kWhere = "entry";
  Compartment c;
  c.rank = GetCount(j, "rank", kWhere);
  c.id = GetString(j, "id", kWhere);
  auto kind = ParseCompartmentKind(GetString(j, "kind", kWhere));
  if (!kind) ThrowInvalid("report entry " + c.id + ": unknown kind");
  c.kind = *kind;
  c.function = GetString(j, "function", kWhere);
  c.block = GetString(j, "block", kWhere);
  c.weight.total = GetCount(j, "weight", kWhere);
  c.weight.block_weight = GetCount(j, "block_weight", kWhere);
  c.weight.calls_weight = GetCount(j, "calls_weight", kWhere);
  if (c.weight.total != c.weight.block_weight + c.weight.calls_weight) {
    ThrowInvalid("report entry " + c.id +
                 ": weight is not block_weight + calls_weight");
  }
  c.conditional_count = GetCount(j, "profile_cnt", kWhere);
  auto labels = LabelSet::FromString(GetString(j, "label", kWhere));
  if (!labels) ThrowInvalid("report entry " + c.id + ": unknown label");
  c.labels = *labels;
  c.conditional_block = GetString(j, "conditional_block", kWhere);
  c.conditional_loc = GetString(j, "conditional", kWhere);
  c.entry_loc = GetString(j, "compartment", kWhere);
  c.input = GetString(j, "input", kWhere);
  c.solution = GetString(j, "solution", kWhere);
  auto status = ParseCompartmentStatus(GetString(j, "status", kWhere));
  if (!status) ThrowInvalid("report entry " + c.id + ": unknown status");
  c.status = *status;
  return c;
}

}  // namespace

std::string Render(const CompartmentReport &report,
                   const RenderOptions &options) {
  switch (options.format) {
    case ReportFormat::kJson:
      return ReportToJson(report).dump(2) + "\n";
    case ReportFormat::kCsv:
      return RenderCsv(report, ResolveColumns(options.columns));
    case ReportFormat::kTable:
      break;
  }
  return RenderTable(report, ResolveColumns(options.columns),
                     options.max_cell_width);
}

ordered_json ReportToJson(const CompartmentReport &report) {
  ordered_json doc;
  ordered_json config;
  config["max_exec_count"] = report.config.max_exec_count;
  config["top_k"] = report.config.top_k;
  config["roots"] = report.config.roots;
  doc["config"] = std::move(config);
  doc["snapshot"] = report.snapshot_tag;
  doc["entries"] = ordered_json::array();
  for (const Compartment &c : report.entries) {
    doc["entries"].push_back(CompartmentToJson(c));
  }
  doc["closed"] = ordered_json::array();
  for (const Compartment &c : report.closed) {
    doc["closed"].push_back(CompartmentToJson(c));
  }
  if (!report.sources.empty()) {
    ordered_json src;
    src["icfg"] = report.sources.icfg;
    src["profiles"] = report.sources.profiles;
    src["callgraph"] = report.sources.callgraph;
    src["labels"] = report.sources.labels;
    src["corpus"] = report.sources.corpus;
    doc["sources"] = std::move(src);
  }
  return doc;
}

CompartmentReport ReportFromJson(const json &doc) {
  if (!doc.is_object()) ThrowInvalid("report must be an object");
  CompartmentReport report;
  const json &config = Get(doc, "config", "document");
  report.config.max_exec_count = GetCount(config, "max_exec_count", "config");
  report.config.top_k = GetCount(config, "top_k", "config");
  if (auto it = config.find("roots"); it != config.end()) {
    if (!it->is_array()) ThrowInvalid("report config: \"roots\" must be an array");
    report.config.roots.clear();
    for (const json &r : *it) {
      if (!r.is_string()) ThrowInvalid("report config: roots must be strings");
      report.config.roots.push_back(r.get<std::string>());
    }
  }
  report.config.Validate();
  report.snapshot_tag = GetString(doc, "snapshot", "document");
  const json &entries = Get(doc, "entries", "document");
  if (!entries.is_array()) ThrowInvalid("report: \"entries\" must be an array");
  for (const json &e : entries) report.entries.push_back(CompartmentFromJson(e));
  for (size_t i = 0; i < report.entries.size(); ++i) {
    if (report.entries[i].rank != i + 1) {
      ThrowInvalid("report: entry " + report.entries[i].id +
                   " has rank out of sequence");
    }
  }
  if (auto it = doc.find("closed"); it != doc.end()) {
    if (!it->is_array()) ThrowInvalid("report: \"closed\" must be an array");
    for (const json &e : *it) report.closed.push_back(CompartmentFromJson(e));
  }
  if (auto it = doc.find("sources"); it != doc.end() && it->is_object()) {
    const char *kWhere = "sources";
    report.sources.icfg = GetString(*it, "icfg", kWhere);
    for (const json &p : Get(*it, "profiles", kWhere)) {
      if (!p.is_string()) ThrowInvalid("report sources: profiles must be strings");
      report.sources.profiles.push_back(p.get<std::string>());
    }
    report.sources.callgraph = GetString(*it, "callgraph", kWhere);
    report.sources.labels = GetString(*it, "labels", kWhere);
    report.sources.corpus = GetString(*it, "corpus", kWhere);
  }
  return report;
}

CompartmentReport LoadReport(std::string_view source) {
  json doc = json::parse(source, nullptr, false);
  if (doc.is_discarded()) ThrowInvalid("report: not a valid JSON document");
  return ReportFromJson(doc);
}

}  // namespace compass
