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

#ifndef COMPASS_REPORT_H_
#define COMPASS_REPORT_H_

// Text, JSON and CSV renderings of a compartment report.

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "compass/compartments.h"
#include "json.hpp"

namespace compass {

enum class ReportFormat { kTable, kJson, kCsv };

std::optional<ReportFormat> ParseReportFormat(std::string_view name);

// Rank, Function, Weight, Block Weight, Calls Weight, Profile Cnt, Label,
// Conditional, Compartment, Input, Solution.
const std::vector<std::string> &DefaultColumns();

struct RenderOptions {
  ReportFormat format = ReportFormat::kTable;
  // Table/CSV only. Accepts the default column names plus "Id", "Kind" and
  // "Status"; matching ignores case.
  std::vector<std::string> columns = DefaultColumns();
  // Table only; longer cells are cut and end in "...". 0 disables.
  size_t max_cell_width = 0;
};

// Throws Error(kInvalidInput) "unknown column <name>".
std::string Render(const CompartmentReport &report, const RenderOptions &options);

nlohmann::ordered_json ReportToJson(const CompartmentReport &report);
CompartmentReport ReportFromJson(const nlohmann::json &doc);
CompartmentReport LoadReport(std::string_view source);

}  // namespace compass

#endif  // COMPASS_REPORT_H_
