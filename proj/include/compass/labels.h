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

#ifndef COMPASS_LABELS_H_
#define COMPASS_LABELS_H_

// Input/harness provenance hints for blocking conditionals.

#include <string>
#include <string_view>

#include "compass/compartments.h"
#include "compass/label_set.h"

namespace compass {

// Parses a label log: one {"fn","block","labels":["input"|"harness",...]} per
// line, unioned per conditional. Unknown label names are rejected.
LabelMap LoadLabels(std::string_view source);
std::string DumpLabels(const LabelMap &labels);

// Sets each frontier compartment's labels to the map's entry for its
// conditional (empty when absent). Indirect-call targets are always
// unlabeled. No other field changes.
CompartmentReport Annotate(CompartmentReport report, const LabelMap &labels);

}  // namespace compass

#endif  // COMPASS_LABELS_H_
