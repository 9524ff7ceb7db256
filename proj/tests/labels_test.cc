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

#include "compass/labels.h"

#include <gtest/gtest.h>

#include "compass/error.h"

namespace compass {
namespace {

TEST(LabelSetTest, Strings) {
  EXPECT_EQ(LabelSet().ToString(), "");
  EXPECT_EQ(LabelSet(LabelSet::kInput).ToString(), "I");
  EXPECT_EQ(LabelSet(LabelSet::kHarness).ToString(), "H");
  EXPECT_EQ((LabelSet(LabelSet::kInput) | LabelSet(LabelSet::kHarness)).ToString(),
            "IH");
  for (const char *s : {"", "I", "H", "IH"}) {
    EXPECT_EQ(LabelSet::FromString(s)->ToString(), s);
  }
  EXPECT_FALSE(LabelSet::FromString("X").has_value());
}

TEST(LabelsTest, LoadMergesRepeatedKeys) {
  const LabelMap m = LoadLabels(
      "{\"fn\":\"f\",\"block\":\"a\",\"labels\":[\"input\"]}\n"
      "{\"fn\":\"f\",\"block\":\"a\",\"labels\":[\"harness\"]}\n"
      "{\"fn\":\"f\",\"block\":\"b\",\"labels\":[]}\n");
  EXPECT_EQ(m.at({"f", "a"}).ToString(), "IH");
  EXPECT_TRUE(m.at({"f", "b"}).empty());
  EXPECT_EQ(LoadLabels(DumpLabels(m)), m);
}

TEST(LabelsTest, RejectsUnknownLabel) {
  EXPECT_THROW(LoadLabels("{\"fn\":\"f\",\"block\":\"a\",\"labels\":[\"x\"]}"),
               Error);
  EXPECT_THROW(LoadLabels("{\"fn\":\"f\",\"block\":\"a\"}"), Error);
}

TEST(LabelsTest, AnnotateUsesTheConditional) {
  CompartmentReport r;
  Compartment c;
  c.id = "f:b";
  c.function = "f";
  c.block = "b";
  c.conditional_block = "a";
  Compartment t;
  t.id = "g:e";
  t.function = "g";
  t.block = "e";
  t.kind = CompartmentKind::kIndirectTarget;
  r.entries = {c, t};
  const LabelMap m = {{{"f", "a"}, LabelSet(LabelSet::kHarness)},
                      {{"f", "b"}, LabelSet(LabelSet::kInput)},
                      {{"g", "e"}, LabelSet(LabelSet::kInput)}};
  const CompartmentReport out = Annotate(r, m);
  EXPECT_EQ(out.entries[0].labels.ToString(), "H");
  EXPECT_TRUE(out.entries[1].labels.empty());
}

}  // namespace
}  // namespace compass
