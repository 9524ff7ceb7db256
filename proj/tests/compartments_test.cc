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

#include "compass/compartments.h"

#include <gmock/gmock.h>
#include <gtest/gtest.h>

#include "compass/error.h"
#include "testing/builders.h"
#include "testing/fixtures.h"

namespace compass {
namespace {

using ::compass::testing::Block;
using ::compass::testing::Calls;
using ::compass::testing::CallsVia;
using ::compass::testing::Function;
using ::compass::testing::Profile;
using ::testing::ElementsAre;

constexpr uint64_t kHot = 1000;

// main: a(hot) -> {b(cold), c(hot)}; b -> d; b calls g; d calls shared.
// g calls h; shared has two call sites.
ProgramModel Sample(std::vector<DynamicCallEdge> edges = {}) {
  return ProgramModel::Build(
      Icfg::Build({
          Function("main", {Block("a", 2, {"b", "c"}), Block("b", 10, {"d"}, {Calls("g")}),
                            Block("c", 3, {}, {Calls("shared")}),
                            Block("d", 5, {}, {Calls("shared"), CallsVia("s0")})}),
          Function("g", {Block("e", 7, {}, {Calls("h")})}),
          Function("h", {Block("e", 11)}),
          Function("shared", {Block("e", 13)}),
          Function("t1", {Block("e", 17)}),
      }),
      edges);
}

ProfileSnapshot SampleCounts() {
  return Profile({{{"main", "a"}, kHot}, {{"main", "c"}, kHot}});
}

std::vector<std::string> Ids(const std::vector<Compartment> &cs) {
  std::vector<std::string> out;
  for (const auto &c : cs) out.push_back(c.id);
  return out;
}

TEST(WeightTest, DominatedRegionPlusUniquelyCalledClosure) {
  const ProgramModel m = Sample();
  const BlockCounts counts = BlockCounts::Resolve(m.icfg(), SampleCounts());
  const auto b = *m.icfg().FindBlock("main", "b");
  // 10 + 5 own; g (7) and h (11) unique; shared has two sites.
  EXPECT_EQ(BlockWeight(m, b, counts, 50), WeightBreakdown::Of(15, 18));
}

TEST(WeightTest, HotEntryWeighsNothing) {
  const ProgramModel m = Sample();
  const BlockCounts counts = BlockCounts::Resolve(m.icfg(), SampleCounts());
  EXPECT_EQ(BlockWeight(m, *m.icfg().FindBlock("main", "a"), counts, 50),
            WeightBreakdown{});
}

TEST(WeightTest, HotCalleeStopsTheClosure) {
  const ProgramModel m = Sample();
  ProfileSnapshot s = SampleCounts();
  s.Add({"g", "e"}, 51);
  const BlockCounts counts = BlockCounts::Resolve(m.icfg(), s);
  // g is saturated, so h is not reached through it either.
  EXPECT_EQ(BlockWeight(m, *m.icfg().FindBlock("main", "b"), counts, 50),
            WeightBreakdown::Of(15, 0));
  // At the boundary the entry still counts as unexplored.
  s = SampleCounts();
  s.Add({"g", "e"}, 50);
  EXPECT_EQ(BlockWeight(m, *m.icfg().FindBlock("main", "b"),
                        BlockCounts::Resolve(m.icfg(), s), 50)
                .calls_weight,
            18u);
}

TEST(WeightTest, ObservedIndirectTargetsJoinTheClosure) {
  const ProgramModel m = Sample({{"s0", "main", "t1", 4}});
  const BlockCounts counts = BlockCounts::Resolve(m.icfg(), SampleCounts());
  EXPECT_EQ(BlockWeight(m, *m.icfg().FindBlock("main", "b"), counts, 50),
            WeightBreakdown::Of(15, 35));
}

TEST(WeightTest, SecondIndirectBindingMakesTargetShared) {
  const ProgramModel m = ProgramModel::Build(
      Icfg::Build({Function("main", {Block("a", 1, {"b"}),
                                     Block("b", 1, {}, {Calls("t"), CallsVia("s")})}),
                   Function("t", {Block("e", 9)})}),
      std::vector<DynamicCallEdge>{{"s", "main", "t", 1}});
  EXPECT_EQ(m.call_graph().IncomingCallSites(1), 2u);
  const BlockCounts counts =
      BlockCounts::Resolve(m.icfg(), Profile({{{"main", "a"}, kHot}}));
  EXPECT_EQ(BlockWeight(m, {0, 1}, counts, 50), WeightBreakdown::Of(1, 0));
}

TEST(WeightTest, RecursionIsCountedOnce) {
  const ProgramModel m = ProgramModel::Build(
      Icfg::Build({Function("main", {Block("a", 1, {"b"}),
                                     Block("b", 2, {}, {Calls("r")})}),
                   Function("r", {Block("e", 5, {"x"}), Block("x", 1, {}, {Calls("q")})}),
                   Function("q", {Block("e", 3, {}, {Calls("r2")})}),
                   Function("r2", {Block("e", 4, {}, {Calls("q")})})}),
      {});
  const BlockCounts counts =
      BlockCounts::Resolve(m.icfg(), Profile({{{"main", "a"}, kHot}}));
  // q has two call sites (from r and r2) so only r counts, and r2 is cut off
  // behind q.
  EXPECT_EQ(BlockWeight(m, {0, 1}, counts, 50), WeightBreakdown::Of(2, 6));
}

TEST(WeightTest, UnreachableBlockIsAnError) {
  const ProgramModel m = ProgramModel::Build(
      Icfg::Build({Function("main", {Block("a", 1), Block("dead", 1)})}), {});
  EXPECT_THROW(BlockWeight(m, {0, 1}, BlockCounts::Zero(m.icfg()), 50), Error);
}

TEST(EnumerateTest, FrontierSuccessorsAndIndirectTargets) {
  const ProgramModel m = Sample();
  const BlockCounts counts = BlockCounts::Resolve(m.icfg(), SampleCounts());
  const auto cs = EnumerateCandidates(m, counts, AnalysisConfig{});
  // t1 has no direct call site and is never executed.
  EXPECT_THAT(Ids(cs), ElementsAre("main:b", "t1:e"));
  EXPECT_EQ(cs[0].kind, CompartmentKind::kFrontier);
  EXPECT_EQ(cs[0].conditional_block, "a");
  EXPECT_EQ(cs[0].conditional_count, kHot);
  EXPECT_EQ(cs[1].kind, CompartmentKind::kIndirectTarget);
  EXPECT_TRUE(cs[1].conditional_block.empty());
}

TEST(EnumerateTest, RootsAndHotFunctionsAreNotIndirectTargets) {
  const ProgramModel m = Sample();
  ProfileSnapshot s = SampleCounts();
  s.Add({"t1", "e"}, 51);
  auto cs = EnumerateCandidates(m, BlockCounts::Resolve(m.icfg(), s),
                                AnalysisConfig{});
  EXPECT_THAT(Ids(cs), ElementsAre("main:b"));
  AnalysisConfig cfg;
  cfg.roots = {"t1"};
  cs = EnumerateCandidates(m, BlockCounts::Resolve(m.icfg(), SampleCounts()), cfg);
  EXPECT_THAT(Ids(cs), ElementsAre("main:b"));
}

TEST(EnumerateTest, DuplicateEntryKeepsHottestConditional) {
  const ProgramModel m = ProgramModel::Build(
      Icfg::Build({Function("main", {Block("a", 1, {"p", "q"}), Block("p", 1, {"x"}),
                                     Block("q", 1, {"x"}), Block("x", 4)})}),
      {});
  auto run = [&](uint64_t p, uint64_t q) {
    return EnumerateCandidates(
        m,
        BlockCounts::Resolve(m.icfg(), Profile({{{"main", "a"}, kHot},
                                                {{"main", "p"}, p},
                                                {{"main", "q"}, q}})),
        AnalysisConfig{});
  };
  auto cs = run(100, 200);
  ASSERT_EQ(cs.size(), 1u);
  EXPECT_EQ(cs[0].conditional_block, "q");
  cs = run(300, 200);
  EXPECT_EQ(cs[0].conditional_block, "p");
  cs = run(200, 200);
  EXPECT_EQ(cs[0].conditional_block, "p");
}

// Three sibling regions of equal weight plus a heavier one.
ProgramModel Siblings() {
  return ProgramModel::Build(
      Icfg::Build({Function(
          "main", {Block("a", 1, {"w", "x", "y", "z"}), Block("w", 5), Block("x", 5),
                   Block("y", 9), Block("z", 5)})}),
      {});
}

TEST(RankTest, OrdersByWeightThenId) {
  const ProgramModel m = Siblings();
  const BlockCounts counts =
      BlockCounts::Resolve(m.icfg(), Profile({{{"main", "a"}, kHot}}));
  AnalysisConfig cfg;
  cfg.top_k = 3;
  const CompartmentReport r = RankCompartments(
      EnumerateCandidates(m, counts, cfg), m, counts, cfg, "snap");
  EXPECT_THAT(Ids(r.entries), ElementsAre("main:y", "main:w", "main:x"));
  EXPECT_EQ(r.entries[0].rank, 1u);
  EXPECT_EQ(r.entries[2].rank, 3u);
  EXPECT_EQ(r.snapshot_tag, "snap");
  cfg.top_k = 0;
  EXPECT_THROW(RankCompartments({}, m, counts, cfg, ""), Error);
}

TEST(WhatIfTest, UnlockRemovesEntryAndPromotesNext) {
  const ProgramModel m = Siblings();
  const BlockCounts counts =
      BlockCounts::Resolve(m.icfg(), Profile({{{"main", "a"}, kHot}}));
  AnalysisConfig cfg;
  cfg.top_k = 3;
  const CompartmentReport r = RankCompartments(
      EnumerateCandidates(m, counts, cfg), m, counts, cfg, "");
  const CompartmentReport next = WhatIfUnlock(r, "main:y", m, counts);
  EXPECT_THAT(Ids(next.entries), ElementsAre("main:w", "main:x", "main:z"));
  ASSERT_EQ(next.closed.size(), 1u);
  EXPECT_EQ(next.closed[0].id, "main:y");
  EXPECT_EQ(next.closed[0].status, CompartmentStatus::kResolved);
  EXPECT_EQ(next.closed[0].rank, 0u);
  EXPECT_THROW(WhatIfUnlock(next, "main:y", m, counts), Error);
  EXPECT_THROW(WhatIfUnlock(next, "main:nope", m, counts), Error);
}

TEST(WhatIfTest, UnlockedCalleesStopContributingElsewhere) {
  // Unlocking b raises g as well, so g neither turns into a frontier nor
  // keeps weighing on anything else.
  const ProgramModel m = ProgramModel::Build(
      Icfg::Build({Function("main", {Block("a", 1, {"b", "c"}),
                                     Block("b", 4, {}, {Calls("g")}),
                                     Block("c", 2)}),
                   Function("g", {Block("e", 1, {"f"}), Block("f", 30)})}),
      {});
  const BlockCounts counts =
      BlockCounts::Resolve(m.icfg(), Profile({{{"main", "a"}, kHot}}));
  AnalysisConfig cfg;
  const CompartmentReport r = RankCompartments(
      EnumerateCandidates(m, counts, cfg), m, counts, cfg, "");
  EXPECT_THAT(Ids(r.entries), ElementsAre("main:b", "main:c"));
  EXPECT_EQ(r.entries[0].weight, WeightBreakdown::Of(4, 31));
  const CompartmentReport next = WhatIfUnlock(r, "main:b", m, counts);
  EXPECT_THAT(Ids(next.entries), ElementsAre("main:c"));
}

TEST(WhatIfTest, ExposesNestedRegions) {
  const ProgramModel m = ProgramModel::Build(
      Icfg::Build({Function("main", {Block("a", 1, {"b", "z"}), Block("b", 3, {"c"}),
                                     Block("c", 2, {"d", "e"}), Block("d", 1),
                                     Block("e", 6), Block("z", 1)})}),
      {});
  const BlockCounts counts = BlockCounts::Resolve(
      m.icfg(), Profile({{{"main", "a"}, kHot}, {{"main", "z"}, kHot}}));
  AnalysisConfig cfg;
  const CompartmentReport r = RankCompartments(
      EnumerateCandidates(m, counts, cfg), m, counts, cfg, "");
  EXPECT_THAT(Ids(r.entries), ElementsAre("main:b"));
  // Raising the whole dominated region leaves nothing behind.
  EXPECT_TRUE(WhatIfUnlock(r, "main:b", m, counts).entries.empty());
}

TEST(StabilityTest, StillLockedAndOverlap) {
  const auto g = testing::GatedRegions::Make(26);
  const ProgramModel m = ProgramModel::Build(Icfg::Build(g.functions), {});
  auto report = [&](const std::set<int> &covered) {
    const BlockCounts c = BlockCounts::Resolve(m.icfg(), g.Snapshot(covered));
    return RankCompartments(EnumerateCandidates(m, c, AnalysisConfig{}), m, c,
                            AnalysisConfig{}, "");
  };
  const CompartmentReport base = report({});
  ASSERT_EQ(base.entries.size(), 20u);
  EXPECT_EQ(base.entries[0].id, "main:r0");
  EXPECT_EQ(StillLocked(base, g.Snapshot({})), 20u);
  EXPECT_EQ(StillLocked(base, g.Snapshot({0, 7, 19, 24})), 17u);
  EXPECT_EQ(TopKOverlap(base, report({0, 1, 2, 3, 4, 5}), 20).overlap, 14u);
  EXPECT_EQ(TopKOverlap(base, report({0, 1, 2}), 20).overlap, 17u);
  const OverlapResult wide = TopKOverlap(base, base, 30);
  EXPECT_EQ(wide.overlap, 20u);
  EXPECT_TRUE(wide.truncated);
  const Icfg icfg = Icfg::Build(g.functions);
  EXPECT_THROW(StillLocked(base, Profile({{{"main", "nope"}, 1}}), &icfg),
               Error);
}

TEST(KindTest, StringsRoundTrip) {
  for (auto k : {CompartmentKind::kFrontier, CompartmentKind::kIndirectTarget}) {
    EXPECT_EQ(ParseCompartmentKind(ToString(k)), k);
  }
  for (auto s : {CompartmentStatus::kLocked, CompartmentStatus::kUnlocked,
                 CompartmentStatus::kResolved}) {
    EXPECT_EQ(ParseCompartmentStatus(ToString(s)), s);
  }
  EXPECT_FALSE(ParseCompartmentKind("other").has_value());
  EXPECT_EQ(Compartment::MakeId("f", "b"), "f:b");
}

}  // namespace
}  // namespace compass
