// Copyright 2026 The HEAT Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <random>
#include <set>
#include <sstream>

#include "gtest/gtest.h"
#include "heat/error.h"
#include "heat/pipeline.h"
#include "oracle.h"
#include "test_util.h"

namespace heat {
namespace {

using testing::GraphBuilder;

StageConfig TypeStage(const std::string &type, double tau) {
  StageConfig s;
  s.name = type;
  s.ambiguous_node_type = type;
  s.constraint = {ConstraintKind::kTypeOnly, "", 0.0, type};
  s.extractor = {{"name"}, Normalization::kCaseFold};
  s.tau = tau;
  return s;
}

const CandidateScore *ScoreOf(const AlignmentMatrix &m, const NodeId &row,
                              const NodeId &candidate) {
  const AlignmentRow *r = m.Find(row);
  if (!r) return nullptr;
  for (const CandidateScore &s : r->scores) {
    if (s.candidate == candidate) return &s;
  }
  return nullptr;
}

TEST(RunStageTest, ThresholdPassAndFail) {
  FactGraph g = GraphBuilder().Entity("n1", "t").Entity("n2", "t").Build();
  FactGraph gp = GraphBuilder().Entity("A", "t").Build();
  StageConfig s = TypeStage("t", 0.7);
  s.prior.overrides[{"n1", "A"}] = 9.0;  // [A: 0.9, NEW: 0.1]
  s.prior.overrides[{"n2", "A"}] = 1.5;  // [A: 0.6, NEW: 0.4]
  StageResult r = RunStage(g, gp, s);
  EXPECT_DOUBLE_EQ(ScoreOf(r.matrix, "n1", "A")->probability, 0.9);
  EXPECT_DOUBLE_EQ(ScoreOf(r.matrix, "n2", "A")->probability, 0.6);
  ASSERT_EQ(r.unified.merge_log.size(), 1u);
  EXPECT_EQ(r.unified.merge_log[0].source_id, "n1");
  EXPECT_EQ(r.unified.merge_log[0].target_id, "A");
  EXPECT_FALSE(r.unified.merge_log[0].tie);
  EXPECT_EQ(r.unified.graph.FindEntity("n1"), -1);
  EXPECT_GE(r.unified.graph.FindEntity("n2"), 0);
  EXPECT_EQ(r.unified.graph.entities().size(), 3u - 1u);
}

TEST(RunStageTest, TieGoesToSmallestId) {
  FactGraph g = GraphBuilder().Entity("n", "t").Build();
  FactGraph gp = GraphBuilder().Entity("B", "t").Entity("A", "t").Build();
  StageConfig s = TypeStage("t", 0.4);
  s.prior.new_node_alpha = 2.0 / 9.0;  // [0.45, 0.45, 0.1]
  StageResult r = RunStage(g, gp, s);
  EXPECT_NEAR(ScoreOf(r.matrix, "n", "A")->probability, 0.45, 1e-15);
  ASSERT_EQ(r.unified.merge_log.size(), 1u);
  EXPECT_EQ(r.unified.merge_log[0].target_id, "A");
  EXPECT_TRUE(r.unified.merge_log[0].tie);
}

TEST(RunStageTest, StrictThresholdAndUnknownType) {
  FactGraph g = GraphBuilder().Entity("n", "t").Build();
  FactGraph gp = GraphBuilder().Entity("A", "t").Build();
  StageConfig s = TypeStage("t", 0.5);  // [0.5, 0.5] does not exceed 0.5
  EXPECT_TRUE(RunStage(g, gp, s).unified.merge_log.empty());
  s.tau = 1.0;
  s.prior.new_node_alpha = 0.0;  // p = 1 exactly, still not > 1
  EXPECT_TRUE(RunStage(g, gp, s).unified.merge_log.empty());
  try {
    RunStage(g, gp, TypeStage("ghost", 0.5));
    FAIL();
  } catch (const Error &e) {
    EXPECT_EQ(e.code(), ErrorCode::kConfig);
    EXPECT_NE(std::string(e.what()).find("ghost"), std::string::npos);
  }
}

TEST(MergeNodesTest, Examples) {
  FactGraph g = GraphBuilder()
                    .Entity("x", "t", {{"name", {"X"}}})
                    .Entity("y", "t", {{"name", {"Y"}}})
                    .Entity("z", "t")
                    .Hub("e", {"x", "y", "z"})
                    .Build();
  EXPECT_EQ(MergeNodes(g, {}), g);
  FactGraph m = MergeNodes(g, {{"x", "y"}});
  EXPECT_EQ(m.entities().size(), 2u);
  EXPECT_EQ(m.facts().size(), 2u);
  EXPECT_EQ(m.GetEntity("y").attributes.at("name"), (std::vector<std::string>{"Y", "X"}));
  EXPECT_THROW(MergeNodes(g, {{"x", "nope"}}), Error);
  try {
    MergeNodes(g, {{"x", "e"}});
    FAIL();
  } catch (const Error &e) {
    EXPECT_EQ(e.code(), ErrorCode::kIntegrity);
  }
}

TEST(ResolveMappingTest, ChainsAndCycles) {
  auto r = ResolveMapping({{"a", "b"}, {"b", "c"}});
  EXPECT_EQ(r.at("a"), "c");
  EXPECT_EQ(r.at("b"), "c");
  auto cyc = ResolveMapping({{"b", "a"}, {"a", "b"}, {"c", "b"}});
  EXPECT_EQ(cyc.at("a"), "a");
  EXPECT_EQ(cyc.at("b"), "a");
  EXPECT_EQ(cyc.at("c"), "a");
}

TEST(HeatTest, ChainAcrossStages) {
  FactGraph g = GraphBuilder().Entity("a", "t").Build();
  FactGraph gp = GraphBuilder().Entity("b", "t").Entity("c", "u").Build();
  StageConfig s1 = TypeStage("t", 0.7);
  s1.prior.overrides[{"a", "b"}] = 9.0;
  // Second stage lets t nodes align against u nodes only.
  StageConfig s2 = TypeStage("t", 0.7);
  s2.name = "second";
  s2.constraint.candidate_node_type = "u";
  s2.prior.overrides[{"b", "c"}] = 9.0;
  HeatResult h = Heat(g, gp, {s1, s2});
  ASSERT_EQ(h.unified.merge_log.size(), 2u);
  EXPECT_EQ(h.unified.merge_log[0], (MergeRecord{"a", "b", 0.9, "t", false}));
  EXPECT_EQ(h.unified.merge_log[1].source_id, "b");
  EXPECT_EQ(h.unified.merge_log[1].target_id, "c");
  ASSERT_EQ(h.unified.graph.entities().size(), 1u);
  EXPECT_EQ(h.unified.graph.entities()[0].id, "c");
}

TEST(HeatTest, EmptyGraphAndSingleStage) {
  FactGraph gp = GraphBuilder().Entity("A", "t").Entity("B", "t").Hub("e", {"A", "B"}).Build();
  HeatResult h = Heat(FactGraph(), gp, {TypeStage("t", 0.7)});
  EXPECT_EQ(h.unified.graph, gp);
  EXPECT_TRUE(h.unified.merge_log.empty());
  EXPECT_THROW(Heat(FactGraph(), gp, {}), Error);

  FactGraph g = GraphBuilder().Entity("n", "t").Build();
  StageConfig s = TypeStage("t", 0.3);
  HeatResult one = Heat(g, gp, {s});
  StageResult direct = RunStage(g, gp, s);
  EXPECT_EQ(one.unified.graph, direct.unified.graph);
  EXPECT_EQ(one.unified.merge_log, direct.unified.merge_log);
}

// Pre graph: two persons sharing a hash, each with one topic. Post graph: a
// person with that hash next to a misspelled copy of P1's topic.
struct HierarchyFixture {
  FactGraph pre = GraphBuilder()
                      .Entity("P1", "person", {{"name_hash", {"h"}}})
                      .Entity("P2", "person", {{"name_hash", {"h"}}})
                      .Entity("T1", "text", {{"text", {"graph theory"}}})
                      .Entity("T2", "text", {{"text", {"databases"}}})
                      .Hub("e1", {"P1", "T1"})
                      .Hub("e2", {"P2", "T2"})
                      .Build();
  FactGraph post = GraphBuilder()
                       .Entity("A", "person", {{"name_hash", {"h"}}})
                       .Entity("T1v", "text", {{"text", {"graph theorx"}}})
                       .Hub("f1", {"A", "T1v"})
                       .Build();
  StageConfig text, person;
  HierarchyFixture() {
    AttributeExtractorSpec a{{"text", "name_hash"}, Normalization::kCaseFold};
    text.name = "text";
    text.ambiguous_node_type = "text";
    text.constraint = {ConstraintKind::kLevenshtein, "text", 0.3, "text"};
    text.extractor = a;
    text.tau = 0.5;
    person.name = "person";
    person.ambiguous_node_type = "person";
    person.constraint = {ConstraintKind::kHashedName, "name_hash", 0.0, "person"};
    person.extractor = a;
    person.tau = 0.7;
  }
};

TEST(HeatTest, TextMergeChangesPersonScores) {
  HierarchyFixture f;
  // Alone, the misspelled topic matches nothing: prior-only row.
  AlignmentMatrix eat = Eat(f.post, f.pre, f.person);
  EXPECT_EQ(ScoreOf(eat, "A", "P1")->probability, 1.0 / 3.0);

  HeatResult h = Heat(f.post, f.pre, {f.text, f.person});
  // Stage 1: T1v's blanket value "h" has weight 1/2 and appears once among
  // T1's neighbor facts, so p = (0.5 + 1) / (0.5 + 1 + 1).
  EXPECT_DOUBLE_EQ(ScoreOf(h.matrices[0], "T1v", "T1")->probability, 0.6);
  ASSERT_EQ(h.unified.merge_log.size(), 1u);
  EXPECT_EQ(h.unified.merge_log[0].target_id, "T1");
  // Stage 2 on the unified graph: T1 now carries both spellings and sits in
  // two facts, so each spelling weighs 1/2 and P1's one neighbor fact on T1
  // matches both.
  EXPECT_EQ(h.unified.graph.GetEntity("T1").attributes.at("text"),
            (std::vector<std::string>{"graph theory", "graph theorx"}));
  EXPECT_DOUBLE_EQ(ScoreOf(h.matrices[1], "A", "P1")->count, 1.0);
  EXPECT_DOUBLE_EQ(ScoreOf(h.matrices[1], "A", "P1")->probability, 2.0 / 4.0);
  EXPECT_DOUBLE_EQ(ScoreOf(h.matrices[1], "A", "P2")->probability, 1.0 / 4.0);
  EXPECT_NE(ScoreOf(h.matrices[1], "A", "P1")->probability,
            ScoreOf(eat, "A", "P1")->probability);
}

std::pair<RawGraph, RawGraph> RandomPair(std::mt19937_64 &rng) {
  auto make = [&](const std::string &prefix, int n) {
    GraphBuilder b;
    for (int i = 0; i < n; ++i) {
      std::string id = prefix + std::to_string(i);
      if (i % 3 == 0) {
        b.Entity(id, "text", {{"text", {std::string("word") + "abcdef"[rng() % 6]}}});
      } else {
        b.Entity(id, "person", {{"name_hash", {std::string("h") + "xyz"[rng() % 3]}}});
      }
    }
    for (int e = 0; e < n; ++e) {
      std::string ev = prefix + "e" + std::to_string(e);
      std::set<int> m;
      while (m.size() < 2) m.insert(rng() % n);
      b.Event(ev);
      for (int x : m) b.Fact(ev, "p", prefix + std::to_string(x));
    }
    return b.raw();
  };
  return {make("a", 15), make("b", 20)};
}

TEST(HeatPropertyTest, ConservationSoundnessDeterminismIdempotence) {
  HierarchyFixture f;
  f.text.tau = 0.3;
  f.person.tau = 0.4;
  std::mt19937_64 rng(9);
  for (int trial = 0; trial < 25; ++trial) {
    auto [ra, rb] = RandomPair(rng);
    FactGraph g = LoadValidate(ra), gp = LoadValidate(rb);
    HeatResult h = Heat(g, gp, {f.text, f.person});
    const auto &log = h.unified.merge_log;
    EXPECT_EQ(h.unified.graph.entities().size(),
              g.entities().size() + gp.entities().size() - log.size());
    EXPECT_LE(h.unified.graph.facts().size(), g.facts().size() + gp.facts().size());
    for (const MergeRecord &r : log) {
      const StageConfig &st = r.stage == "text" ? f.text : f.person;
      const AlignmentMatrix &m = h.matrices[r.stage == "text" ? 0 : 1];
      EXPECT_GT(r.probability, st.tau);
      EXPECT_EQ(ScoreOf(m, r.source_id, r.target_id)->probability, r.probability);
      EXPECT_EQ(h.unified.graph.FindEntity(r.source_id), -1);
    }

    std::shuffle(ra.facts.begin(), ra.facts.end(), rng);
    std::shuffle(rb.entities.begin(), rb.entities.end(), rng);
    HeatResult again = Heat(LoadValidate(ra), LoadValidate(rb), {f.text, f.person});
    std::ostringstream l1, l2;
    WriteMergeLogTsv(log, l1);
    WriteMergeLogTsv(again.unified.merge_log, l2);
    EXPECT_EQ(l1.str(), l2.str());
    EXPECT_EQ(h.unified.graph, again.unified.graph);
  }

  // Rerunning on the output with a threshold above every row's maximum.
  auto [ra, rb] = RandomPair(rng);
  HeatResult h = Heat(LoadValidate(ra), LoadValidate(rb), {f.text, f.person});
  double max_p = 0.0;
  StageConfig t2 = f.text, p2 = f.person;
  for (const auto *st : {&t2, &p2}) {
    for (const auto &row : Eat(h.unified.graph, h.unified.graph, *st).rows) {
      for (const auto &s : row.scores) max_p = std::max(max_p, s.probability);
    }
  }
  t2.tau = p2.tau = std::min(1.0, max_p);
  const FactGraph &u = h.unified.graph;
  EXPECT_TRUE(Heat(u, u, {t2, p2}).unified.merge_log.empty());
}

TEST(HeatTest, SelfStagesMatchOracle) {
  HierarchyFixture f;
  f.text.tau = 0.3;
  f.person.indicators.node_types = {"text"};
  std::mt19937_64 rng(10);
  for (int trial = 0; trial < 10; ++trial) {
    auto [ra, rb] = RandomPair(rng);
    FactGraph g = LoadValidate(ra), gp = LoadValidate(rb);
    HeatResult h = Heat(g, gp, {f.text, f.person});
    FactGraph after_text = RunStage(g, gp, f.text).unified.graph;
    EXPECT_LE(oracle::MaxDifference(oracle::Eat(after_text, after_text, f.person),
                                    h.matrices[1]),
              1e-12);
  }
}

TEST(MergeLogTsvTest, RoundTrip) {
  std::vector<MergeRecord> log{{"a", "b", 0.9, "text", false}, {"c", "d", 0.75, "person", false}};
  std::ostringstream out;
  WriteMergeLogTsv(log, out);
  EXPECT_EQ(out.str(), "a\tb\t0.90000000000000002\ttext\nc\td\t0.75\tperson\n");
  std::istringstream in(out.str());
  EXPECT_EQ(ReadMergeLogTsv(in), log);
  std::istringstream bad("a\tb\t0.5\n");
  EXPECT_THROW(ReadMergeLogTsv(bad), Error);
}

}  // namespace
}  // namespace heat
