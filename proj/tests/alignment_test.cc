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

#include <cmath>
#include <random>
#include <sstream>

#include "gtest/gtest.h"
#include "heat/alignment.h"
#include "heat/error.h"
#include "heat/frequency.h"
#include "oracle.h"
#include "test_util.h"

namespace heat {
namespace {

using testing::GraphBuilder;

const AttributeExtractorSpec kNameKw{{"name", "kw"}, Normalization::kCaseFold};

StageConfig PersonStage() {
  StageConfig s;
  s.name = "person";
  s.ambiguous_node_type = "person";
  s.constraint = {ConstraintKind::kHashedName, "name_hash", 0.0, "person"};
  s.extractor = kNameKw;
  return s;
}

// n_i's neighbors carry "alice" and "ml"; in G' "alice" occurs in one fact,
// "ml" in two, and n_k's neighbor facts carry alice, ml and stats once each.
struct CountFixture {
  FactGraph g = GraphBuilder()
                    .Entity("ni", "person", {{"name_hash", {"h"}}})
                    .Entity("a", "person", {{"name", {"Alice"}}})
                    .Entity("m", "topic", {{"kw", {"ML"}}})
                    .Hub("g1", {"ni", "a", "m"})
                    .Build();
  FactGraph gp = GraphBuilder()
                     .Entity("nk", "person", {{"name_hash", {"h"}}})
                     .Entity("a2", "person", {{"name", {"alice"}}})
                     .Entity("m2", "topic", {{"kw", {"ml"}}})
                     .Entity("s2", "topic", {{"kw", {"stats"}}})
                     .Entity("x", "person")
                     .Hub("e1", {"nk", "a2", "m2"})
                     .Hub("e2", {"nk", "s2"})
                     .Hub("e3", {"x", "m2"})
                     .Build();
};

TEST(RarityWeightTest, Examples) {
  AttributeFrequencyTable t{{{"a", 4}, {"b", 1}, {"c", 2}}};
  EXPECT_EQ(RarityWeight("a", t), 0.25);
  EXPECT_EQ(RarityWeight("b", t), 1.0);
  EXPECT_EQ(RarityWeight("c", t), 0.5);
  EXPECT_FALSE(RarityWeight("zzz", t).has_value());
}

TEST(MatchCountTest, HandEvaluatedFixture) {
  CountFixture f;
  AttributeFrequencyTable freq = AttributeFrequencies(f.gp, kNameKw);
  EXPECT_EQ(freq.counts.at("alice"), 1u);
  EXPECT_EQ(freq.counts.at("ml"), 2u);
  EXPECT_DOUBLE_EQ(MatchCount("ni", "nk", f.g, f.gp, kNameKw, {}, freq), 1.5);
  // Only "ml" is shared with x.
  EXPECT_EQ(MatchCount("ni", "x", f.g, f.gp, kNameKw, {}, freq), 0.5);
  FactGraph lonely = GraphBuilder()
                         .Entity("ni", "person", {{"name_hash", {"h"}}})
                         .Entity("q", "topic", {{"kw", {"quantum"}}})
                         .Hub("g1", {"ni", "q"})
                         .Build();
  EXPECT_EQ(MatchCount("ni", "nk", lonely, f.gp, kNameKw, {}, freq), 0.0);
  // Indicator gate at zero wipes out the raw matches.
  EXPECT_EQ(MatchCount("ni", "nk", f.g, f.gp, kNameKw, {{"org"}}, freq), 0.0);
  EXPECT_THROW(MatchCount("zz", "nk", f.g, f.gp, kNameKw, {}, freq), Error);
}

TEST(IndicatorTest, Examples) {
  AttributeExtractorSpec a{{"name"}, Normalization::kCaseFold};
  FactGraph g = GraphBuilder()
                    .Entity("ni", "person")
                    .Entity("o", "org", {{"name", {"OrgX"}}})
                    .Hub("g1", {"ni", "o"})
                    .Build();
  // n_k: two events, five neighbor facts, one of them on an OrgX entity.
  FactGraph gp = GraphBuilder()
                     .Entity("nk", "person")
                     .Entity("o2", "org", {{"name", {"orgx"}}})
                     .Entity("p1", "person", {{"name", {"a"}}})
                     .Entity("p2", "person", {{"name", {"b"}}})
                     .Entity("p3", "person", {{"name", {"c"}}})
                     .Hub("e1", {"nk", "o2", "p1"})
                     .Hub("e2", {"nk", "p2", "p3"})
                     .Build();
  EXPECT_EQ(IndicatorCoefficient("ni", "nk", g, gp, {}, a), 1.0);
  EXPECT_EQ(IndicatorCoefficient("ni", "nk", g, gp, {{"org"}}, a), 0.5);
  FactGraph other = GraphBuilder()
                        .Entity("ni", "person")
                        .Entity("o", "org", {{"name", {"OrgY"}}})
                        .Hub("g1", {"ni", "o"})
                        .Build();
  EXPECT_EQ(IndicatorCoefficient("ni", "nk", other, gp, {{"org"}}, a), 0.0);
}

TEST(PosteriorPredictiveTest, Examples) {
  EXPECT_EQ(*PosteriorPredictive({2, 0}, {1, 1}), (std::vector<double>{0.75, 0.25}));
  auto u = *PosteriorPredictive({0, 0, 0}, {1, 1, 1});
  for (double p : u) EXPECT_DOUBLE_EQ(p, 1.0 / 3.0);
  EXPECT_FALSE(PosteriorPredictive({0, 0}, {0, 0}).has_value());
  EXPECT_THROW(PosteriorPredictive({}, {}), Error);
  EXPECT_THROW(PosteriorPredictive({1}, {1, 2}), Error);
  EXPECT_THROW(PosteriorPredictive({-1}, {1}), Error);
}

TEST(EatTest, SingleCandidateFixture) {
  CountFixture f;
  AlignmentMatrix m = Eat(f.g, f.gp, PersonStage());
  ASSERT_EQ(m.rows.size(), 2u);  // "a" is a person without a hash
  const AlignmentRow *row = m.Find("ni");
  ASSERT_NE(row, nullptr);
  ASSERT_EQ(row->scores.size(), 2u);
  EXPECT_EQ(row->scores[0].candidate, "nk");
  EXPECT_NEAR(row->scores[0].probability, 2.5 / 3.5, 1e-15);
  EXPECT_NEAR(row->scores[0].probability, 0.7143, 5e-5);
  EXPECT_TRUE(row->scores[1].is_new());
  EXPECT_NEAR(row->scores[1].probability, 0.2857, 5e-5);
  // Empty candidate set leaves NEW alone.
  const AlignmentRow *lone = m.Find("a");
  ASSERT_EQ(lone->scores.size(), 1u);
  EXPECT_EQ(lone->scores[0].probability, 1.0);
}

TEST(EatTest, PriorOnlyRowIsUniform) {
  FactGraph g = GraphBuilder().Entity("ni", "person", {{"name_hash", {"h"}}}).Build();
  FactGraph gp = GraphBuilder()
                     .Entity("k1", "person", {{"name_hash", {"h"}}})
                     .Entity("k2", "person", {{"name_hash", {"h"}}})
                     .Build();
  AlignmentMatrix m = Eat(g, gp, PersonStage());
  ASSERT_EQ(m.rows[0].scores.size(), 3u);
  for (const auto &s : m.rows[0].scores) EXPECT_EQ(s.probability, 1.0 / 3.0);

  StageConfig zero = PersonStage();
  zero.prior.symmetric_alpha = 0.0;
  zero.prior.new_node_alpha = 0.0;
  AlignmentMatrix z = Eat(g, gp, zero);
  EXPECT_TRUE(z.rows[0].unalignable);
  EXPECT_FALSE(BestRealCandidate(z.rows[0]).has_value());
}

TEST(EatTest, OverridesAndIndicatorGate) {
  CountFixture f;
  StageConfig s = PersonStage();
  s.prior.overrides[{"ni", "nk"}] = 0.0;
  s.indicators.node_types = {"org"};  // nobody has an org: gate closes
  AlignmentMatrix m = Eat(f.g, f.gp, s);
  const AlignmentRow *row = m.Find("ni");
  EXPECT_EQ(row->scores[0].indicator, 0.0);
  EXPECT_EQ(row->scores[0].probability, 0.0);
  EXPECT_EQ(row->scores[1].probability, 1.0);
}

TEST(EatTest, MonotoneInMatchingFacts) {
  CountFixture f;
  // Second candidate sharing the hash, then give nk an extra matching fact.
  RawGraph raw = ToRaw(f.gp);
  raw.entities.push_back({"nk2", "person", {{"name_hash", {"h"}}}});
  raw.events.push_back({"e4", {}});
  raw.facts.push_back({"e4", "p", "nk2"});
  raw.facts.push_back({"e4", "p", "a2"});
  FactGraph before = LoadValidate(raw);
  raw.events.push_back({"e5", {}});
  raw.facts.push_back({"e5", "p", "nk"});
  raw.facts.push_back({"e5", "p", "a2"});
  FactGraph after = LoadValidate(raw);
  // Frequencies change with the extra fact, so hold them fixed.
  AttributeFrequencyTable freq = AttributeFrequencies(after, kNameKw);
  double c_before = MatchCount("ni", "nk", f.g, before, kNameKw, {}, freq);
  double c_after = MatchCount("ni", "nk", f.g, after, kNameKw, {}, freq);
  double sib = MatchCount("ni", "nk2", f.g, after, kNameKw, {}, freq);
  EXPECT_GT(c_after, c_before);
  auto p0 = *PosteriorPredictive({c_before, sib, 0}, {1, 1, 1});
  auto p1 = *PosteriorPredictive({c_after, sib, 0}, {1, 1, 1});
  EXPECT_GE(p1[0], p0[0]);
  EXPECT_LE(p1[1], p0[1]);
  EXPECT_LE(p1[2], p0[2]);
}

// Random fixture pair for property checks.
std::pair<RawGraph, RawGraph> RandomPair(std::mt19937_64 &rng) {
  auto make = [&](const std::string &prefix) {
    GraphBuilder b;
    const char *vocab[] = {"ml", "ai", "db", "os", "pl", "acme", "globex"};
    int n = 6 + rng() % 10;
    for (int i = 0; i < n; ++i) {
      std::string id = prefix + std::to_string(i);
      int kind = rng() % 3;
      if (kind == 0) {
        b.Entity(id, "person", {{"name_hash", {std::string("h") + "ab"[rng() % 2]}}});
      } else if (kind == 1) {
        b.Entity(id, "org", {{"name", {vocab[5 + rng() % 2]}}});
      } else {
        std::vector<std::string> kw;
        for (int v = 0; v < 5; ++v) if (rng() % 3 == 0) kw.push_back(vocab[v]);
        b.Entity(id, "topic", {{"kw", kw}});
      }
    }
    int events = 1 + rng() % 8;
    for (int e = 0; e < events; ++e) {
      std::string ev = prefix + "e" + std::to_string(e);
      b.Event(ev);
      std::vector<int> picked;
      for (int m = 1 + rng() % 4; m > 0; --m) {
        int x = rng() % n;
        if (std::find(picked.begin(), picked.end(), x) == picked.end()) {
          picked.push_back(x);
          b.Fact(ev, "p", prefix + std::to_string(x));
        }
      }
    }
    return b.raw();
  };
  return {make("g"), make("k")};
}

TEST(EatTest, MatchesBruteForceOracle) {
  std::mt19937_64 rng(21);
  StageConfig s = PersonStage();
  s.extractor = {{"name", "kw"}, Normalization::kCaseFold};
  for (int trial = 0; trial < 60; ++trial) {
    auto [ra, rb] = RandomPair(rng);
    FactGraph g = LoadValidate(ra), gp = LoadValidate(rb);
    s.indicators.node_types.clear();
    if (trial % 2) s.indicators.node_types = {"org"};
    EXPECT_LE(oracle::MaxDifference(oracle::Eat(g, gp, s), Eat(g, gp, s)), 1e-12);
    EXPECT_LE(oracle::MaxDifference(oracle::Eat(g, g, s), Eat(g, g, s)), 1e-12);
  }
}

TEST(EatTest, OrderIndependenceAndWorkerCount) {
  std::mt19937_64 rng(22);
  StageConfig s = PersonStage();
  s.indicators.node_types = {"org"};
  for (int trial = 0; trial < 20; ++trial) {
    auto [ra, rb] = RandomPair(rng);
    FactGraph g = LoadValidate(ra), gp = LoadValidate(rb);
    std::ostringstream want;
    WriteMatrixTsv(Eat(g, gp, s, {1}), want);
    std::shuffle(ra.entities.begin(), ra.entities.end(), rng);
    std::shuffle(ra.facts.begin(), ra.facts.end(), rng);
    std::shuffle(rb.facts.begin(), rb.facts.end(), rng);
    std::ostringstream got;
    WriteMatrixTsv(Eat(LoadValidate(ra), LoadValidate(rb), s, {4}), got);
    EXPECT_EQ(want.str(), got.str());
  }
}

TEST(BestRealCandidateTest, TiesAndNew) {
  AlignmentRow row{"n", {{"b", 0, 1, 0.45}, {"a", 0, 1, 0.45}, {std::nullopt, 0, 1, 0.1}}, false};
  auto c = BestRealCandidate(row);
  ASSERT_TRUE(c);
  EXPECT_EQ(c->target, "a");
  EXPECT_TRUE(c->tie);
  AlignmentRow new_wins{"n", {{"a", 0, 1, 0.4}, {std::nullopt, 0, 1, 0.4}}, false};
  EXPECT_FALSE(BestRealCandidate(new_wins).has_value());
}

TEST(MatrixTsvTest, RoundTrip) {
  AlignmentMatrix m;
  m.rows.push_back({"a", {{"x", 1.5, 1, 0.6}, {"y", 0, 1, 0.2}, {std::nullopt, 0, 1, 0.2}}, false});
  m.rows.push_back({"b", {{std::nullopt, 0, 1, 0}}, true});
  std::ostringstream out;
  WriteMatrixTsv(m, out);
  EXPECT_EQ(out.str(),
            "a\tx\t1.5\t0.59999999999999998\n"
            "a\ty\t0\t0.20000000000000001\n"
            "a\tNEW\t0\t0.20000000000000001\n"
            "b\tUNALIGNABLE\t0\tNA\n");
  std::istringstream in(out.str());
  AlignmentMatrix back = ReadMatrixTsv(in);
  ASSERT_EQ(back.rows.size(), 2u);
  EXPECT_TRUE(back.rows[1].unalignable);
  ASSERT_EQ(back.rows[0].scores.size(), 3u);
  EXPECT_EQ(back.rows[0].scores[0].probability, 0.6);
  EXPECT_TRUE(back.rows[0].scores[2].is_new());
  std::ostringstream again;
  WriteMatrixTsv(back, again);
  EXPECT_EQ(again.str(), out.str());
  std::istringstream bad("a\tx\tnope\t0.5\n");
  EXPECT_THROW(ReadMatrixTsv(bad), Error);
}

TEST(ValidateStageTest, NamesField) {
  StageConfig s = PersonStage();
  s.tau = 1.5;
  try {
    ValidateStage(s);
    FAIL();
  } catch (const Error &e) {
    EXPECT_EQ(e.code(), ErrorCode::kConfig);
    EXPECT_NE(std::string(e.what()).find("tau"), std::string::npos);
  }
}

}  // namespace
}  // namespace heat
