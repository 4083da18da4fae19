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

#include "heat/alignment.h"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <istream>
#include <ostream>
#include <sstream>
#include <thread>
#include <unordered_map>

#include "heat/error.h"

namespace heat {

namespace {

bool IsFiniteNonNegative(double v) { return std::isfinite(v) && v >= 0.0; }

// Interned view of one (g, g_prime) pair under a stage's extractor, plus the
// rarity weights of every value over g_prime's facts.
class StageScorer {
 public:
  StageScorer(const FactGraph &g, const FactGraph &g_prime,
              const AttributeExtractorSpec &extractor,
              const IndicatorSpec &indicators,
              const AttributeFrequencyTable *freq)
      : g_(g), gp_(g_prime), self_(&g == &g_prime),
        has_indicators_(!indicators.node_types.empty()) {
    g_values_ = InternGraph(g, extractor);
    if (!self_) gp_values_ = InternGraph(g_prime, extractor);
    g_indicator_.resize(g.entities().size());
    for (size_t i = 0; i < g.entities().size(); ++i) {
      g_indicator_[i] = indicators.node_types.count(g.entities()[i].node_type) > 0;
    }
    weight_.assign(ids_.size(), 0.0);
    if (freq == nullptr) {
      std::vector<uint64_t> counts(ids_.size(), 0);
      const auto &values = ReferenceValues();
      for (size_t f = 0; f < gp_.facts().size(); ++f) {
        for (uint32_t v : values[gp_.FactEntity(static_cast<int>(f))]) counts[v]++;
      }
      for (size_t v = 0; v < counts.size(); ++v) {
        if (counts[v] > 0) weight_[v] = 1.0 / static_cast<double>(counts[v]);
      }
    } else {
      for (const auto &[value, id] : ids_) {
        auto it = freq->counts.find(value);
        if (it != freq->counts.end() && it->second > 0) {
          weight_[id] = 1.0 / static_cast<double>(it->second);
        }
      }
    }
  }

  // Per-thread scratch for one ambiguous node.
  struct RowState {
    std::vector<double> weight_sum;     // sum of w over blanket holders
    std::vector<int> indicator_hits;    // -1: not an indicator value
    std::vector<uint32_t> touched_weight;
    std::vector<uint32_t> indicator_values;
    bool any_indicator = false;
  };

  void BeginRow(int i, RowState *st) const {
    if (st->weight_sum.size() < ids_.size()) {
      st->weight_sum.resize(ids_.size(), 0.0);
      st->indicator_hits.resize(ids_.size(), -1);
    }
    for (uint32_t v : st->touched_weight) st->weight_sum[v] = 0.0;
    for (uint32_t v : st->indicator_values) st->indicator_hits[v] = -1;
    st->touched_weight.clear();
    st->indicator_values.clear();

    std::vector<int> blanket;
    for (int ev : g_.EventsOf(i)) {
      auto [begin, end] = g_.FactsOf(ev);
      for (int f = begin; f < end; ++f) {
        int j = g_.FactEntity(f);
        if (j != i) blanket.push_back(j);
      }
    }
    std::sort(blanket.begin(), blanket.end());
    blanket.erase(std::unique(blanket.begin(), blanket.end()), blanket.end());
    for (int j : blanket) {
      if (g_indicator_[j]) {
        for (uint32_t v : g_values_[j]) {
          if (st->indicator_hits[v] < 0) {
            st->indicator_hits[v] = 0;
            st->indicator_values.push_back(v);
          }
        }
        continue;
      }
      for (uint32_t v : g_values_[j]) {
        // Values absent from g_prime cannot match any of its facts.
        if (weight_[v] == 0.0) continue;
        if (st->weight_sum[v] == 0.0) st->touched_weight.push_back(v);
        st->weight_sum[v] += weight_[v];
      }
    }
    st->any_indicator = !st->indicator_values.empty();
  }

  // (count, indicator) of candidate k for the row prepared in `st`.
  std::pair<double, double> Score(int k, RowState *st) const {
    const auto &values = ReferenceValues();
    double raw = 0.0;
    for (int ev : gp_.EventsOf(k)) {
      auto [begin, end] = gp_.FactsOf(ev);
      for (int f = begin; f < end; ++f) {
        int t = gp_.FactEntity(f);
        if (t == k) continue;
        for (uint32_t v : values[t]) {
          raw += st->weight_sum[v];
          if (has_indicators_ && st->indicator_hits[v] >= 0) st->indicator_hits[v]++;
        }
      }
    }
    double iota = 1.0;
    if (has_indicators_) {
      int best = 0;
      for (uint32_t v : st->indicator_values) {
        best = std::max(best, st->indicator_hits[v]);
        st->indicator_hits[v] = 0;
      }
      const size_t n_events = gp_.EventsOf(k).size();
      iota = (n_events == 0 || !st->any_indicator)
                 ? 0.0
                 : std::min(1.0, static_cast<double>(best) /
                                     static_cast<double>(n_events));
    }
    return {iota * raw, iota};
  }

 private:
  std::vector<std::vector<uint32_t>> InternGraph(
      const FactGraph &graph, const AttributeExtractorSpec &extractor) {
    std::vector<std::vector<uint32_t>> out(graph.entities().size());
    for (size_t i = 0; i < out.size(); ++i) {
      for (std::string &v : ExtractDistinct(graph.entities()[i], extractor)) {
        auto [it, inserted] =
            ids_.emplace(std::move(v), static_cast<uint32_t>(ids_.size()));
        out[i].push_back(it->second);
      }
    }
    return out;
  }

  const std::vector<std::vector<uint32_t>> &ReferenceValues() const {
    return self_ ? g_values_ : gp_values_;
  }

  const FactGraph &g_;
  const FactGraph &gp_;
  bool self_;
  bool has_indicators_;
  std::unordered_map<std::string, uint32_t> ids_;
  std::vector<std::vector<uint32_t>> g_values_;
  std::vector<std::vector<uint32_t>> gp_values_;
  std::vector<char> g_indicator_;
  std::vector<double> weight_;
};

std::pair<int, int> PairIndices(const NodeId &n_i, const NodeId &n_k,
                                const FactGraph &g, const FactGraph &g_prime) {
  int i = g.FindEntity(n_i);
  if (i < 0) throw Error(ErrorCode::kNotFound, "unknown entity '" + n_i + "'");
  int k = g_prime.FindEntity(n_k);
  if (k < 0) throw Error(ErrorCode::kNotFound, "unknown entity '" + n_k + "'");
  return {i, k};
}

}  // namespace

double PriorSpec::Alpha(const NodeId &ambiguous, const NodeId &candidate) const {
  auto it = overrides.find({ambiguous, candidate});
  return it == overrides.end() ? symmetric_alpha : it->second;
}

void ValidateStage(const StageConfig &stage) {
  auto fail = [&](const std::string &field, const std::string &why) {
    throw Error(ErrorCode::kConfig,
                "stage '" + stage.name + "': field '" + field + "' " + why);
  };
  if (stage.name.empty()) fail("name", "must be non-empty");
  if (stage.ambiguous_node_type.empty()) fail("ambiguous_node_type", "must be non-empty");
  if (!(stage.tau >= 0.0 && stage.tau <= 1.0)) fail("tau", "must lie in [0, 1]");
  if (stage.constraint.candidate_node_type.empty()) {
    fail("constraint.candidate_node_type", "must be non-empty");
  }
  if (stage.constraint.kind == ConstraintKind::kLevenshtein &&
      !(stage.constraint.max_normalized_distance >= 0.0 &&
        stage.constraint.max_normalized_distance <= 1.0)) {
    fail("constraint.max_normalized_distance", "must lie in [0, 1]");
  }
  if ((stage.constraint.kind == ConstraintKind::kExactKey ||
       stage.constraint.kind == ConstraintKind::kLevenshtein) &&
      stage.constraint.key.empty()) {
    fail("constraint.key", "must be non-empty");
  }
  if (stage.extractor.keys.empty()) fail("extractor.keys", "must be non-empty");
  for (const std::string &k : stage.extractor.keys) {
    if (k.empty()) fail("extractor.keys", "must not contain empty keys");
  }
  for (const std::string &t : stage.indicators.node_types) {
    if (t.empty()) fail("indicators.node_types", "must not contain empty types");
  }
  if (!IsFiniteNonNegative(stage.prior.symmetric_alpha)) {
    fail("prior.symmetric_alpha", "must be finite and >= 0");
  }
  if (!IsFiniteNonNegative(stage.prior.new_node_alpha)) {
    fail("prior.new_node_alpha", "must be finite and >= 0");
  }
  for (const auto &[pair, alpha] : stage.prior.overrides) {
    if (!IsFiniteNonNegative(alpha)) fail("prior.overrides", "must be finite and >= 0");
  }
}

const AlignmentRow *AlignmentMatrix::Find(const NodeId &ambiguous) const {
  auto it = std::lower_bound(
      rows.begin(), rows.end(), ambiguous,
      [](const AlignmentRow &r, const NodeId &id) { return r.ambiguous < id; });
  if (it == rows.end() || it->ambiguous != ambiguous) return nullptr;
  return &*it;
}

std::optional<double> RarityWeight(const std::string &value,
                                   const AttributeFrequencyTable &freq) {
  auto it = freq.counts.find(value);
  if (it == freq.counts.end() || it->second == 0) return std::nullopt;
  return 1.0 / static_cast<double>(it->second);
}

double IndicatorCoefficient(const NodeId &n_i, const NodeId &n_k,
                            const FactGraph &g, const FactGraph &g_prime,
                            const IndicatorSpec &indicators,
                            const AttributeExtractorSpec &extractor) {
  auto [i, k] = PairIndices(n_i, n_k, g, g_prime);
  if (indicators.node_types.empty()) return 1.0;
  StageScorer scorer(g, g_prime, extractor, indicators, nullptr);
  StageScorer::RowState st;
  scorer.BeginRow(i, &st);
  return scorer.Score(k, &st).second;
}

double MatchCount(const NodeId &n_i, const NodeId &n_k, const FactGraph &g,
                  const FactGraph &g_prime,
                  const AttributeExtractorSpec &extractor,
                  const IndicatorSpec &indicators,
                  const AttributeFrequencyTable &freq) {
  auto [i, k] = PairIndices(n_i, n_k, g, g_prime);
  StageScorer scorer(g, g_prime, extractor, indicators, &freq);
  StageScorer::RowState st;
  scorer.BeginRow(i, &st);
  return scorer.Score(k, &st).first;
}

std::optional<std::vector<double>> PosteriorPredictive(
    const std::vector<double> &counts, const std::vector<double> &alphas) {
  if (counts.empty() || counts.size() != alphas.size()) {
    throw Error(ErrorCode::kInvalidArgument,
                "posterior predictive needs equal, non-zero lengths");
  }
  double total = 0.0;
  for (size_t k = 0; k < counts.size(); ++k) {
    if (!IsFiniteNonNegative(counts[k]) || !IsFiniteNonNegative(alphas[k])) {
      throw Error(ErrorCode::kInvalidArgument,
                  "counts and alphas must be finite and >= 0");
    }
    total += counts[k] + alphas[k];
  }
  if (total <= 0.0) return std::nullopt;
  std::vector<double> p(counts.size());
  for (size_t k = 0; k < counts.size(); ++k) p[k] = (counts[k] + alphas[k]) / total;
  return p;
}

unsigned ResolveWorkerCount(unsigned requested) {
  if (requested > 0) return requested;
  if (const char *env = std::getenv("HEAT_WORKERS")) {
    char *end = nullptr;
    long n = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && n > 0) return static_cast<unsigned>(n);
  }
  unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : hw;
}

AlignmentMatrix Eat(const FactGraph &g, const FactGraph &g_prime,
                    const StageConfig &stage, const EatOptions &options) {
  ValidateStage(stage);
  const bool self = &g == &g_prime;
  StageScorer scorer(g, g_prime, stage.extractor, stage.indicators, nullptr);
  CandidateGenerator generator(g_prime, stage.constraint, stage.extractor);

  std::vector<int> ambiguous;
  for (size_t i = 0; i < g.entities().size(); ++i) {
    if (g.entities()[i].node_type == stage.ambiguous_node_type) {
      ambiguous.push_back(static_cast<int>(i));
    }
  }

  AlignmentMatrix matrix;
  matrix.rows.resize(ambiguous.size());
  const bool with_new = stage.prior.new_node_alpha > 0.0;

  auto score_row = [&](size_t r, StageScorer::RowState *st) {
    const int i = ambiguous[r];
    const EntityNode &node = g.entity(i);
    AlignmentRow &row = matrix.rows[r];
    row.ambiguous = node.id;
    std::vector<int> candidates = generator.Candidates(node, self ? i : -1);
    std::vector<double> counts;
    std::vector<double> alphas;
    if (!candidates.empty()) scorer.BeginRow(i, st);
    for (int k : candidates) {
      auto [count, iota] = scorer.Score(k, st);
      CandidateScore s;
      s.candidate = g_prime.entity(k).id;
      s.count = count;
      s.indicator = iota;
      row.scores.push_back(std::move(s));
      counts.push_back(count);
      alphas.push_back(stage.prior.Alpha(node.id, g_prime.entity(k).id));
    }
    if (with_new) {
      CandidateScore s;
      s.count = 0.0;
      s.indicator = 1.0;
      row.scores.push_back(s);
      counts.push_back(0.0);
      alphas.push_back(stage.prior.new_node_alpha);
    }
    std::optional<std::vector<double>> p;
    if (!counts.empty()) p = PosteriorPredictive(counts, alphas);
    if (!p) {
      row.unalignable = true;
      return;
    }
    for (size_t k = 0; k < p->size(); ++k) row.scores[k].probability = (*p)[k];
  };

  const unsigned workers =
      std::min<unsigned>(ResolveWorkerCount(options.workers),
                         std::max<size_t>(1, ambiguous.size() / 64));
  if (workers <= 1) {
    StageScorer::RowState st;
    for (size_t r = 0; r < ambiguous.size(); ++r) score_row(r, &st);
  } else {
    // Rows are independent; each lands in its own pre-sized slot, so the
    // result does not depend on scheduling.
    std::atomic<size_t> next{0};
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        StageScorer::RowState st;
        for (size_t r; (r = next.fetch_add(1)) < ambiguous.size();) score_row(r, &st);
      });
    }
    for (auto &t : pool) t.join();
  }
  return matrix;
}

std::optional<MergeChoice> BestRealCandidate(const AlignmentRow &row) {
  if (row.unalignable || row.scores.empty()) return std::nullopt;
  double best = -1.0;
  for (const CandidateScore &s : row.scores) best = std::max(best, s.probability);
  std::optional<MergeChoice> choice;
  int at_max = 0;
  for (const CandidateScore &s : row.scores) {
    if (s.probability != best) continue;
    if (s.is_new()) return std::nullopt;
    ++at_max;
    if (!choice || *s.candidate < choice->target) {
      choice = MergeChoice{*s.candidate, s.probability, false};
    }
  }
  if (choice) choice->tie = at_max > 1;
  return choice;
}

std::string FormatDouble(double value) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", value);
  return buf;
}

namespace {

constexpr const char *kNewLabel = "NEW";
constexpr const char *kUnalignableLabel = "UNALIGNABLE";

double ParseDouble(const std::string &text, size_t line) {
  char *end = nullptr;
  double v = std::strtod(text.c_str(), &end);
  if (text.empty() || end != text.c_str() + text.size()) {
    throw Error(ErrorCode::kParse, "line " + std::to_string(line) +
                                       ": bad number '" + text + "'");
  }
  return v;
}

std::vector<std::string> SplitTabs(const std::string &line) {
  std::vector<std::string> out;
  size_t start = 0;
  while (true) {
    size_t tab = line.find('\t', start);
    out.push_back(line.substr(start, tab - start));
    if (tab == std::string::npos) break;
    start = tab + 1;
  }
  return out;
}

}  // namespace

void WriteMatrixTsv(const AlignmentMatrix &matrix, std::ostream &out) {
  std::vector<const AlignmentRow *> rows;
  for (const AlignmentRow &r : matrix.rows) rows.push_back(&r);
  std::sort(rows.begin(), rows.end(), [](const AlignmentRow *a, const AlignmentRow *b) {
    return a->ambiguous < b->ambiguous;
  });
  for (const AlignmentRow *row : rows) {
    if (row->unalignable) {
      out << row->ambiguous << '\t' << kUnalignableLabel << "\t0\tNA\n";
      continue;
    }
    std::vector<const CandidateScore *> scores;
    for (const CandidateScore &s : row->scores) scores.push_back(&s);
    std::sort(scores.begin(), scores.end(),
              [](const CandidateScore *a, const CandidateScore *b) {
                if (a->probability != b->probability) return a->probability > b->probability;
                if (a->is_new() != b->is_new()) return b->is_new();
                return a->candidate < b->candidate;
              });
    for (const CandidateScore *s : scores) {
      out << row->ambiguous << '\t' << (s->is_new() ? kNewLabel : *s->candidate)
          << '\t' << FormatDouble(s->count) << '\t' << FormatDouble(s->probability)
          << '\n';
    }
  }
}

AlignmentMatrix ReadMatrixTsv(std::istream &in) {
  std::map<NodeId, AlignmentRow> rows;
  std::string line;
  size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<std::string> cols = SplitTabs(line);
    if (cols.size() != 4 || cols[0].empty() || cols[1].empty()) {
      throw Error(ErrorCode::kParse, "line " + std::to_string(line_no) +
                                         ": expected 4 tab-separated columns");
    }
    AlignmentRow &row = rows[cols[0]];
    row.ambiguous = cols[0];
    if (cols[1] == kUnalignableLabel) {
      row.unalignable = true;
      continue;
    }
    CandidateScore s;
    if (cols[1] != kNewLabel) s.candidate = cols[1];
    s.count = ParseDouble(cols[2], line_no);
    s.probability = ParseDouble(cols[3], line_no);
    // Not serialized.
    s.indicator = std::nan("");
    row.scores.push_back(std::move(s));
  }
  AlignmentMatrix matrix;
  for (auto &[id, row] : rows) {
    std::stable_sort(row.scores.begin(), row.scores.end(),
                     [](const CandidateScore &a, const CandidateScore &b) {
                       if (a.is_new() != b.is_new()) return b.is_new();
                       return a.candidate < b.candidate;
                     });
    matrix.rows.push_back(std::move(row));
  }
  return matrix;
}

}  // namespace heat
