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

#ifndef HEAT_ALIGNMENT_H_
#define HEAT_ALIGNMENT_H_

#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "heat/frequency.h"
#include "heat/graph.h"
#include "heat/matchers.h"

namespace heat {

// Dirichlet concentration parameters for one stage.
struct PriorSpec {
  double symmetric_alpha = 1.0;
  // (ambiguous id, candidate id) -> alpha
  std::map<std::pair<NodeId, NodeId>, double> overrides;
  // Prior mass of the "previously unseen node" pseudo-category. Zero drops
  // the category from every row.
  double new_node_alpha = 1.0;

  double Alpha(const NodeId &ambiguous, const NodeId &candidate) const;
};

// One HEAT stage: which nodes to align, how to block and compare them, and
// the merge threshold.
struct StageConfig {
  std::string name;
  std::string ambiguous_node_type;
  ConstraintSpec constraint;
  AttributeExtractorSpec extractor;
  IndicatorSpec indicators;
  PriorSpec prior;
  double tau = 0.7;
};

// Throws kConfig naming the stage and field.
void ValidateStage(const StageConfig &stage);

struct CandidateScore {
  std::optional<NodeId> candidate;  // nullopt is the NEW category
  double count = 0.0;
  double indicator = 1.0;
  double probability = 0.0;

  bool is_new() const { return !candidate.has_value(); }
};

struct AlignmentRow {
  NodeId ambiguous;
  // Real candidates sorted by id, then NEW when present.
  std::vector<CandidateScore> scores;
  // Every count and alpha was zero; no probabilities exist for this row.
  bool unalignable = false;
};

struct AlignmentMatrix {
  std::vector<AlignmentRow> rows;  // sorted by ambiguous id

  const AlignmentRow *Find(const NodeId &ambiguous) const;
};

// 1 / count(value), or nullopt when the value never occurs in the table.
std::optional<double> RarityWeight(const std::string &value,
                                   const AttributeFrequencyTable &freq);

// Multiplicative gate from indicator-typed neighbors of n_i. 1 when no
// indicator types are configured; 0 when n_i has no indicator neighbors or
// n_k has no events. Values above 1 (a value repeated across predicates of
// one event) are clamped.
double IndicatorCoefficient(const NodeId &n_i, const NodeId &n_k,
                            const FactGraph &g, const FactGraph &g_prime,
                            const IndicatorSpec &indicators,
                            const AttributeExtractorSpec &extractor);

// Rarity-weighted count of attribute agreements between the non-indicator
// blanket of n_i and the neighbor facts of n_k, gated by the indicator
// coefficient.
double MatchCount(const NodeId &n_i, const NodeId &n_k, const FactGraph &g,
                  const FactGraph &g_prime,
                  const AttributeExtractorSpec &extractor,
                  const IndicatorSpec &indicators,
                  const AttributeFrequencyTable &freq);

// (c_k + alpha_k) / sum_j (c_j + alpha_j). nullopt when the denominator is
// zero. Throws kInvalidArgument on length mismatch, empty input or negative
// entries.
std::optional<std::vector<double>> PosteriorPredictive(
    const std::vector<double> &counts, const std::vector<double> &alphas);

struct EatOptions {
  // 0 means: HEAT_WORKERS from the environment, else hardware concurrency.
  unsigned workers = 0;
};

unsigned ResolveWorkerCount(unsigned requested);

// Scores every entity of stage.ambiguous_node_type in g against its blocked
// candidates in g_prime. Passing the same graph object twice selects
// self-alignment: a node is never its own candidate.
AlignmentMatrix Eat(const FactGraph &g, const FactGraph &g_prime,
                    const StageConfig &stage, const EatOptions &options = {});

struct MergeChoice {
  NodeId target;
  double probability = 0.0;
  bool tie = false;  // several real candidates shared the maximum
};

// The row's argmax when it is a real node. NEW wins ties; ties among real
// candidates go to the smallest id. No threshold is applied.
std::optional<MergeChoice> BestRealCandidate(const AlignmentRow &row);

// Header-free TSV: ambiguous_id, candidate_id|NEW, count, probability.
// Sorted by ambiguous id then descending probability; unalignable rows are a
// single UNALIGNABLE line.
void WriteMatrixTsv(const AlignmentMatrix &matrix, std::ostream &out);
AlignmentMatrix ReadMatrixTsv(std::istream &in);

std::string FormatDouble(double value);

}  // namespace heat

#endif  // HEAT_ALIGNMENT_H_
