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

#ifndef HEAT_EVALUATION_H_
#define HEAT_EVALUATION_H_

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "heat/alignment.h"
#include "heat/graph.h"
#include "heat/ingest.h"
#include "heat/pipeline.h"

namespace heat {

struct EvalPoint {
  double threshold = 0.0;
  double precision = 1.0;
  double recall = 0.0;
  int64_t n_predicted = 0;
  int64_t n_correct = 0;
  // False when nothing was predicted; precision is then 1 by convention.
  bool precision_defined = false;

  double F1() const;
};

struct EvalReport {
  std::vector<EvalPoint> points;
};

// 0.05, 0.10, ..., 0.95.
std::vector<double> DefaultThresholds();

// Predictions come from rows whose ambiguous id is a post id of the truth:
// the row's argmax real candidate (see BestRealCandidate) when its
// probability exceeds the threshold. Errors: kInvalidArgument for empty
// truth or thresholds that are not strictly increasing.
EvalReport PrecisionRecall(const AlignmentMatrix &matrix,
                           const GroundTruth &truth,
                           const std::vector<double> &thresholds);

// Same scoring over a merge log. A record counts for the post id at either
// end of it (self-alignment may merge in either direction); the most
// probable record per post id is the prediction.
EvalReport PrecisionRecallFromLog(const std::vector<MergeRecord> &log,
                                  const GroundTruth &truth,
                                  const std::vector<double> &thresholds);

// threshold,precision,recall,n_predicted,n_correct with a header line.
void WriteReportCsv(const EvalReport &report, std::ostream &out);

struct SynthSpec {
  int n_true_entities = 1000;
  double duplicate_rate = 0.0;
  // Events led per person, drawn uniformly from [min, max].
  int pre_events_min = 6;
  int pre_events_max = 10;
  int post_events_min = 1;
  int post_events_max = 2;
  double attribute_noise_rate = 0.0;
  double name_collision_rate = 0.0;
  uint64_t seed = 1;
  // 0 picks a size from n_true_entities.
  int n_organizations = 0;
  int vocabulary_size = 0;
  int community_size = 8;
  int keywords_per_entity = 4;
  int max_coauthors = 2;

  void Validate() const;
};

SynthSpec ParseSynthSpec(const std::string &json_text,
                         const std::string &source_name);
std::string SynthSpecToJson(const SynthSpec &spec);

struct SyntheticDataset {
  FactGraph pre;   // reference graph, resolved ids
  FactGraph post;  // noisy graph to be aligned
  GroundTruth truth;
};

// Publication-style pair: persons with organizations, keyword text nodes and
// co-authored events. Post-graph persons carry only the hashed
// first-initial+last-name key; a share of keyword nodes is replaced by a
// perturbed variant node.
SyntheticDataset GenerateSynthetic(const SynthSpec &spec);

// Stages matching the synthetic schema: a keyword stage (Levenshtein 0.3,
// tau 0.7) and a person stage (hashed name, organization indicators).
StageConfig SyntheticTextStage();
StageConfig SyntheticPersonStage();

}  // namespace heat

#endif  // HEAT_EVALUATION_H_
