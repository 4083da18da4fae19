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

#ifndef HEAT_PIPELINE_H_
#define HEAT_PIPELINE_H_

#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "heat/alignment.h"
#include "heat/graph.h"

namespace heat {

struct MergeRecord {
  NodeId source_id;
  NodeId target_id;
  double probability = 0.0;
  std::string stage;
  bool tie = false;

  bool operator==(const MergeRecord &other) const = default;
};

struct UnifiedGraph {
  FactGraph graph;
  std::vector<MergeRecord> merge_log;
};

struct StageResult {
  UnifiedGraph unified;
  AlignmentMatrix matrix;
};

struct HeatResult {
  UnifiedGraph unified;
  std::vector<AlignmentMatrix> matrices;  // one per stage, in order
};

// Follows every mapping chain to its end. A cycle collapses onto its
// lexicographically smallest member. Ids absent from the mapping are not
// returned.
std::map<NodeId, NodeId> ResolveMapping(const std::map<NodeId, NodeId> &mapping);

// Renames entities per `mapping` (chains resolved), unions the attribute maps
// of entities that end up sharing an id and drops duplicate facts.
// Errors: kNotFound for unknown source or target, kIntegrity when a target
// names an event.
FactGraph MergeNodes(const FactGraph &graph,
                     const std::map<NodeId, NodeId> &mapping);

// Entities and events with equal ids are merged; facts are unioned.
FactGraph UnionGraphs(const FactGraph &g, const FactGraph &g_prime);

// One EAT pass plus the threshold merge. Passing the same graph twice runs
// in self-alignment mode. Throws kConfig when the stage's node type is in
// neither graph.
StageResult RunStage(const FactGraph &g, const FactGraph &g_prime,
                     const StageConfig &stage, const EatOptions &options = {});

// Stages in order. The first aligns g against g_prime; each later stage
// aligns the unified graph against itself.
HeatResult Heat(const FactGraph &g, const FactGraph &g_prime,
                const std::vector<StageConfig> &stages,
                const EatOptions &options = {});

// source_id, target_id, probability, stage; no header.
void WriteMergeLogTsv(const std::vector<MergeRecord> &log, std::ostream &out);
std::vector<MergeRecord> ReadMergeLogTsv(std::istream &in);

}  // namespace heat

#endif  // HEAT_PIPELINE_H_
