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

#ifndef HEAT_INGEST_H_
#define HEAT_INGEST_H_

#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "heat/alignment.h"
#include "heat/graph.h"

namespace heat {

// Line-delimited JSON records, one per line:
//   {"kind":"entity","id":...,"type":...,"attrs":{"key":["v", ...]}}
//   {"kind":"event","id":...,"attrs":{...}}
//   {"kind":"fact","event":...,"predicate":...,"entity":...}
// Record order does not matter. Blank lines are skipped.
FactGraph ParseFactGraph(std::istream &in, const std::string &source_name);
FactGraph LoadFactGraph(const std::string &path);

// Canonical order: entities, events, facts, each sorted.
void WriteFactGraph(const FactGraph &graph, std::ostream &out);
void SaveFactGraph(const FactGraph &graph, const std::string &path);

// post_id -> pre_id.
struct GroundTruth {
  std::map<NodeId, NodeId> pairs;

  bool empty() const { return pairs.empty(); }
};

// Two tab-separated columns, no header.
GroundTruth ParseGroundTruth(std::istream &in, const std::string &source_name);
GroundTruth LoadGroundTruth(const std::string &path);
void WriteGroundTruth(const GroundTruth &truth, std::ostream &out);

// {"stages": [ {...}, ... ]}
std::vector<StageConfig> ParsePipelineConfig(const std::string &text,
                                             const std::string &source_name);
std::vector<StageConfig> LoadPipelineConfig(const std::string &path);
std::string PipelineConfigToJson(const std::vector<StageConfig> &stages);

std::string ReadFile(const std::string &path);

}  // namespace heat

#endif  // HEAT_INGEST_H_
