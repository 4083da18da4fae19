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

#include "heat/pipeline.h"

#include <algorithm>
#include <istream>
#include <ostream>
#include <set>

#include "heat/error.h"

namespace heat {

namespace {

// Appends values not already present, keeping first-seen order.
void UnionInto(AttributeMap *into, const AttributeMap &from) {
  for (const auto &[key, values] : from) {
    std::vector<std::string> &dst = (*into)[key];
    for (const std::string &v : values) {
      if (std::find(dst.begin(), dst.end(), v) == dst.end()) dst.push_back(v);
    }
  }
}

void DedupeFacts(std::vector<FactTriple> *facts) {
  std::sort(facts->begin(), facts->end());
  facts->erase(std::unique(facts->begin(), facts->end()), facts->end());
}

}  // namespace

std::map<NodeId, NodeId> ResolveMapping(const std::map<NodeId, NodeId> &mapping) {
  std::map<NodeId, NodeId> resolved;
  for (const auto &[start, first_target] : mapping) {
    if (resolved.count(start)) continue;
    std::vector<NodeId> path{start};
    std::set<NodeId> on_path{start};
    NodeId cur = first_target;
    NodeId final_id;
    while (true) {
      if (auto done = resolved.find(cur); done != resolved.end()) {
        final_id = done->second;
        break;
      }
      if (on_path.count(cur)) {
        // Cycle: everything from `cur` onwards on the path is in it.
        auto pos = std::find(path.begin(), path.end(), cur);
        final_id = *std::min_element(pos, path.end());
        break;
      }
      auto next = mapping.find(cur);
      if (next == mapping.end()) {
        final_id = cur;
        break;
      }
      path.push_back(cur);
      on_path.insert(cur);
      cur = next->second;
    }
    for (const NodeId &id : path) resolved[id] = final_id;
  }
  return resolved;
}

FactGraph MergeNodes(const FactGraph &graph,
                     const std::map<NodeId, NodeId> &mapping) {
  if (mapping.empty()) return graph;
  for (const auto &[source, target] : mapping) {
    if (graph.FindEntity(source) < 0) {
      if (graph.FindEvent(source) >= 0) {
        throw Error(ErrorCode::kIntegrity,
                    "merge source '" + source + "' is an event, not an entity");
      }
      throw Error(ErrorCode::kNotFound, "merge source '" + source + "' not in graph");
    }
    if (graph.FindEntity(target) < 0) {
      if (graph.FindEvent(target) >= 0) {
        throw Error(ErrorCode::kIntegrity, "merge of '" + source + "' onto '" +
                                               target +
                                               "' collides with an event id");
      }
      throw Error(ErrorCode::kNotFound, "merge target '" + target + "' not in graph");
    }
  }
  const std::map<NodeId, NodeId> resolved = ResolveMapping(mapping);
  auto final_id = [&](const NodeId &id) -> const NodeId & {
    auto it = resolved.find(id);
    return it == resolved.end() ? id : it->second;
  };

  // Representatives keep their own attributes first; absorbed nodes follow in
  // id order (entities() is sorted).
  std::map<NodeId, EntityNode> merged;
  for (const EntityNode &e : graph.entities()) {
    if (final_id(e.id) == e.id) merged.emplace(e.id, e);
  }
  for (const EntityNode &e : graph.entities()) {
    const NodeId &to = final_id(e.id);
    if (to == e.id) continue;
    UnionInto(&merged.at(to).attributes, e.attributes);
  }

  RawGraph raw;
  raw.events = graph.events();
  for (auto &[id, e] : merged) raw.entities.push_back(std::move(e));
  raw.facts.reserve(graph.facts().size());
  for (const FactTriple &f : graph.facts()) {
    raw.facts.push_back({f.event, f.predicate, final_id(f.entity)});
  }
  DedupeFacts(&raw.facts);
  return LoadValidate(std::move(raw));
}

FactGraph UnionGraphs(const FactGraph &g, const FactGraph &g_prime) {
  std::map<NodeId, EntityNode> entities;
  for (const EntityNode &e : g_prime.entities()) entities.emplace(e.id, e);
  for (const EntityNode &e : g.entities()) {
    auto [it, inserted] = entities.emplace(e.id, e);
    if (!inserted) UnionInto(&it->second.attributes, e.attributes);
  }
  std::map<NodeId, EventHub> events;
  for (const EventHub &e : g_prime.events()) events.emplace(e.id, e);
  for (const EventHub &e : g.events()) {
    auto [it, inserted] = events.emplace(e.id, e);
    if (!inserted) UnionInto(&it->second.attributes, e.attributes);
  }
  RawGraph raw;
  for (auto &[id, e] : entities) raw.entities.push_back(std::move(e));
  for (auto &[id, e] : events) raw.events.push_back(std::move(e));
  raw.facts = g_prime.facts();
  raw.facts.insert(raw.facts.end(), g.facts().begin(), g.facts().end());
  DedupeFacts(&raw.facts);
  return LoadValidate(std::move(raw));
}

StageResult RunStage(const FactGraph &g, const FactGraph &g_prime,
                     const StageConfig &stage, const EatOptions &options) {
  ValidateStage(stage);
  const bool self = &g == &g_prime;
  if (!g.HasNodeType(stage.ambiguous_node_type) &&
      !g_prime.HasNodeType(stage.ambiguous_node_type)) {
    throw Error(ErrorCode::kConfig, "stage '" + stage.name + "': node type '" +
                                        stage.ambiguous_node_type +
                                        "' is absent from both graphs");
  }

  StageResult result;
  result.matrix = Eat(g, g_prime, stage, options);

  std::map<NodeId, NodeId> mapping;
  std::vector<MergeRecord> decisions;
  for (const AlignmentRow &row : result.matrix.rows) {
    std::optional<MergeChoice> choice = BestRealCandidate(row);
    if (!choice || !(choice->probability > stage.tau)) continue;
    if (choice->target == row.ambiguous) continue;  // same id in both graphs
    mapping.emplace(row.ambiguous, choice->target);
    decisions.push_back(
        {row.ambiguous, choice->target, choice->probability, stage.name, choice->tie});
  }

  FactGraph base = self ? g : UnionGraphs(g, g_prime);
  const std::map<NodeId, NodeId> resolved = ResolveMapping(mapping);
  // A node that ends up keeping its own id (cycle representative) is not
  // recorded as merged.
  for (MergeRecord &d : decisions) {
    if (resolved.at(d.source_id) != d.source_id) {
      result.unified.merge_log.push_back(std::move(d));
    }
  }
  result.unified.graph = MergeNodes(base, mapping);
  return result;
}

HeatResult Heat(const FactGraph &g, const FactGraph &g_prime,
                const std::vector<StageConfig> &stages,
                const EatOptions &options) {
  if (stages.empty()) {
    throw Error(ErrorCode::kConfig, "pipeline needs at least one stage");
  }
  HeatResult result;
  for (size_t s = 0; s < stages.size(); ++s) {
    StageResult stage_result =
        s == 0 ? RunStage(g, g_prime, stages[s], options)
               : RunStage(result.unified.graph, result.unified.graph, stages[s], options);
    result.matrices.push_back(std::move(stage_result.matrix));
    result.unified.graph = std::move(stage_result.unified.graph);
    for (MergeRecord &r : stage_result.unified.merge_log) {
      result.unified.merge_log.push_back(std::move(r));
    }
  }
  return result;
}

void WriteMergeLogTsv(const std::vector<MergeRecord> &log, std::ostream &out) {
  for (const MergeRecord &r : log) {
    out << r.source_id << '\t' << r.target_id << '\t' << FormatDouble(r.probability)
        << '\t' << r.stage << '\n';
  }
}

std::vector<MergeRecord> ReadMergeLogTsv(std::istream &in) {
  std::vector<MergeRecord> log;
  std::string line;
  size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<std::string> cols;
    size_t start = 0;
    while (true) {
      size_t tab = line.find('\t', start);
      cols.push_back(line.substr(start, tab - start));
      if (tab == std::string::npos) break;
      start = tab + 1;
    }
    if (cols.size() != 4) {
      throw Error(ErrorCode::kParse, "merge log line " + std::to_string(line_no) +
                                         ": expected 4 tab-separated columns");
    }
    MergeRecord r;
    r.source_id = cols[0];
    r.target_id = cols[1];
    char *end = nullptr;
    r.probability = std::strtod(cols[2].c_str(), &end);
    if (cols[2].empty() || end != cols[2].c_str() + cols[2].size()) {
      throw Error(ErrorCode::kParse, "merge log line " + std::to_string(line_no) +
                                         ": bad probability '" + cols[2] + "'");
    }
    r.stage = cols[3];
    log.push_back(std::move(r));
  }
  return log;
}

}  // namespace heat
