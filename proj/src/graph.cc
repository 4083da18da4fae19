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

#include "heat/graph.h"

#include <algorithm>
#include <unordered_set>

#include "heat/error.h"

namespace heat {

const char *ErrorCodeName(ErrorCode code) {
  switch (code) {
    case ErrorCode::kNotFound: return "not found";
    case ErrorCode::kIntegrity: return "integrity error";
    case ErrorCode::kDuplicate: return "duplicate";
    case ErrorCode::kDanglingHub: return "dangling hub";
    case ErrorCode::kParse: return "parse error";
    case ErrorCode::kConfig: return "config error";
    case ErrorCode::kIo: return "i/o error";
    case ErrorCode::kInvalidArgument: return "invalid argument";
    case ErrorCode::kInvariant: return "invariant failure";
  }
  return "unknown";
}

namespace {

void CheckAttributes(const AttributeMap &attrs, const NodeId &owner) {
  for (const auto &[key, values] : attrs) {
    if (key.empty()) {
      throw Error(ErrorCode::kIntegrity,
                  "node '" + owner + "' has an empty attribute key");
    }
  }
}

std::string Describe(const FactTriple &f) {
  return "(" + f.event + ", " + f.predicate + ", " + f.entity + ")";
}

}  // namespace

FactGraph LoadValidate(RawGraph raw) {
  FactGraph g;
  g.entities_ = std::move(raw.entities);
  g.events_ = std::move(raw.events);
  g.facts_ = std::move(raw.facts);

  std::sort(g.entities_.begin(), g.entities_.end(),
            [](const EntityNode &a, const EntityNode &b) { return a.id < b.id; });
  std::sort(g.events_.begin(), g.events_.end(),
            [](const EventHub &a, const EventHub &b) { return a.id < b.id; });
  std::sort(g.facts_.begin(), g.facts_.end());

  for (size_t i = 0; i < g.entities_.size(); ++i) {
    const EntityNode &e = g.entities_[i];
    if (e.id.empty()) throw Error(ErrorCode::kIntegrity, "entity with empty id");
    if (e.node_type.empty()) {
      throw Error(ErrorCode::kIntegrity, "entity '" + e.id + "' has no type");
    }
    if (i > 0 && g.entities_[i - 1].id == e.id) {
      throw Error(ErrorCode::kDuplicate, "duplicate entity id '" + e.id + "'");
    }
    CheckAttributes(e.attributes, e.id);
    g.entity_index_.emplace(e.id, static_cast<int>(i));
  }
  for (size_t i = 0; i < g.events_.size(); ++i) {
    const EventHub &e = g.events_[i];
    if (e.id.empty()) throw Error(ErrorCode::kIntegrity, "event with empty id");
    if (i > 0 && g.events_[i - 1].id == e.id) {
      throw Error(ErrorCode::kDuplicate, "duplicate event id '" + e.id + "'");
    }
    if (g.entity_index_.count(e.id)) {
      throw Error(ErrorCode::kIntegrity,
                  "id '" + e.id + "' is used by both an entity and an event");
    }
    CheckAttributes(e.attributes, e.id);
    g.event_index_.emplace(e.id, static_cast<int>(i));
  }

  g.entity_events_.assign(g.entities_.size(), {});
  g.fact_entity_.resize(g.facts_.size());
  g.event_fact_begin_.assign(g.events_.size() + 1, 0);
  for (size_t i = 0; i < g.facts_.size(); ++i) {
    const FactTriple &f = g.facts_[i];
    if (i > 0 && g.facts_[i - 1] == f) {
      throw Error(ErrorCode::kDuplicate, "duplicate fact " + Describe(f));
    }
    if (f.predicate.empty()) {
      throw Error(ErrorCode::kIntegrity, "fact " + Describe(f) + " has no predicate");
    }
    auto ev = g.event_index_.find(f.event);
    if (ev == g.event_index_.end()) {
      throw Error(ErrorCode::kIntegrity, "fact " + Describe(f) +
                                             " references missing event '" +
                                             f.event + "'");
    }
    auto en = g.entity_index_.find(f.entity);
    if (en == g.entity_index_.end()) {
      throw Error(ErrorCode::kIntegrity, "fact " + Describe(f) +
                                             " references missing entity '" +
                                             f.entity + "'");
    }
    g.fact_entity_[i] = en->second;
    // Facts are sorted by event id, and events by id, so event indices are
    // non-decreasing here.
    g.event_fact_begin_[ev->second + 1]++;
    auto &evs = g.entity_events_[en->second];
    if (evs.empty() || evs.back() != ev->second) evs.push_back(ev->second);
  }
  for (size_t i = 0; i < g.events_.size(); ++i) {
    if (g.event_fact_begin_[i + 1] == 0) {
      throw Error(ErrorCode::kDanglingHub,
                  "event '" + g.events_[i].id + "' has no facts");
    }
    g.event_fact_begin_[i + 1] += g.event_fact_begin_[i];
  }
  return g;
}

RawGraph ToRaw(const FactGraph &graph) {
  return RawGraph{graph.entities(), graph.events(), graph.facts()};
}

int FactGraph::FindEntity(const NodeId &id) const {
  auto it = entity_index_.find(id);
  return it == entity_index_.end() ? -1 : it->second;
}

int FactGraph::FindEvent(const NodeId &id) const {
  auto it = event_index_.find(id);
  return it == event_index_.end() ? -1 : it->second;
}

const EntityNode &FactGraph::GetEntity(const NodeId &id) const {
  int index = FindEntity(id);
  if (index < 0) throw Error(ErrorCode::kNotFound, "unknown entity '" + id + "'");
  return entities_[index];
}

bool FactGraph::HasNodeType(const std::string &node_type) const {
  for (const EntityNode &e : entities_) {
    if (e.node_type == node_type) return true;
  }
  return false;
}

std::vector<NodeId> MarkovBlanket(const FactGraph &graph, const NodeId &id) {
  int self = graph.FindEntity(id);
  if (self < 0) throw Error(ErrorCode::kNotFound, "unknown entity '" + id + "'");
  std::vector<int> members;
  for (int ev : graph.EventsOf(self)) {
    auto [begin, end] = graph.FactsOf(ev);
    for (int f = begin; f < end; ++f) {
      int other = graph.FactEntity(f);
      if (other != self) members.push_back(other);
    }
  }
  std::sort(members.begin(), members.end());
  members.erase(std::unique(members.begin(), members.end()), members.end());
  std::vector<NodeId> out;
  out.reserve(members.size());
  for (int m : members) out.push_back(graph.entity(m).id);
  return out;
}

std::vector<NeighborFact> NeighborFacts(const FactGraph &graph,
                                        const NodeId &id) {
  int self = graph.FindEntity(id);
  if (self < 0) throw Error(ErrorCode::kNotFound, "unknown entity '" + id + "'");
  std::vector<NeighborFact> out;
  for (int ev : graph.EventsOf(self)) {
    auto [begin, end] = graph.FactsOf(ev);
    for (int f = begin; f < end; ++f) {
      int other = graph.FactEntity(f);
      if (other == self) continue;
      out.push_back({&graph.facts()[f], &graph.entity(other)});
    }
  }
  return out;
}

}  // namespace heat
