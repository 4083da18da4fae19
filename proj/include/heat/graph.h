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

#ifndef HEAT_GRAPH_H_
#define HEAT_GRAPH_H_

#include <cstddef>
#include <map>
#include <string>
#include <unordered_map>
#include <vector>

namespace heat {

using NodeId = std::string;

// Attribute key -> list of values. Ordered so serialization is stable.
using AttributeMap = std::map<std::string, std::vector<std::string>>;

struct EntityNode {
  NodeId id;
  std::string node_type;
  AttributeMap attributes;

  bool operator==(const EntityNode &other) const = default;
};

struct EventHub {
  NodeId id;
  AttributeMap attributes;

  bool operator==(const EventHub &other) const = default;
};

struct FactTriple {
  NodeId event;
  std::string predicate;
  NodeId entity;

  auto operator<=>(const FactTriple &other) const = default;
  bool operator==(const FactTriple &other) const = default;
};

// Unvalidated graph contents, in whatever order they were read.
struct RawGraph {
  std::vector<EntityNode> entities;
  std::vector<EventHub> events;
  std::vector<FactTriple> facts;
};

// Immutable event-hub graph. Entities, events and facts are held in sorted
// order (facts by event, predicate, entity) and indexed for neighborhood
// queries. Construct through LoadValidate.
class FactGraph {
 public:
  FactGraph() = default;

  const std::vector<EntityNode> &entities() const { return entities_; }
  const std::vector<EventHub> &events() const { return events_; }
  const std::vector<FactTriple> &facts() const { return facts_; }

  bool empty() const { return entities_.empty() && events_.empty(); }

  // Index lookups; -1 when absent.
  int FindEntity(const NodeId &id) const;
  int FindEvent(const NodeId &id) const;

  const EntityNode &entity(int index) const { return entities_[index]; }

  // Throws kNotFound.
  const EntityNode &GetEntity(const NodeId &id) const;

  // Sorted event indices an entity participates in.
  const std::vector<int> &EventsOf(int entity_index) const {
    return entity_events_[entity_index];
  }
  // Half-open range of fact indices belonging to an event.
  std::pair<int, int> FactsOf(int event_index) const {
    return {event_fact_begin_[event_index], event_fact_begin_[event_index + 1]};
  }
  // Entity index of a fact's entity endpoint.
  int FactEntity(int fact_index) const { return fact_entity_[fact_index]; }

  bool HasNodeType(const std::string &node_type) const;

  bool operator==(const FactGraph &other) const {
    return entities_ == other.entities_ && events_ == other.events_ &&
           facts_ == other.facts_;
  }

 private:
  friend FactGraph LoadValidate(RawGraph raw);

  std::vector<EntityNode> entities_;
  std::vector<EventHub> events_;
  std::vector<FactTriple> facts_;
  std::unordered_map<NodeId, int> entity_index_;
  std::unordered_map<NodeId, int> event_index_;
  std::vector<std::vector<int>> entity_events_;
  std::vector<int> event_fact_begin_;
  std::vector<int> fact_entity_;
};

// Validates referential integrity and builds the indexed graph.
// Errors: kIntegrity (dangling endpoint, entity/event id clash, empty id or
// type), kDuplicate (repeated entity, event or fact), kDanglingHub (event with
// no facts).
FactGraph LoadValidate(RawGraph raw);

RawGraph ToRaw(const FactGraph &graph);

// Entities sharing at least one event with `id`, excluding itself. Sorted.
std::vector<NodeId> MarkovBlanket(const FactGraph &graph, const NodeId &id);

struct NeighborFact {
  const FactTriple *fact;
  const EntityNode *entity;
};

// Facts on the events of `id` whose entity endpoint is another entity,
// ordered by (event, predicate, entity).
std::vector<NeighborFact> NeighborFacts(const FactGraph &graph,
                                        const NodeId &id);

}  // namespace heat

#endif  // HEAT_GRAPH_H_
