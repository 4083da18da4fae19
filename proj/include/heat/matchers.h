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

#ifndef HEAT_MATCHERS_H_
#define HEAT_MATCHERS_H_

#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <cstdint>
#include <unordered_map>
#include <vector>

#include "heat/graph.h"

namespace heat {

enum class Normalization { kNone, kCaseFold, kCaseFoldTrim };

// Which attribute keys of a node feed matching and weighting, and how the
// values are normalized before comparison.
struct AttributeExtractorSpec {
  std::vector<std::string> keys;
  Normalization normalization = Normalization::kCaseFold;
};

std::string Normalize(std::string_view value, Normalization normalization);

// Values under spec.keys in key order, each normalized. Duplicates are kept.
std::vector<std::string> Extract(const EntityNode &node,
                                 const AttributeExtractorSpec &spec);

// Extract() with repeated values dropped, first occurrence wins. This is the
// value set used for matching and frequency counting.
std::vector<std::string> ExtractDistinct(const EntityNode &node,
                                         const AttributeExtractorSpec &spec);

// Unit-cost edit distance over UTF-8 code points.
size_t LevenshteinDistance(std::string_view a, std::string_view b);

// Edit distance divided by the longer length in code points; 0 for two empty
// strings.
double NormalizedLevenshtein(std::string_view a, std::string_view b);

enum class ConstraintKind { kExactKey, kHashedName, kLevenshtein, kTypeOnly };

struct ConstraintSpec {
  ConstraintKind kind = ConstraintKind::kTypeOnly;
  // Attribute compared by kExactKey, kHashedName and kLevenshtein.
  std::string key;
  double max_normalized_distance = 0.0;
  std::string candidate_node_type;
};

inline constexpr const char *kDefaultHashedNameKey = "name_hash";

struct IndicatorSpec {
  std::set<std::string> node_types;
};

// Blocking index over the candidate-typed entities of one graph. Build once
// per (graph, constraint) and query per ambiguous node.
class CandidateGenerator {
 public:
  CandidateGenerator(const FactGraph &g_prime, const ConstraintSpec &constraint,
                     const AttributeExtractorSpec &extractor);

  // Sorted entity indices into g_prime. `exclude` (an entity index, or -1)
  // is dropped from the result.
  std::vector<int> Candidates(const EntityNode &node, int exclude) const;

 private:
  struct LengthBucket {
    std::vector<int> values;  // indices into values_
  };

  void LevenshteinMatches(const std::u32string &query,
                          std::vector<int> *out) const;

  const FactGraph &graph_;
  ConstraintSpec constraint_;
  AttributeExtractorSpec extractor_;

  std::vector<int> typed_;  // all candidate-typed entities
  // exact / hashed: value -> entities
  std::unordered_map<std::string, std::vector<int>> exact_;
  // levenshtein: distinct values with their owners, bigram postings
  std::vector<std::u32string> values_;
  std::vector<std::vector<int>> value_owners_;
  std::map<size_t, LengthBucket> by_length_;
  std::unordered_map<uint64_t, std::vector<std::pair<int, int>>> bigrams_;
};

// K_i: entities of g_prime passing `constraint` against `node_id` in g.
// When g and g_prime are the same object the node itself is excluded.
std::vector<NodeId> CandidateSet(const NodeId &node_id, const FactGraph &g,
                                 const FactGraph &g_prime,
                                 const ConstraintSpec &constraint,
                                 const AttributeExtractorSpec &extractor);

}  // namespace heat

#endif  // HEAT_MATCHERS_H_
