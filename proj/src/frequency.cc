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

#include "heat/frequency.h"

#include <vector>

namespace heat {

uint64_t AttributeFrequencyTable::Total() const {
  uint64_t total = 0;
  for (const auto &[value, count] : counts) total += count;
  return total;
}

AttributeFrequencyTable AttributeFrequencies(
    const FactGraph &graph, const AttributeExtractorSpec &extractor) {
  // Extract once per entity, then tally once per fact.
  std::vector<std::vector<std::string>> values(graph.entities().size());
  for (size_t i = 0; i < values.size(); ++i) {
    values[i] = ExtractDistinct(graph.entities()[i], extractor);
  }
  AttributeFrequencyTable table;
  for (size_t f = 0; f < graph.facts().size(); ++f) {
    for (const std::string &v : values[graph.FactEntity(static_cast<int>(f))]) {
      table.counts[v]++;
    }
  }
  return table;
}

}  // namespace heat
