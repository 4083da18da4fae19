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

#ifndef HEAT_FREQUENCY_H_
#define HEAT_FREQUENCY_H_

#include <cstdint>
#include <map>
#include <string>

#include "heat/graph.h"
#include "heat/matchers.h"

namespace heat {

// Extracted-value -> number of facts whose entity endpoint carries it.
struct AttributeFrequencyTable {
  std::map<std::string, uint64_t> counts;

  uint64_t Total() const;
};

AttributeFrequencyTable AttributeFrequencies(
    const FactGraph &graph, const AttributeExtractorSpec &extractor);

}  // namespace heat

#endif  // HEAT_FREQUENCY_H_
