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

#include "heat/matchers.h"

#include <algorithm>
#include <cmath>

#include "heat/error.h"

namespace heat {

namespace {

// Invalid or truncated sequences decode byte by byte.
std::u32string DecodeUtf8(std::string_view s) {
  std::u32string out;
  out.reserve(s.size());
  size_t i = 0;
  while (i < s.size()) {
    const unsigned char lead = static_cast<unsigned char>(s[i]);
    size_t extra = 0;
    char32_t cp = lead;
    if (lead >= 0xC0 && lead < 0xE0) {
      extra = 1;
      cp = lead & 0x1F;
    } else if (lead >= 0xE0 && lead < 0xF0) {
      extra = 2;
      cp = lead & 0x0F;
    } else if (lead >= 0xF0 && lead < 0xF8) {
      extra = 3;
      cp = lead & 0x07;
    }
    bool ok = i + extra < s.size();
    for (size_t k = 1; ok && k <= extra; ++k) {
      const unsigned char c = static_cast<unsigned char>(s[i + k]);
      if ((c & 0xC0) != 0x80) ok = false;
      cp = (cp << 6) | (c & 0x3F);
    }
    if (!ok || extra == 0) {
      out.push_back(lead);
      ++i;
    } else {
      out.push_back(cp);
      i += extra + 1;
    }
  }
  return out;
}

size_t EditDistance(const std::u32string &a, const std::u32string &b) {
  const std::u32string &s = a.size() < b.size() ? b : a;
  const std::u32string &t = a.size() < b.size() ? a : b;
  std::vector<size_t> row(t.size() + 1);
  for (size_t j = 0; j <= t.size(); ++j) row[j] = j;
  for (size_t i = 1; i <= s.size(); ++i) {
    size_t diag = row[0];
    row[0] = i;
    for (size_t j = 1; j <= t.size(); ++j) {
      size_t up = row[j];
      size_t cost = s[i - 1] == t[j - 1] ? 0 : 1;
      row[j] = std::min({row[j] + 1, row[j - 1] + 1, diag + cost});
      diag = up;
    }
  }
  return row[t.size()];
}

double Normalized(const std::u32string &a, const std::u32string &b) {
  size_t longest = std::max(a.size(), b.size());
  if (longest == 0) return 0.0;
  return static_cast<double>(EditDistance(a, b)) /
         static_cast<double>(longest);
}

bool WithinDistance(double normalized, double max_distance) {
  return normalized <= max_distance + 1e-12;
}

uint64_t BigramKey(char32_t a, char32_t b) {
  return (static_cast<uint64_t>(a) << 32) | static_cast<uint64_t>(b);
}

std::vector<std::pair<uint64_t, int>> Bigrams(const std::u32string &s) {
  std::vector<uint64_t> keys;
  for (size_t i = 0; i + 1 < s.size(); ++i) keys.push_back(BigramKey(s[i], s[i + 1]));
  std::sort(keys.begin(), keys.end());
  std::vector<std::pair<uint64_t, int>> out;
  for (uint64_t k : keys) {
    if (!out.empty() && out.back().first == k) {
      out.back().second++;
    } else {
      out.emplace_back(k, 1);
    }
  }
  return out;
}

std::vector<std::string> ValuesUnder(const EntityNode &node,
                                     const std::string &key,
                                     Normalization normalization) {
  std::vector<std::string> out;
  auto it = node.attributes.find(key);
  if (it == node.attributes.end()) return out;
  for (const std::string &v : it->second) {
    std::string n = Normalize(v, normalization);
    if (std::find(out.begin(), out.end(), n) == out.end()) out.push_back(std::move(n));
  }
  return out;
}

std::string ConstraintKey(const ConstraintSpec &c) {
  if (c.kind == ConstraintKind::kHashedName && c.key.empty()) {
    return kDefaultHashedNameKey;
  }
  return c.key;
}

}  // namespace

std::string Normalize(std::string_view value, Normalization normalization) {
  std::string out(value);
  if (normalization == Normalization::kNone) return out;
  for (char &c : out) {
    if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
  }
  if (normalization == Normalization::kCaseFoldTrim) {
    const char *ws = " \t\r\n\f\v";
    size_t b = out.find_first_not_of(ws);
    if (b == std::string::npos) return "";
    size_t e = out.find_last_not_of(ws);
    out = out.substr(b, e - b + 1);
  }
  return out;
}

std::vector<std::string> Extract(const EntityNode &node,
                                 const AttributeExtractorSpec &spec) {
  std::vector<std::string> out;
  for (const std::string &key : spec.keys) {
    auto it = node.attributes.find(key);
    if (it == node.attributes.end()) continue;
    for (const std::string &v : it->second) out.push_back(Normalize(v, spec.normalization));
  }
  return out;
}

std::vector<std::string> ExtractDistinct(const EntityNode &node,
                                         const AttributeExtractorSpec &spec) {
  std::vector<std::string> out;
  for (std::string &v : Extract(node, spec)) {
    if (std::find(out.begin(), out.end(), v) == out.end()) out.push_back(std::move(v));
  }
  return out;
}

size_t LevenshteinDistance(std::string_view a, std::string_view b) {
  return EditDistance(DecodeUtf8(a), DecodeUtf8(b));
}

double NormalizedLevenshtein(std::string_view a, std::string_view b) {
  return Normalized(DecodeUtf8(a), DecodeUtf8(b));
}

CandidateGenerator::CandidateGenerator(const FactGraph &g_prime,
                                       const ConstraintSpec &constraint,
                                       const AttributeExtractorSpec &extractor)
    : graph_(g_prime), constraint_(constraint), extractor_(extractor) {
  if (constraint_.kind == ConstraintKind::kLevenshtein &&
      !(constraint_.max_normalized_distance >= 0.0 &&
        constraint_.max_normalized_distance <= 1.0)) {
    throw Error(ErrorCode::kConfig,
                "levenshtein max_normalized_distance must lie in [0, 1]");
  }
  const std::string key = ConstraintKey(constraint_);
  std::unordered_map<std::string, int> value_index;
  for (size_t i = 0; i < graph_.entities().size(); ++i) {
    const EntityNode &e = graph_.entities()[i];
    if (e.node_type != constraint_.candidate_node_type) continue;
    int idx = static_cast<int>(i);
    typed_.push_back(idx);
    switch (constraint_.kind) {
      case ConstraintKind::kExactKey:
      case ConstraintKind::kHashedName:
        for (const std::string &v : ValuesUnder(e, key, extractor_.normalization)) {
          exact_[v].push_back(idx);
        }
        break;
      case ConstraintKind::kLevenshtein:
        for (const std::string &v : ValuesUnder(e, key, extractor_.normalization)) {
          auto [it, inserted] = value_index.emplace(v, static_cast<int>(values_.size()));
          if (inserted) {
            values_.push_back(DecodeUtf8(v));
            value_owners_.emplace_back();
          }
          value_owners_[it->second].push_back(idx);
        }
        break;
      case ConstraintKind::kTypeOnly:
        break;
    }
  }
  for (size_t v = 0; v < values_.size(); ++v) {
    by_length_[values_[v].size()].values.push_back(static_cast<int>(v));
    for (auto [key_bigram, count] : Bigrams(values_[v])) {
      bigrams_[key_bigram].emplace_back(static_cast<int>(v), count);
    }
  }
}

void CandidateGenerator::LevenshteinMatches(const std::u32string &query,
                                            std::vector<int> *out) const {
  const double d = constraint_.max_normalized_distance;
  const size_t lq = query.size();
  thread_local std::vector<int> shared;
  thread_local std::vector<int> touched;
  bool counted = false;
  auto count_shared = [&] {
    if (shared.size() < values_.size()) shared.resize(values_.size(), 0);
    for (auto [key_bigram, cq] : Bigrams(query)) {
      auto it = bigrams_.find(key_bigram);
      if (it == bigrams_.end()) continue;
      for (auto [v, cv] : it->second) {
        if (shared[v] == 0) touched.push_back(v);
        shared[v] += std::min(cq, cv);
      }
    }
    counted = true;
  };
  for (const auto &[lu, bucket] : by_length_) {
    const double longest = static_cast<double>(std::max(lq, lu));
    const size_t diff = lq > lu ? lq - lu : lu - lq;
    // Any alignment needs at least |lq - lu| edits.
    if (static_cast<double>(diff) > d * longest + 1e-9) continue;
    const long k = static_cast<long>(std::floor(d * longest + 1e-9));
    // Strings within k edits share at least max(len) - 1 - 2k bigrams.
    const long bound = static_cast<long>(std::max(lq, lu)) - 1 - 2 * k;
    if (bound > 0 && !counted) count_shared();
    for (int v : bucket.values) {
      if (bound > 0 && shared[v] < bound) continue;
      if (WithinDistance(Normalized(query, values_[v]), d)) {
        out->insert(out->end(), value_owners_[v].begin(), value_owners_[v].end());
      }
    }
  }
  for (int v : touched) shared[v] = 0;
  touched.clear();
}

std::vector<int> CandidateGenerator::Candidates(const EntityNode &node,
                                                int exclude) const {
  std::vector<int> out;
  switch (constraint_.kind) {
    case ConstraintKind::kTypeOnly:
      out = typed_;
      break;
    case ConstraintKind::kExactKey:
    case ConstraintKind::kHashedName:
      for (const std::string &v :
           ValuesUnder(node, ConstraintKey(constraint_), extractor_.normalization)) {
        auto it = exact_.find(v);
        if (it != exact_.end()) out.insert(out.end(), it->second.begin(), it->second.end());
      }
      break;
    case ConstraintKind::kLevenshtein:
      for (const std::string &v :
           ValuesUnder(node, ConstraintKey(constraint_), extractor_.normalization)) {
        LevenshteinMatches(DecodeUtf8(v), &out);
      }
      break;
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  if (exclude >= 0) {
    auto it = std::lower_bound(out.begin(), out.end(), exclude);
    if (it != out.end() && *it == exclude) out.erase(it);
  }
  return out;
}

std::vector<NodeId> CandidateSet(const NodeId &node_id, const FactGraph &g,
                                 const FactGraph &g_prime,
                                 const ConstraintSpec &constraint,
                                 const AttributeExtractorSpec &extractor) {
  const EntityNode &node = g.GetEntity(node_id);
  CandidateGenerator generator(g_prime, constraint, extractor);
  int exclude = &g == &g_prime ? g.FindEntity(node_id) : -1;
  std::vector<NodeId> out;
  for (int idx : generator.Candidates(node, exclude)) {
    out.push_back(g_prime.entity(idx).id);
  }
  return out;
}

}  // namespace heat
