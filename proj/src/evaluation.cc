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

#include "heat/evaluation.h"

#include <algorithm>
#include <cstdio>
#include <map>
#include <ostream>
#include <random>
#include <set>
#include <unordered_set>

#include "heat/error.h"
#include "json.hpp"

namespace heat {

double EvalPoint::F1() const {
  if (precision + recall <= 0.0) return 0.0;
  return 2.0 * precision * recall / (precision + recall);
}

std::vector<double> DefaultThresholds() {
  std::vector<double> out;
  for (int i = 1; i <= 19; ++i) out.push_back(i / 20.0);
  return out;
}

namespace {

void CheckEvalInputs(const GroundTruth &truth, const std::vector<double> &thresholds) {
  if (truth.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "ground truth is empty; recall is undefined");
  }
  for (size_t i = 1; i < thresholds.size(); ++i) {
    if (!(thresholds[i] > thresholds[i - 1])) {
      throw Error(ErrorCode::kInvalidArgument, "thresholds must be strictly increasing");
    }
  }
}

struct Prediction {
  NodeId target;
  double probability;
};

EvalReport Score(const std::map<NodeId, Prediction> &predictions,
                 const GroundTruth &truth, const std::vector<double> &thresholds) {
  EvalReport report;
  for (double tau : thresholds) {
    EvalPoint pt;
    pt.threshold = tau;
    for (const auto &[post, pred] : predictions) {
      if (!(pred.probability > tau)) continue;
      ++pt.n_predicted;
      auto it = truth.pairs.find(post);
      if (it != truth.pairs.end() && it->second == pred.target) ++pt.n_correct;
    }
    pt.precision_defined = pt.n_predicted > 0;
    pt.precision = pt.precision_defined
                       ? static_cast<double>(pt.n_correct) / static_cast<double>(pt.n_predicted)
                       : 1.0;
    pt.recall = static_cast<double>(pt.n_correct) / static_cast<double>(truth.pairs.size());
    report.points.push_back(pt);
  }
  return report;
}

}  // namespace

EvalReport PrecisionRecall(const AlignmentMatrix &matrix, const GroundTruth &truth,
                           const std::vector<double> &thresholds) {
  CheckEvalInputs(truth, thresholds);
  std::map<NodeId, Prediction> predictions;
  for (const AlignmentRow &row : matrix.rows) {
    if (!truth.pairs.count(row.ambiguous)) continue;
    if (auto choice = BestRealCandidate(row)) {
      predictions[row.ambiguous] = {choice->target, choice->probability};
    }
  }
  return Score(predictions, truth, thresholds);
}

EvalReport PrecisionRecallFromLog(const std::vector<MergeRecord> &log,
                                  const GroundTruth &truth,
                                  const std::vector<double> &thresholds) {
  CheckEvalInputs(truth, thresholds);
  std::map<NodeId, Prediction> predictions;
  auto offer = [&](const NodeId &post, const NodeId &other, double p) {
    auto [it, inserted] = predictions.emplace(post, Prediction{other, p});
    if (inserted) return;
    if (p > it->second.probability ||
        (p == it->second.probability && other < it->second.target)) {
      it->second = {other, p};
    }
  };
  for (const MergeRecord &r : log) {
    if (truth.pairs.count(r.source_id)) {
      offer(r.source_id, r.target_id, r.probability);
    } else if (truth.pairs.count(r.target_id)) {
      offer(r.target_id, r.source_id, r.probability);
    }
  }
  return Score(predictions, truth, thresholds);
}

void WriteReportCsv(const EvalReport &report, std::ostream &out) {
  out << "threshold,precision,recall,n_predicted,n_correct\n";
  char buf[160];
  for (const EvalPoint &p : report.points) {
    std::snprintf(buf, sizeof(buf), "%.6g,%.17g,%.17g,%lld,%lld\n", p.threshold,
                  p.precision, p.recall, static_cast<long long>(p.n_predicted),
                  static_cast<long long>(p.n_correct));
    out << buf;
  }
}

void SynthSpec::Validate() const {
  auto fail = [](const std::string &what) {
    throw Error(ErrorCode::kConfig, "synthetic spec: " + what);
  };
  if (n_true_entities <= 0) fail("n_true_entities must be positive");
  for (double r : {duplicate_rate, attribute_noise_rate, name_collision_rate}) {
    if (!(r >= 0.0 && r <= 1.0)) fail("rates must lie in [0, 1]");
  }
  if (pre_events_min < 1 || pre_events_max < pre_events_min) {
    fail("pre events range must satisfy 1 <= min <= max");
  }
  if (post_events_min < 1 || post_events_max < post_events_min) {
    fail("post events range must satisfy 1 <= min <= max");
  }
  if (n_organizations < 0 || vocabulary_size < 0) fail("sizes must be >= 0");
  if (community_size < 1) fail("community_size must be >= 1");
  if (keywords_per_entity < 1) fail("keywords_per_entity must be >= 1");
  if (max_coauthors < 0) fail("max_coauthors must be >= 0");
}

SynthSpec ParseSynthSpec(const std::string &json_text, const std::string &source_name) {
  using json = nlohmann::json;
  json root;
  try {
    root = json::parse(json_text);
  } catch (const json::parse_error &e) {
    throw Error(ErrorCode::kParse, source_name + ": malformed JSON: " + e.what());
  }
  if (!root.is_object()) throw Error(ErrorCode::kConfig, source_name + ": must be an object");
  SynthSpec s;
  const std::map<std::string, int *> ints = {
      {"n_true_entities", &s.n_true_entities}, {"pre_events_min", &s.pre_events_min},
      {"pre_events_max", &s.pre_events_max},   {"post_events_min", &s.post_events_min},
      {"post_events_max", &s.post_events_max}, {"n_organizations", &s.n_organizations},
      {"vocabulary_size", &s.vocabulary_size}, {"community_size", &s.community_size},
      {"keywords_per_entity", &s.keywords_per_entity}, {"max_coauthors", &s.max_coauthors}};
  const std::map<std::string, double *> reals = {
      {"duplicate_rate", &s.duplicate_rate},
      {"attribute_noise_rate", &s.attribute_noise_rate},
      {"name_collision_rate", &s.name_collision_rate}};
  for (const auto &[key, value] : root.items()) {
    if (auto it = ints.find(key); it != ints.end()) {
      if (!value.is_number_integer()) {
        throw Error(ErrorCode::kConfig, source_name + ": field '" + key + "' must be an integer");
      }
      *it->second = value.get<int>();
    } else if (auto rt = reals.find(key); rt != reals.end()) {
      if (!value.is_number()) {
        throw Error(ErrorCode::kConfig, source_name + ": field '" + key + "' must be a number");
      }
      *rt->second = value.get<double>();
    } else if (key == "seed") {
      if (!value.is_number_unsigned()) {
        throw Error(ErrorCode::kConfig, source_name + ": field 'seed' must be a non-negative integer");
      }
      s.seed = value.get<uint64_t>();
    } else {
      throw Error(ErrorCode::kConfig, source_name + ": field '" + key + "' is not recognized");
    }
  }
  try {
    s.Validate();
  } catch (const Error &e) {
    throw Error(e.code(), source_name + ": " + e.what());
  }
  return s;
}

std::string SynthSpecToJson(const SynthSpec &s) {
  nlohmann::json j = {{"n_true_entities", s.n_true_entities},
                      {"duplicate_rate", s.duplicate_rate},
                      {"pre_events_min", s.pre_events_min},
                      {"pre_events_max", s.pre_events_max},
                      {"post_events_min", s.post_events_min},
                      {"post_events_max", s.post_events_max},
                      {"attribute_noise_rate", s.attribute_noise_rate},
                      {"name_collision_rate", s.name_collision_rate},
                      {"seed", s.seed},
                      {"n_organizations", s.n_organizations},
                      {"vocabulary_size", s.vocabulary_size},
                      {"community_size", s.community_size},
                      {"keywords_per_entity", s.keywords_per_entity},
                      {"max_coauthors", s.max_coauthors}};
  return j.dump(2) + "\n";
}

namespace {

// mt19937_64's output sequence is fixed by the standard; the distributions
// are not, so sampling is done by hand to keep files identical everywhere.
class Rng {
 public:
  explicit Rng(uint64_t seed) : engine_(seed) {}

  uint64_t Below(uint64_t n) {
    const uint64_t limit = UINT64_MAX - UINT64_MAX % n;
    uint64_t x;
    do {
      x = engine_();
    } while (x >= limit);
    return x % n;
  }
  int Between(int lo, int hi) { return lo + static_cast<int>(Below(hi - lo + 1)); }
  double Unit() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  bool Chance(double p) { return Unit() < p; }

 private:
  std::mt19937_64 engine_;
};

std::string RandomWord(Rng &rng, int min_len, int max_len) {
  static const char *kConsonants = "bcdfghjklmnprstvwz";
  static const char *kVowels = "aeiou";
  const int len = rng.Between(min_len, max_len);
  std::string w;
  for (int i = 0; i < len; ++i) {
    w.push_back(i % 2 == 0 ? kConsonants[rng.Below(18)] : kVowels[rng.Below(5)]);
  }
  return w;
}

std::string Perturb(const std::string &word, Rng &rng) {
  std::string w = word;
  const int edits = w.size() >= 10 ? 2 : 1;
  for (int e = 0; e < edits; ++e) {
    const char c = static_cast<char>('a' + rng.Below(26));
    const size_t pos = rng.Below(w.size());
    switch (rng.Below(3)) {
      case 0:
        w[pos] = w[pos] == c ? static_cast<char>('a' + (c - 'a' + 1) % 26) : c;
        break;
      case 1:
        w.insert(w.begin() + pos, c);
        break;
      default:
        w.erase(w.begin() + pos);
        break;
    }
  }
  if (w == word) w.push_back('x');
  return w;
}

std::string NameHash(const std::string &first, const std::string &last) {
  uint64_t h = 1469598103934665603ULL;
  const std::string key = std::string(1, first[0]) + "|" + last;
  for (unsigned char c : key) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  char buf[24];
  std::snprintf(buf, sizeof(buf), "h%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::string Id(char prefix, size_t n, int width = 6) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%c%0*zu", prefix, width, n);
  return buf;
}

std::string Capitalized(std::string s) {
  if (!s.empty()) s[0] = static_cast<char>(s[0] - 'a' + 'A');
  return s;
}

struct Person {
  std::string first;
  std::string last;
  std::string hash;
  int community = 0;
  int org = 0;
  std::vector<int> keywords;  // [0] is the signature keyword
};

struct EventDraft {
  std::vector<int> authors;
  std::vector<int> keywords;  // vocabulary indices, or -1 - common index
};

std::vector<EventDraft> DraftEvents(const std::vector<Person> &people,
                                    const std::vector<std::vector<int>> &members,
                                    int events_min, int events_max,
                                    const SynthSpec &spec, int n_common, Rng &rng) {
  std::vector<EventDraft> out;
  for (size_t p = 0; p < people.size(); ++p) {
    const int n_events = rng.Between(events_min, events_max);
    const std::vector<int> &group = members[people[p].community];
    for (int e = 0; e < n_events; ++e) {
      EventDraft ev;
      ev.authors.push_back(static_cast<int>(p));
      const int coauthors = rng.Between(0, spec.max_coauthors);
      for (int c = 0; c < coauthors && group.size() > 1; ++c) {
        int other = group[rng.Below(group.size())];
        if (std::find(ev.authors.begin(), ev.authors.end(), other) == ev.authors.end()) {
          ev.authors.push_back(other);
        }
      }
      ev.keywords.push_back(people[p].keywords[0]);
      const int extra = rng.Between(0, 2);
      for (int k = 0; k < extra; ++k) {
        const Person &a = people[ev.authors[rng.Below(ev.authors.size())]];
        int kw = a.keywords[rng.Below(a.keywords.size())];
        if (std::find(ev.keywords.begin(), ev.keywords.end(), kw) == ev.keywords.end()) {
          ev.keywords.push_back(kw);
        }
      }
      if (n_common > 0 && rng.Chance(0.2)) {
        ev.keywords.push_back(-1 - static_cast<int>(rng.Below(n_common)));
      }
      out.push_back(std::move(ev));
    }
  }
  return out;
}

}  // namespace

SyntheticDataset GenerateSynthetic(const SynthSpec &spec) {
  spec.Validate();
  Rng rng(spec.seed);
  const int n = spec.n_true_entities;
  const int n_orgs = spec.n_organizations > 0 ? spec.n_organizations : std::max(1, n / 25);
  const int n_vocab = spec.vocabulary_size > 0 ? spec.vocabulary_size : std::max(8, n);
  const int n_comm = std::max(1, n / spec.community_size);
  const int n_common = std::max(1, n_vocab / 100);

  // Vocabulary: community words followed by a small pool of common words.
  std::vector<std::string> words;
  std::unordered_set<std::string> seen;
  while (static_cast<int>(words.size()) < n_vocab + n_common) {
    std::string w = RandomWord(rng, 8, 12);
    if (seen.insert(w).second) words.push_back(std::move(w));
  }
  auto word_index = [&](int kw) { return kw >= 0 ? kw : n_vocab + (-1 - kw); };

  std::vector<std::string> org_names;
  for (int o = 0; o < n_orgs; ++o) {
    org_names.push_back(Capitalized(RandomWord(rng, 5, 9)) + " Institute " + std::to_string(o));
  }

  std::vector<Person> people(n);
  std::vector<std::vector<int>> members(n_comm);
  std::unordered_set<std::string> last_names;
  const int slice = std::max(spec.keywords_per_entity, n_vocab / n_comm);
  for (int p = 0; p < n; ++p) {
    Person &person = people[p];
    person.community = p % n_comm;
    person.org = person.community % n_orgs;
    person.first = Capitalized(RandomWord(rng, 4, 7));
    do {
      person.last = Capitalized(RandomWord(rng, 6, 10));
    } while (!last_names.insert(person.last).second);
    const int base = (person.community * slice) % n_vocab;
    while (static_cast<int>(person.keywords.size()) < spec.keywords_per_entity) {
      int kw = (base + static_cast<int>(rng.Below(slice))) % n_vocab;
      if (std::find(person.keywords.begin(), person.keywords.end(), kw) ==
          person.keywords.end()) {
        person.keywords.push_back(kw);
      }
      if (slice < spec.keywords_per_entity) break;
    }
    members[person.community].push_back(p);
  }
  // Name collisions: borrow first initial and last name of a person from
  // another community.
  for (int p = 1; p < n; ++p) {
    if (!rng.Chance(spec.name_collision_rate)) continue;
    const Person &other = people[rng.Below(p)];
    if (other.community == people[p].community) continue;
    people[p].first = std::string(1, other.first[0]) + people[p].first.substr(1);
    people[p].last = other.last;
  }
  for (Person &person : people) person.hash = NameHash(person.first, person.last);

  const std::vector<EventDraft> pre_events = DraftEvents(
      people, members, spec.pre_events_min, spec.pre_events_max, spec, n_common, rng);
  const std::vector<EventDraft> post_events = DraftEvents(
      people, members, spec.post_events_min, spec.post_events_max, spec, n_common, rng);

  // Post-graph identities: a random numbering, and optional duplicates.
  std::vector<size_t> order(n);
  for (int p = 0; p < n; ++p) order[p] = p;
  for (size_t i = order.size(); i > 1; --i) std::swap(order[i - 1], order[rng.Below(i)]);
  std::vector<std::vector<std::string>> post_ids(n);
  size_t next_post = 0;
  for (int p = 0; p < n; ++p) post_ids[order[p]].push_back(Id('A', next_post++));
  for (int p = 0; p < n; ++p) {
    if (rng.Chance(spec.duplicate_rate)) post_ids[p].push_back(Id('A', next_post++));
  }

  // Keyword nodes replaced by a perturbed variant in the post graph.
  std::vector<std::string> variant(words.size());
  for (size_t w = 0; w < words.size(); ++w) {
    if (rng.Chance(spec.attribute_noise_rate)) variant[w] = Perturb(words[w], rng);
  }

  auto text_id = [&](int w, bool noisy) {
    return Id('Q', static_cast<size_t>(w)) + (noisy ? "v" : "");
  };

  SyntheticDataset out;
  {
    RawGraph raw;
    std::set<int> used_people, used_orgs, used_words;
    for (size_t e = 0; e < pre_events.size(); ++e) {
      const std::string eid = "pre:" + Id('E', e, 7);
      raw.events.push_back({eid, {{"year", {"2018"}}}});
      std::set<int> orgs;
      for (int a : pre_events[e].authors) {
        raw.facts.push_back({eid, "author", Id('P', a)});
        used_people.insert(a);
        orgs.insert(people[a].org);
      }
      for (int o : orgs) {
        raw.facts.push_back({eid, "affiliation", Id('O', o, 4)});
        used_orgs.insert(o);
      }
      for (int kw : pre_events[e].keywords) {
        const int w = word_index(kw);
        raw.facts.push_back({eid, "keyword", text_id(w, false)});
        used_words.insert(w);
      }
    }
    for (int p : used_people) {
      raw.entities.push_back({Id('P', p), "person",
                              {{"full_name", {people[p].first + " " + people[p].last}},
                               {"name_hash", {people[p].hash}}}});
    }
    for (int o : used_orgs) {
      raw.entities.push_back({Id('O', o, 4), "organization", {{"name", {org_names[o]}}}});
    }
    for (int w : used_words) {
      raw.entities.push_back({text_id(w, false), "text", {{"text", {words[w]}}}});
    }
    out.pre = LoadValidate(std::move(raw));
  }
  {
    RawGraph raw;
    std::set<std::string> used_people;
    std::set<int> used_orgs, used_words;
    std::vector<size_t> lead_count(n, 0);
    for (size_t e = 0; e < post_events.size(); ++e) {
      const std::string eid = "post:" + Id('E', e, 7);
      raw.events.push_back({eid, {{"year", {"2019"}}}});
      std::set<int> orgs;
      for (size_t i = 0; i < post_events[e].authors.size(); ++i) {
        const int a = post_events[e].authors[i];
        const auto &ids = post_ids[a];
        // Duplicated people split their events between the two nodes.
        const std::string &pid =
            ids.size() == 1 ? ids[0]
                            : (i == 0 ? ids[lead_count[a]++ % ids.size()] : ids[rng.Below(ids.size())]);
        raw.facts.push_back({eid, "author", pid});
        used_people.insert(pid);
        orgs.insert(people[a].org);
        if (!out.truth.pairs.count(pid)) out.truth.pairs.emplace(pid, Id('P', a));
      }
      for (int o : orgs) {
        raw.facts.push_back({eid, "affiliation", Id('O', o, 4)});
        used_orgs.insert(o);
      }
      for (int kw : post_events[e].keywords) {
        const int w = word_index(kw);
        raw.facts.push_back({eid, "keyword", text_id(w, !variant[w].empty())});
        used_words.insert(w);
      }
    }
    std::map<std::string, int> person_of;
    for (int p = 0; p < n; ++p) {
      for (const std::string &id : post_ids[p]) person_of[id] = p;
    }
    for (const std::string &pid : used_people) {
      raw.entities.push_back({pid, "person", {{"name_hash", {people[person_of[pid]].hash}}}});
    }
    for (int o : used_orgs) {
      raw.entities.push_back({Id('O', o, 4), "organization", {{"name", {org_names[o]}}}});
    }
    for (int w : used_words) {
      const bool noisy = !variant[w].empty();
      raw.entities.push_back({text_id(w, noisy), "text", {{"text", {noisy ? variant[w] : words[w]}}}});
    }
    out.post = LoadValidate(std::move(raw));
  }
  return out;
}

StageConfig SyntheticTextStage() {
  StageConfig s;
  s.name = "text";
  s.ambiguous_node_type = "text";
  s.constraint.kind = ConstraintKind::kLevenshtein;
  s.constraint.key = "text";
  s.constraint.max_normalized_distance = 0.3;
  s.constraint.candidate_node_type = "text";
  s.extractor.keys = {"name_hash", "name", "text"};
  s.extractor.normalization = Normalization::kCaseFold;
  s.tau = 0.7;
  return s;
}

StageConfig SyntheticPersonStage() {
  StageConfig s;
  s.name = "person";
  s.ambiguous_node_type = "person";
  s.constraint.kind = ConstraintKind::kHashedName;
  s.constraint.key = kDefaultHashedNameKey;
  s.constraint.candidate_node_type = "person";
  s.extractor.keys = {"name_hash", "name", "text"};
  s.extractor.normalization = Normalization::kCaseFold;
  s.indicators.node_types = {"organization"};
  s.tau = 0.7;
  return s;
}

}  // namespace heat
