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

#include "heat/ingest.h"

#include <fstream>
#include <set>
#include <sstream>

#include "heat/error.h"
#include "json.hpp"

namespace heat {

using json = nlohmann::json;

namespace {

Error ParseError(const std::string &source, size_t line, const std::string &what) {
  return Error(ErrorCode::kParse, source + ":" + std::to_string(line) + ": " + what);
}

std::string RequireString(const json &obj, const char *field,
                          const std::string &source, size_t line) {
  auto it = obj.find(field);
  if (it == obj.end() || !it->is_string()) {
    throw ParseError(source, line, std::string("missing string field '") + field + "'");
  }
  return it->get<std::string>();
}

AttributeMap ParseAttrs(const json &obj, const std::string &source, size_t line) {
  AttributeMap attrs;
  auto it = obj.find("attrs");
  if (it == obj.end() || it->is_null()) return attrs;
  if (!it->is_object()) throw ParseError(source, line, "'attrs' must be an object");
  for (const auto &[key, value] : it->items()) {
    std::vector<std::string> &values = attrs[key];
    if (value.is_string()) {
      values.push_back(value.get<std::string>());
    } else if (value.is_array()) {
      for (const json &v : value) {
        if (!v.is_string()) {
          throw ParseError(source, line, "attribute '" + key + "' values must be strings");
        }
        values.push_back(v.get<std::string>());
      }
    } else {
      throw ParseError(source, line,
                       "attribute '" + key + "' must be a string or list of strings");
    }
  }
  return attrs;
}

json AttrsToJson(const AttributeMap &attrs) {
  json out = json::object();
  for (const auto &[key, values] : attrs) out[key] = values;
  return out;
}

std::ifstream OpenForRead(const std::string &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot open '" + path + "' for reading");
  return in;
}

}  // namespace

std::string ReadFile(const std::string &path) {
  std::ifstream in = OpenForRead(path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

FactGraph ParseFactGraph(std::istream &in, const std::string &source_name) {
  RawGraph raw;
  std::string line;
  size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    json rec;
    try {
      rec = json::parse(line);
    } catch (const json::parse_error &e) {
      throw ParseError(source_name, line_no, std::string("malformed record: ") + e.what());
    }
    if (!rec.is_object()) throw ParseError(source_name, line_no, "record must be an object");
    const std::string kind = RequireString(rec, "kind", source_name, line_no);
    if (kind == "entity") {
      raw.entities.push_back({RequireString(rec, "id", source_name, line_no),
                              RequireString(rec, "type", source_name, line_no),
                              ParseAttrs(rec, source_name, line_no)});
    } else if (kind == "event") {
      raw.events.push_back({RequireString(rec, "id", source_name, line_no),
                            ParseAttrs(rec, source_name, line_no)});
    } else if (kind == "fact") {
      raw.facts.push_back({RequireString(rec, "event", source_name, line_no),
                           RequireString(rec, "predicate", source_name, line_no),
                           RequireString(rec, "entity", source_name, line_no)});
    } else {
      throw ParseError(source_name, line_no, "unknown record kind '" + kind + "'");
    }
  }
  try {
    return LoadValidate(std::move(raw));
  } catch (const Error &e) {
    throw Error(e.code(), source_name + ": " + e.what());
  }
}

FactGraph LoadFactGraph(const std::string &path) {
  std::ifstream in = OpenForRead(path);
  return ParseFactGraph(in, path);
}

void WriteFactGraph(const FactGraph &graph, std::ostream &out) {
  for (const EntityNode &e : graph.entities()) {
    json rec = {{"kind", "entity"}, {"id", e.id}, {"type", e.node_type},
                {"attrs", AttrsToJson(e.attributes)}};
    out << rec.dump() << '\n';
  }
  for (const EventHub &e : graph.events()) {
    json rec = {{"kind", "event"}, {"id", e.id}, {"attrs", AttrsToJson(e.attributes)}};
    out << rec.dump() << '\n';
  }
  for (const FactTriple &f : graph.facts()) {
    json rec = {{"kind", "fact"}, {"event", f.event}, {"predicate", f.predicate},
                {"entity", f.entity}};
    out << rec.dump() << '\n';
  }
}

void SaveFactGraph(const FactGraph &graph, const std::string &path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::kIo, "cannot open '" + path + "' for writing");
  WriteFactGraph(graph, out);
  if (!out) throw Error(ErrorCode::kIo, "failed writing '" + path + "'");
}

GroundTruth ParseGroundTruth(std::istream &in, const std::string &source_name) {
  GroundTruth truth;
  std::string line;
  size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    size_t tab = line.find('\t');
    if (tab == std::string::npos || line.find('\t', tab + 1) != std::string::npos) {
      throw ParseError(source_name, line_no, "expected 2 tab-separated columns");
    }
    NodeId post = line.substr(0, tab);
    NodeId pre = line.substr(tab + 1);
    if (post.empty() || pre.empty()) throw ParseError(source_name, line_no, "empty id");
    if (!truth.pairs.emplace(post, pre).second) {
      throw Error(ErrorCode::kDuplicate, source_name + ":" + std::to_string(line_no) +
                                             ": duplicate post id '" + post + "'");
    }
  }
  return truth;
}

GroundTruth LoadGroundTruth(const std::string &path) {
  std::ifstream in = OpenForRead(path);
  return ParseGroundTruth(in, path);
}

void WriteGroundTruth(const GroundTruth &truth, std::ostream &out) {
  for (const auto &[post, pre] : truth.pairs) out << post << '\t' << pre << '\n';
}

namespace {

class ConfigReader {
 public:
  explicit ConfigReader(std::string source) : source_(std::move(source)) {}

  [[noreturn]] void Fail(const std::string &field, const std::string &why) const {
    throw Error(ErrorCode::kConfig, source_ + ": " + where_ + "field '" + field + "' " + why);
  }

  void SetWhere(std::string where) { where_ = std::move(where); }

  void AllowOnly(const json &obj, const std::string &path,
                 std::initializer_list<const char *> allowed) const {
    std::set<std::string> ok(allowed.begin(), allowed.end());
    for (const auto &[key, value] : obj.items()) {
      if (!ok.count(key)) Fail(path + key, "is not recognized");
    }
  }

  const json &Object(const json &obj, const std::string &field) const {
    auto it = obj.find(field);
    if (it == obj.end() || !it->is_object()) Fail(field, "must be an object");
    return *it;
  }

  std::string String(const json &obj, const char *field, const std::string &path) const {
    auto it = obj.find(field);
    if (it == obj.end() || !it->is_string()) Fail(path + field, "must be a string");
    return it->get<std::string>();
  }

  double Number(const json &obj, const char *field, const std::string &path,
                std::optional<double> fallback) const {
    auto it = obj.find(field);
    if (it == obj.end()) {
      if (fallback) return *fallback;
      Fail(path + field, "is required");
    }
    if (!it->is_number()) Fail(path + field, "must be a number");
    return it->get<double>();
  }

  StageConfig Stage(const json &s) {
    if (!s.is_object()) Fail("stages[]", "must be an object");
    AllowOnly(s, "", {"name", "ambiguous_node_type", "constraint", "extractor",
                      "indicators", "prior", "tau"});
    StageConfig st;
    st.name = String(s, "name", "");
    SetWhere("stage '" + st.name + "': ");
    st.ambiguous_node_type = String(s, "ambiguous_node_type", "");
    st.tau = Number(s, "tau", "", std::nullopt);
    if (!(st.tau >= 0.0 && st.tau <= 1.0)) Fail("tau", "must lie in [0, 1]");

    const json &c = Object(s, "constraint");
    AllowOnly(c, "constraint.",
              {"variant", "key", "max_normalized_distance", "candidate_node_type"});
    const std::string variant = String(c, "variant", "constraint.");
    st.constraint.candidate_node_type = String(c, "candidate_node_type", "constraint.");
    if (variant == "exact_key") {
      st.constraint.kind = ConstraintKind::kExactKey;
      st.constraint.key = String(c, "key", "constraint.");
    } else if (variant == "hashed_name") {
      st.constraint.kind = ConstraintKind::kHashedName;
      st.constraint.key =
          c.contains("key") ? String(c, "key", "constraint.") : kDefaultHashedNameKey;
    } else if (variant == "levenshtein") {
      st.constraint.kind = ConstraintKind::kLevenshtein;
      st.constraint.key = String(c, "key", "constraint.");
      st.constraint.max_normalized_distance =
          Number(c, "max_normalized_distance", "constraint.", std::nullopt);
    } else if (variant == "type_only") {
      st.constraint.kind = ConstraintKind::kTypeOnly;
    } else {
      Fail("constraint.variant", "has unknown value '" + variant + "'");
    }

    const json &x = Object(s, "extractor");
    AllowOnly(x, "extractor.", {"keys", "normalization"});
    auto keys = x.find("keys");
    if (keys == x.end() || !keys->is_array() || keys->empty()) {
      Fail("extractor.keys", "must be a non-empty list of strings");
    }
    for (const json &k : *keys) {
      if (!k.is_string()) Fail("extractor.keys", "must be a non-empty list of strings");
      st.extractor.keys.push_back(k.get<std::string>());
    }
    if (x.contains("normalization")) {
      const std::string n = String(x, "normalization", "extractor.");
      if (n == "none") {
        st.extractor.normalization = Normalization::kNone;
      } else if (n == "case_fold") {
        st.extractor.normalization = Normalization::kCaseFold;
      } else if (n == "case_fold_trim") {
        st.extractor.normalization = Normalization::kCaseFoldTrim;
      } else {
        Fail("extractor.normalization", "has unknown value '" + n + "'");
      }
    }

    if (s.contains("indicators")) {
      const json &ind = Object(s, "indicators");
      AllowOnly(ind, "indicators.", {"node_types"});
      auto types = ind.find("node_types");
      if (types != ind.end()) {
        if (!types->is_array()) Fail("indicators.node_types", "must be a list of strings");
        for (const json &t : *types) {
          if (!t.is_string()) Fail("indicators.node_types", "must be a list of strings");
          st.indicators.node_types.insert(t.get<std::string>());
        }
      }
    }

    if (s.contains("prior")) {
      const json &p = Object(s, "prior");
      AllowOnly(p, "prior.", {"symmetric_alpha", "new_node_alpha", "overrides"});
      st.prior.symmetric_alpha = Number(p, "symmetric_alpha", "prior.", 1.0);
      st.prior.new_node_alpha = Number(p, "new_node_alpha", "prior.", 1.0);
      if (p.contains("overrides")) {
        const json &ov = p["overrides"];
        if (!ov.is_array()) Fail("prior.overrides", "must be a list");
        for (const json &o : ov) {
          if (!o.is_object()) Fail("prior.overrides", "entries must be objects");
          AllowOnly(o, "prior.overrides[].", {"ambiguous", "candidate", "alpha"});
          st.prior.overrides[{String(o, "ambiguous", "prior.overrides[]."),
                              String(o, "candidate", "prior.overrides[].")}] =
              Number(o, "alpha", "prior.overrides[].", std::nullopt);
        }
      }
    }
    try {
      ValidateStage(st);
    } catch (const Error &e) {
      throw Error(ErrorCode::kConfig, source_ + ": " + e.what());
    }
    SetWhere("");
    return st;
  }

 private:
  std::string source_;
  std::string where_;
};

const char *VariantName(ConstraintKind kind) {
  switch (kind) {
    case ConstraintKind::kExactKey: return "exact_key";
    case ConstraintKind::kHashedName: return "hashed_name";
    case ConstraintKind::kLevenshtein: return "levenshtein";
    case ConstraintKind::kTypeOnly: return "type_only";
  }
  return "";
}

const char *NormalizationName(Normalization n) {
  switch (n) {
    case Normalization::kNone: return "none";
    case Normalization::kCaseFold: return "case_fold";
    case Normalization::kCaseFoldTrim: return "case_fold_trim";
  }
  return "";
}

}  // namespace

std::vector<StageConfig> ParsePipelineConfig(const std::string &text,
                                             const std::string &source_name) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error &e) {
    throw Error(ErrorCode::kParse, source_name + ": malformed JSON: " + e.what());
  }
  ConfigReader reader(source_name);
  if (!root.is_object()) reader.Fail("<root>", "must be an object");
  reader.AllowOnly(root, "", {"stages"});
  auto stages = root.find("stages");
  if (stages == root.end() || !stages->is_array()) reader.Fail("stages", "must be a list");
  if (stages->empty()) reader.Fail("stages", "is empty; a pipeline needs at least one stage");
  std::vector<StageConfig> out;
  std::set<std::string> names;
  for (const json &s : *stages) {
    out.push_back(reader.Stage(s));
    if (!names.insert(out.back().name).second) {
      reader.Fail("stages[].name", "repeats '" + out.back().name + "'");
    }
  }
  return out;
}

std::vector<StageConfig> LoadPipelineConfig(const std::string &path) {
  return ParsePipelineConfig(ReadFile(path), path);
}

std::string PipelineConfigToJson(const std::vector<StageConfig> &stages) {
  json arr = json::array();
  for (const StageConfig &st : stages) {
    json c = {{"variant", VariantName(st.constraint.kind)},
              {"candidate_node_type", st.constraint.candidate_node_type}};
    if (st.constraint.kind != ConstraintKind::kTypeOnly) c["key"] = st.constraint.key;
    if (st.constraint.kind == ConstraintKind::kLevenshtein) {
      c["max_normalized_distance"] = st.constraint.max_normalized_distance;
    }
    json overrides = json::array();
    for (const auto &[pair, alpha] : st.prior.overrides) {
      overrides.push_back({{"ambiguous", pair.first}, {"candidate", pair.second}, {"alpha", alpha}});
    }
    arr.push_back({{"name", st.name},
                   {"ambiguous_node_type", st.ambiguous_node_type},
                   {"tau", st.tau},
                   {"constraint", c},
                   {"extractor", {{"keys", st.extractor.keys},
                                  {"normalization", NormalizationName(st.extractor.normalization)}}},
                   {"indicators", {{"node_types", st.indicators.node_types}}},
                   {"prior", {{"symmetric_alpha", st.prior.symmetric_alpha},
                              {"new_node_alpha", st.prior.new_node_alpha},
                              {"overrides", overrides}}}});
  }
  return json{{"stages", arr}}.dump(2) + "\n";
}

}  // namespace heat
