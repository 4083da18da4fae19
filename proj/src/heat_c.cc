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

#include "heat/heat_c.h"

#include <fstream>
#include <string>

#include "heat/alignment.h"
#include "heat/error.h"
#include "heat/evaluation.h"
#include "heat/ingest.h"
#include "heat/pipeline.h"

struct heat_graph {
  heat::FactGraph graph;
};
struct heat_pipeline {
  std::vector<heat::StageConfig> stages;
};
struct heat_matrix {
  heat::AlignmentMatrix matrix;
};
struct heat_unified {
  heat::UnifiedGraph unified;
};
struct heat_truth {
  heat::GroundTruth truth;
};
struct heat_merge_log {
  std::vector<heat::MergeRecord> records;
};
struct heat_report {
  heat::EvalReport report;
};
struct heat_synth_spec {
  heat::SynthSpec spec;
};

namespace {

thread_local std::string last_error;

heat_status ToStatus(heat::ErrorCode code) {
  switch (code) {
    case heat::ErrorCode::kNotFound: return HEAT_ERR_NOT_FOUND;
    case heat::ErrorCode::kIntegrity: return HEAT_ERR_INTEGRITY;
    case heat::ErrorCode::kDuplicate: return HEAT_ERR_DUPLICATE;
    case heat::ErrorCode::kDanglingHub: return HEAT_ERR_DANGLING_HUB;
    case heat::ErrorCode::kParse: return HEAT_ERR_PARSE;
    case heat::ErrorCode::kConfig: return HEAT_ERR_CONFIG;
    case heat::ErrorCode::kIo: return HEAT_ERR_IO;
    case heat::ErrorCode::kInvalidArgument: return HEAT_ERR_INVALID_ARGUMENT;
    case heat::ErrorCode::kInvariant: return HEAT_ERR_INVARIANT;
  }
  return HEAT_ERR_INTERNAL;
}

template <typename Fn>
heat_status Guard(Fn &&fn) {
  last_error.clear();
  try {
    fn();
    return HEAT_OK;
  } catch (const heat::Error &e) {
    last_error = e.what();
    return ToStatus(e.code());
  } catch (const std::bad_alloc &) {
    last_error = "out of memory";
  } catch (const std::exception &e) {
    last_error = e.what();
  } catch (...) {
    last_error = "unknown exception";
  }
  return HEAT_ERR_INTERNAL;
}

void Require(bool ok, const char *what) {
  if (!ok) throw heat::Error(heat::ErrorCode::kInvalidArgument, what);
}

std::ofstream OpenOut(const char *path) {
  Require(path != nullptr, "output path is NULL");
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw heat::Error(heat::ErrorCode::kIo,
                      std::string("cannot open '") + path + "' for writing");
  }
  return out;
}

void Finish(std::ofstream &out, const char *path) {
  out.flush();
  if (!out) {
    throw heat::Error(heat::ErrorCode::kIo, std::string("failed writing '") + path + "'");
  }
}

std::vector<double> Thresholds(const double *thresholds, size_t count) {
  if (thresholds == nullptr || count == 0) return heat::DefaultThresholds();
  return std::vector<double>(thresholds, thresholds + count);
}

}  // namespace

extern "C" {

const char *heat_version(void) { return "1.0.0"; }

const char *heat_status_name(heat_status status) {
  switch (status) {
    case HEAT_OK: return "ok";
    case HEAT_ERR_NOT_FOUND: return "not found";
    case HEAT_ERR_INTEGRITY: return "integrity error";
    case HEAT_ERR_DUPLICATE: return "duplicate";
    case HEAT_ERR_DANGLING_HUB: return "dangling hub";
    case HEAT_ERR_PARSE: return "parse error";
    case HEAT_ERR_CONFIG: return "config error";
    case HEAT_ERR_IO: return "i/o error";
    case HEAT_ERR_INVALID_ARGUMENT: return "invalid argument";
    case HEAT_ERR_INVARIANT: return "invariant failure";
    case HEAT_ERR_INTERNAL: return "internal error";
  }
  return "unknown status";
}

const char *heat_last_error(void) { return last_error.c_str(); }

heat_status heat_graph_load(const char *path, heat_graph **out) {
  return Guard([&] {
    Require(path != nullptr && out != nullptr, "NULL argument");
    *out = new heat_graph{heat::LoadFactGraph(path)};
  });
}

heat_status heat_graph_save(const heat_graph *graph, const char *path) {
  return Guard([&] {
    Require(graph != nullptr, "NULL graph");
    std::ofstream out = OpenOut(path);
    heat::WriteFactGraph(graph->graph, out);
    Finish(out, path);
  });
}

heat_status heat_graph_counts(const heat_graph *graph, size_t *entities,
                              size_t *events, size_t *facts) {
  return Guard([&] {
    Require(graph != nullptr, "NULL graph");
    if (entities) *entities = graph->graph.entities().size();
    if (events) *events = graph->graph.events().size();
    if (facts) *facts = graph->graph.facts().size();
  });
}

void heat_graph_free(heat_graph *graph) { delete graph; }

heat_status heat_pipeline_load(const char *path, heat_pipeline **out) {
  return Guard([&] {
    Require(path != nullptr && out != nullptr, "NULL argument");
    *out = new heat_pipeline{heat::LoadPipelineConfig(path)};
  });
}

size_t heat_pipeline_stage_count(const heat_pipeline *pipeline) {
  return pipeline ? pipeline->stages.size() : 0;
}

const char *heat_pipeline_stage_name(const heat_pipeline *pipeline, size_t index) {
  if (!pipeline || index >= pipeline->stages.size()) return nullptr;
  return pipeline->stages[index].name.c_str();
}

heat_status heat_pipeline_stage_tau(const heat_pipeline *pipeline,
                                    const char *stage_name, double *tau) {
  return Guard([&] {
    Require(pipeline && stage_name && tau, "NULL argument");
    for (const heat::StageConfig &s : pipeline->stages) {
      if (s.name == stage_name) {
        *tau = s.tau;
        return;
      }
    }
    throw heat::Error(heat::ErrorCode::kNotFound,
                      std::string("unknown stage '") + stage_name + "'");
  });
}

void heat_pipeline_free(heat_pipeline *pipeline) { delete pipeline; }

heat_status heat_align(const heat_graph *graph_a, const heat_graph *graph_b,
                       const heat_pipeline *pipeline, const char *stage_name,
                       heat_matrix **out) {
  return Guard([&] {
    Require(graph_a && graph_b && pipeline && stage_name && out, "NULL argument");
    const heat::StageConfig *stage = nullptr;
    std::string available;
    for (const heat::StageConfig &s : pipeline->stages) {
      if (s.name == stage_name) stage = &s;
      available += (available.empty() ? "" : ", ") + s.name;
    }
    if (stage == nullptr) {
      throw heat::Error(heat::ErrorCode::kConfig, std::string("unknown stage '") +
                                                      stage_name +
                                                      "'; available stages: " + available);
    }
    if (!graph_a->graph.HasNodeType(stage->ambiguous_node_type) &&
        !graph_b->graph.HasNodeType(stage->ambiguous_node_type)) {
      throw heat::Error(heat::ErrorCode::kConfig,
                        "stage '" + stage->name + "': node type '" +
                            stage->ambiguous_node_type + "' is absent from both graphs");
    }
    const heat::FactGraph &reference =
        graph_a == graph_b ? graph_a->graph : graph_b->graph;
    *out = new heat_matrix{heat::Eat(graph_a->graph, reference, *stage)};
  });
}

heat_status heat_matrix_save(const heat_matrix *matrix, const char *path) {
  return Guard([&] {
    Require(matrix != nullptr, "NULL matrix");
    std::ofstream out = OpenOut(path);
    heat::WriteMatrixTsv(matrix->matrix, out);
    Finish(out, path);
  });
}

heat_status heat_matrix_load(const char *path, heat_matrix **out) {
  return Guard([&] {
    Require(path != nullptr && out != nullptr, "NULL argument");
    std::ifstream in(path, std::ios::binary);
    if (!in) {
      throw heat::Error(heat::ErrorCode::kIo, std::string("cannot open '") + path + "'");
    }
    try {
      *out = new heat_matrix{heat::ReadMatrixTsv(in)};
    } catch (const heat::Error &e) {
      throw heat::Error(e.code(), std::string(path) + ": " + e.what());
    }
  });
}

heat_status heat_matrix_summarize(const heat_matrix *matrix, double tau,
                                  heat_matrix_summary *out) {
  return Guard([&] {
    Require(matrix != nullptr && out != nullptr, "NULL argument");
    *out = heat_matrix_summary{};
    for (const heat::AlignmentRow &row : matrix->matrix.rows) {
      ++out->rows;
      if (row.unalignable) ++out->unalignable_rows;
      for (const heat::CandidateScore &s : row.scores) {
        if (!s.is_new()) ++out->candidates;
      }
      auto choice = heat::BestRealCandidate(row);
      if (choice && choice->probability > tau) ++out->merge_candidates;
    }
  });
}

void heat_matrix_free(heat_matrix *matrix) { delete matrix; }

heat_status heat_run(const heat_graph *graph_a, const heat_graph *graph_b,
                     const heat_pipeline *pipeline, heat_unified **out) {
  return Guard([&] {
    Require(graph_a && graph_b && pipeline && out, "NULL argument");
    const heat::FactGraph &reference =
        graph_a == graph_b ? graph_a->graph : graph_b->graph;
    heat::HeatResult result = heat::Heat(graph_a->graph, reference, pipeline->stages);
    *out = new heat_unified{std::move(result.unified)};
  });
}

heat_status heat_unified_save_graph(const heat_unified *unified, const char *path) {
  return Guard([&] {
    Require(unified != nullptr, "NULL unified graph");
    std::ofstream out = OpenOut(path);
    heat::WriteFactGraph(unified->unified.graph, out);
    Finish(out, path);
  });
}

heat_status heat_unified_save_log(const heat_unified *unified, const char *path) {
  return Guard([&] {
    Require(unified != nullptr, "NULL unified graph");
    std::ofstream out = OpenOut(path);
    heat::WriteMergeLogTsv(unified->unified.merge_log, out);
    Finish(out, path);
  });
}

size_t heat_unified_merge_count(const heat_unified *unified) {
  return unified ? unified->unified.merge_log.size() : 0;
}

heat_status heat_unified_counts(const heat_unified *unified, size_t *entities,
                                size_t *events, size_t *facts) {
  return Guard([&] {
    Require(unified != nullptr, "NULL unified graph");
    const heat::FactGraph &g = unified->unified.graph;
    if (entities) *entities = g.entities().size();
    if (events) *events = g.events().size();
    if (facts) *facts = g.facts().size();
  });
}

void heat_unified_free(heat_unified *unified) { delete unified; }

heat_status heat_truth_load(const char *path, heat_truth **out) {
  return Guard([&] {
    Require(path != nullptr && out != nullptr, "NULL argument");
    *out = new heat_truth{heat::LoadGroundTruth(path)};
  });
}

size_t heat_truth_size(const heat_truth *truth) {
  return truth ? truth->truth.pairs.size() : 0;
}

void heat_truth_free(heat_truth *truth) { delete truth; }

heat_status heat_merge_log_load(const char *path, heat_merge_log **out) {
  return Guard([&] {
    Require(path != nullptr && out != nullptr, "NULL argument");
    std::ifstream in(path, std::ios::binary);
    if (!in) {
      throw heat::Error(heat::ErrorCode::kIo, std::string("cannot open '") + path + "'");
    }
    *out = new heat_merge_log{heat::ReadMergeLogTsv(in)};
  });
}

void heat_merge_log_free(heat_merge_log *log) { delete log; }

heat_status heat_eval_matrix(const heat_matrix *matrix, const heat_truth *truth,
                             const double *thresholds, size_t count,
                             heat_report **out) {
  return Guard([&] {
    Require(matrix && truth && out, "NULL argument");
    *out = new heat_report{
        heat::PrecisionRecall(matrix->matrix, truth->truth, Thresholds(thresholds, count))};
  });
}

heat_status heat_eval_log(const heat_merge_log *log, const heat_truth *truth,
                          const double *thresholds, size_t count,
                          heat_report **out) {
  return Guard([&] {
    Require(log && truth && out, "NULL argument");
    *out = new heat_report{heat::PrecisionRecallFromLog(
        log->records, truth->truth, Thresholds(thresholds, count))};
  });
}

size_t heat_report_size(const heat_report *report) {
  return report ? report->report.points.size() : 0;
}

heat_status heat_report_point(const heat_report *report, size_t index,
                              heat_eval_point *out) {
  return Guard([&] {
    Require(report && out, "NULL argument");
    Require(index < report->report.points.size(), "report index out of range");
    const heat::EvalPoint &p = report->report.points[index];
    *out = heat_eval_point{p.threshold, p.precision, p.recall, p.n_predicted,
                           p.n_correct, p.precision_defined ? 1 : 0};
  });
}

heat_status heat_report_save_csv(const heat_report *report, const char *path) {
  return Guard([&] {
    Require(report != nullptr, "NULL report");
    std::ofstream out = OpenOut(path);
    heat::WriteReportCsv(report->report, out);
    Finish(out, path);
  });
}

void heat_report_free(heat_report *report) { delete report; }

heat_status heat_synth_spec_load(const char *path, heat_synth_spec **out) {
  return Guard([&] {
    Require(path != nullptr && out != nullptr, "NULL argument");
    *out = new heat_synth_spec{heat::ParseSynthSpec(heat::ReadFile(path), path)};
  });
}

heat_status heat_synth_spec_set_seed(heat_synth_spec *spec, uint64_t seed) {
  return Guard([&] {
    Require(spec != nullptr, "NULL spec");
    spec->spec.seed = seed;
  });
}

heat_status heat_synth_generate(const heat_synth_spec *spec, const char *out_prefix) {
  return Guard([&] {
    Require(spec && out_prefix, "NULL argument");
    heat::SyntheticDataset data = heat::GenerateSynthetic(spec->spec);
    const std::string prefix = out_prefix;
    heat::SaveFactGraph(data.pre, prefix + "_pre.jsonl");
    heat::SaveFactGraph(data.post, prefix + "_post.jsonl");
    const std::string truth_path = prefix + "_truth.tsv";
    std::ofstream out = OpenOut(truth_path.c_str());
    heat::WriteGroundTruth(data.truth, out);
    Finish(out, truth_path.c_str());
  });
}

void heat_synth_spec_free(heat_synth_spec *spec) { delete spec; }

}  // extern "C"
