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

// heat: command-line front end over the C API.
//
//   heat align --graph-a A --graph-b B --config C --stage S --out M.tsv
//   heat heat  --graph-a A --graph-b B --config C --out-graph U --out-log L
//   heat eval  (--matrix M | --log L) --truth T [--thresholds 0.5,0.7] --out R
//   heat synth --spec S [--seed N] --out-prefix P
//
// Exit codes: 0 ok, 1 usage, 2 data or config error, 3 internal failure.

#include <cstdio>
#include <filesystem>
#include <memory>
#include <string>
#include <system_error>
#include <vector>

#include "CLI11.hpp"
#include "heat/heat_c.h"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitData = 2;
constexpr int kExitInternal = 3;

// Thrown after a failed library call; carries the process exit code.
struct Failure {
  int exit_code;
};

int ExitCodeFor(heat_status s) {
  switch (s) {
    case HEAT_OK:
      return kExitOk;
    case HEAT_ERR_INVARIANT:
    case HEAT_ERR_INTERNAL:
      return kExitInternal;
    default:
      return kExitData;
  }
}

void Check(heat_status s) {
  if (s == HEAT_OK) return;
  std::fprintf(stderr, "heat: error [%s]: %s\n", heat_status_name(s),
               heat_last_error());
  throw Failure{ExitCodeFor(s)};
}

[[noreturn]] void IoError(const std::string& msg) {
  std::fprintf(stderr, "heat: error [%s]: %s\n",
               heat_status_name(HEAT_ERR_IO), msg.c_str());
  throw Failure{kExitData};
}

template <typename T, void (*F)(T*)>
struct Deleter {
  void operator()(T* p) const { F(p); }
};
template <typename T, void (*F)(T*)>
using Handle = std::unique_ptr<T, Deleter<T, F>>;

using Graph = Handle<heat_graph, heat_graph_free>;
using Pipeline = Handle<heat_pipeline, heat_pipeline_free>;
using Matrix = Handle<heat_matrix, heat_matrix_free>;
using Unified = Handle<heat_unified, heat_unified_free>;
using Truth = Handle<heat_truth, heat_truth_free>;
using MergeLog = Handle<heat_merge_log, heat_merge_log_free>;
using Report = Handle<heat_report, heat_report_free>;
using SynthSpec = Handle<heat_synth_spec, heat_synth_spec_free>;

Graph LoadGraph(const std::string& path) {
  heat_graph* g = nullptr;
  Check(heat_graph_load(path.c_str(), &g));
  return Graph(g);
}

Pipeline LoadPipeline(const std::string& path) {
  heat_pipeline* p = nullptr;
  Check(heat_pipeline_load(path.c_str(), &p));
  return Pipeline(p);
}

std::filesystem::path Canonical(const std::string& path) {
  std::error_code ec;
  auto p = std::filesystem::weakly_canonical(path, ec);
  return ec ? std::filesystem::path(path).lexically_normal() : p;
}

// Rejects an output that aliases another output or any input.
void CheckOutputs(const std::vector<std::string>& inputs,
                  const std::vector<std::string>& outputs) {
  for (size_t i = 0; i < outputs.size(); ++i) {
    auto out = Canonical(outputs[i]);
    for (size_t j = 0; j < i; ++j) {
      if (out == Canonical(outputs[j])) {
        IoError("conflicting output paths: '" + outputs[j] + "' and '" +
                outputs[i] + "'");
      }
    }
    for (const auto& in : inputs) {
      if (out == Canonical(in)) {
        IoError("output path '" + outputs[i] + "' would overwrite input '" +
                in + "'");
      }
    }
  }
}

struct AlignArgs {
  std::string graph_a, graph_b, config, stage, out;
};

int RunAlign(const AlignArgs& a) {
  CheckOutputs({a.graph_a, a.graph_b, a.config}, {a.out});
  Graph ga = LoadGraph(a.graph_a);
  Graph gb = LoadGraph(a.graph_b);
  Pipeline pipeline = LoadPipeline(a.config);
  heat_matrix* raw = nullptr;
  Check(heat_align(ga.get(), gb.get(), pipeline.get(), a.stage.c_str(), &raw));
  Matrix m(raw);
  Check(heat_matrix_save(m.get(), a.out.c_str()));

  // The stage's own tau decides what counts as a merge candidate.
  double tau = 0.7;
  heat_matrix_summary summary{};
  Check(heat_pipeline_stage_tau(pipeline.get(), a.stage.c_str(), &tau));
  Check(heat_matrix_summarize(m.get(), tau, &summary));
  std::printf("rows=%zu unalignable=%zu candidates=%zu merge_candidates=%zu "
              "tau=%g\n",
              summary.rows, summary.unalignable_rows, summary.candidates,
              summary.merge_candidates, tau);
  return kExitOk;
}

struct HeatArgs {
  std::string graph_a, graph_b, config, out_graph, out_log;
};

int RunHeat(const HeatArgs& a) {
  CheckOutputs({a.graph_a, a.graph_b, a.config}, {a.out_graph, a.out_log});
  Graph ga = LoadGraph(a.graph_a);
  Graph gb = LoadGraph(a.graph_b);
  Pipeline pipeline = LoadPipeline(a.config);
  heat_unified* raw = nullptr;
  Check(heat_run(ga.get(), gb.get(), pipeline.get(), &raw));
  Unified u(raw);
  Check(heat_unified_save_graph(u.get(), a.out_graph.c_str()));
  Check(heat_unified_save_log(u.get(), a.out_log.c_str()));
  size_t entities = 0, events = 0, facts = 0;
  Check(heat_unified_counts(u.get(), &entities, &events, &facts));
  std::printf("merges=%zu entities=%zu events=%zu facts=%zu\n",
              heat_unified_merge_count(u.get()), entities, events, facts);
  return kExitOk;
}

struct EvalArgs {
  std::string matrix, log, truth, out;
  std::vector<double> thresholds;
};

int RunEval(const EvalArgs& a) {
  const std::string& input = a.matrix.empty() ? a.log : a.matrix;
  CheckOutputs({input, a.truth}, {a.out});
  heat_truth* truth_raw = nullptr;
  Check(heat_truth_load(a.truth.c_str(), &truth_raw));
  Truth truth(truth_raw);
  const double* th = a.thresholds.empty() ? nullptr : a.thresholds.data();
  heat_report* report_raw = nullptr;
  if (!a.matrix.empty()) {
    heat_matrix* m = nullptr;
    Check(heat_matrix_load(a.matrix.c_str(), &m));
    Matrix matrix(m);
    Check(heat_eval_matrix(matrix.get(), truth.get(), th, a.thresholds.size(),
                           &report_raw));
  } else {
    heat_merge_log* l = nullptr;
    Check(heat_merge_log_load(a.log.c_str(), &l));
    MergeLog log(l);
    Check(heat_eval_log(log.get(), truth.get(), th, a.thresholds.size(),
                        &report_raw));
  }
  Report report(report_raw);
  Check(heat_report_save_csv(report.get(), a.out.c_str()));
  std::printf("thresholds=%zu truth_pairs=%zu\n", heat_report_size(report.get()),
              heat_truth_size(truth.get()));
  return kExitOk;
}

struct SynthArgs {
  std::string spec, out_prefix;
  uint64_t seed = 0;
  bool has_seed = false;
};

int RunSynth(const SynthArgs& a) {
  CheckOutputs({a.spec}, {a.out_prefix + "_pre.jsonl",
                          a.out_prefix + "_post.jsonl",
                          a.out_prefix + "_truth.tsv"});
  heat_synth_spec* raw = nullptr;
  Check(heat_synth_spec_load(a.spec.c_str(), &raw));
  SynthSpec spec(raw);
  if (a.has_seed) Check(heat_synth_spec_set_seed(spec.get(), a.seed));
  Check(heat_synth_generate(spec.get(), a.out_prefix.c_str()));
  std::printf("wrote %s_pre.jsonl %s_post.jsonl %s_truth.tsv\n",
              a.out_prefix.c_str(), a.out_prefix.c_str(), a.out_prefix.c_str());
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Bayesian entity alignment for event-driven graphs"};
  app.set_version_flag("--version", heat_version());
  app.require_subcommand(1);

  AlignArgs align;
  auto* align_cmd = app.add_subcommand("align", "Score one stage (single EAT pass)");
  align_cmd->add_option("--graph-a", align.graph_a, "Graph holding ambiguous nodes")->required();
  align_cmd->add_option("--graph-b", align.graph_b, "Reference graph")->required();
  align_cmd->add_option("--config", align.config, "Pipeline config JSON")->required();
  align_cmd->add_option("--stage", align.stage, "Stage name from the config")->required();
  align_cmd->add_option("--out", align.out, "Output matrix TSV")->required();

  HeatArgs heat;
  auto* heat_cmd = app.add_subcommand("heat", "Run every configured stage and merge");
  heat_cmd->add_option("--graph-a", heat.graph_a, "Graph holding ambiguous nodes")->required();
  heat_cmd->add_option("--graph-b", heat.graph_b, "Reference graph")->required();
  heat_cmd->add_option("--config", heat.config, "Pipeline config JSON")->required();
  heat_cmd->add_option("--out-graph", heat.out_graph, "Unified graph JSONL")->required();
  heat_cmd->add_option("--out-log", heat.out_log, "Merge log TSV")->required();

  EvalArgs eval;
  auto* eval_cmd = app.add_subcommand("eval", "Precision and recall against ground truth");
  auto* matrix_opt = eval_cmd->add_option("--matrix", eval.matrix, "Alignment matrix TSV");
  auto* log_opt = eval_cmd->add_option("--log", eval.log, "Merge log TSV");
  matrix_opt->excludes(log_opt);
  log_opt->excludes(matrix_opt);
  eval_cmd->add_option("--truth", eval.truth, "Ground truth TSV")->required();
  eval_cmd->add_option("--thresholds", eval.thresholds,
                       "Comma separated thresholds (default 0.05..0.95)")
      ->delimiter(',');
  eval_cmd->add_option("--out", eval.out, "Output CSV")->required();

  SynthArgs synth;
  auto* synth_cmd = app.add_subcommand("synth", "Generate a synthetic graph pair");
  synth_cmd->add_option("--spec", synth.spec, "Synthetic spec JSON")->required();
  auto* seed_opt = synth_cmd->add_option("--seed", synth.seed, "Override the spec seed");
  synth_cmd->add_option("--out-prefix", synth.out_prefix, "Output file prefix")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitUsage;
  }
  if (eval_cmd->parsed() && eval.matrix.empty() && eval.log.empty()) {
    std::fprintf(stderr, "heat eval: one of --matrix or --log is required\n");
    return kExitUsage;
  }
  synth.has_seed = seed_opt->count() > 0;

  try {
    if (align_cmd->parsed()) return RunAlign(align);
    if (heat_cmd->parsed()) return RunHeat(heat);
    if (eval_cmd->parsed()) return RunEval(eval);
    if (synth_cmd->parsed()) return RunSynth(synth);
  } catch (const Failure& f) {
    return f.exit_code;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "heat: internal error: %s\n", e.what());
    return kExitInternal;
  }
  return kExitUsage;
}
