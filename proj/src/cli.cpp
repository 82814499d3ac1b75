// Copyright 2026 The fixdetect Authors
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

#include "fixdetect/cli.hpp"

#include <exception>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "fixdetect/error.hpp"
#include "fixdetect/eval.hpp"
#include "fixdetect/formats.hpp"
#include "fixdetect/json_io.hpp"
#include "fixdetect/sim.hpp"

namespace fixdetect::cli {
namespace {

template <typename Fn>
int guarded(std::ostream& err, Fn&& fn) {
  try {
    fn();
    return kExitOk;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return e.code() == ErrorCode::InvariantViolation ? kExitInternal : kExitInput;
  } catch (const nlohmann::json::exception& e) {
    err << "error: malformed JSON: " << e.what() << '\n';
    return kExitInput;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << '\n';
    return kExitInternal;
  }
}

void emit(const Json& j, const std::optional<Path>& path, std::ostream& out) {
  const std::string text = j.dump(2) + "\n";
  if (path) {
    write_text_file(*path, text);
  } else {
    out << text;
  }
}

void add_config_options(CLI::App& app, ConfigOverrides& c) {
  app.add_option("--config", c.config_path, "PipelineConfig JSON file");
  app.add_option("--measure", c.measure, "difference | ratio | pearl");
  app.add_option("--threshold", c.threshold, "causal degree bound");
  app.add_option("--min-runs-per-version", c.min_runs_per_version);
  app.add_option("--alpha", c.alpha, "significance level");
  app.add_option("--min-segment", c.min_segment);
  app.add_option("--test", c.test, "mann_whitney_u | kolmogorov_smirnov");
  app.add_option("--stride", c.stride);
  app.add_option("--correction", c.correction, "bonferroni | none");
  app.add_option("--bucket-width", c.bucket_width, "bucket width in milliseconds");
  app.add_option("--min-runs-per-bucket", c.min_runs_per_bucket);
  app.add_option("--identity", c.identity, "trace_scoped | test_method_scoped");
  app.add_option("--fixed-mean-ceiling", c.fixed_mean_ceiling);
  app.add_flag("--lenient", c.lenient, "ignore unknown JSON fields");
}

}  // namespace

pipeline::PipelineConfig ConfigOverrides::resolve() const {
  pipeline::PipelineConfig config;
  if (config_path) config = pipeline::pipeline_config_from_json(read_json_file(*config_path), !lenient);
  auto bad = [](const std::string& what) { throw Error(ErrorCode::InvalidParameter, what); };
  if (measure) {
    auto m = causal::parse_measure(*measure);
    if (!m) bad("--measure: unknown measure '" + *measure + "'");
    config.grouping.measure = *m;
    config.grouping.threshold = causal::GroupingConfig::default_threshold(*m);
  }
  if (threshold) config.grouping.threshold = *threshold;
  if (min_runs_per_version) config.grouping.min_runs_per_version = *min_runs_per_version;
  if (alpha) config.cpd.alpha = *alpha;
  if (min_segment) config.cpd.min_segment = *min_segment;
  if (test) {
    auto t = cpd::parse_test(*test);
    if (!t) bad("--test: unknown test '" + *test + "'");
    config.cpd.test = *t;
  }
  if (stride) config.cpd.stride = *stride;
  if (correction) {
    auto c = cpd::parse_correction(*correction);
    if (!c) bad("--correction: unknown correction '" + *correction + "'");
    config.cpd.correction = *c;
  }
  if (bucket_width) config.bucket_width = *bucket_width;
  if (min_runs_per_bucket) config.min_runs_per_bucket = *min_runs_per_bucket;
  if (identity) {
    auto mode = pipeline::parse_identity(*identity);
    if (!mode) bad("--identity: unknown mode '" + *identity + "'");
    config.identity_mode = *mode;
  }
  if (fixed_mean_ceiling) config.fixed_mean_ceiling = *fixed_mean_ceiling;
  config.validate();
  return config;
}

int cmd_simulate(const SimulateArgs& args, std::ostream& err) {
  return guarded(err, [&] {
    auto scenario = sim::scenario_from_json(read_json_file(args.scenario), !args.lenient);
    if (args.seed) scenario.seed = *args.seed;
    const auto result = sim::simulate(scenario);
    std::ostringstream runs;
    write_runs_jsonl(runs, result.runs);
    write_text_file(args.out_runs, runs.str());
    write_text_file(args.out_truth, sim::truth_to_json(scenario, result.truth).dump(2) + "\n");
    if (args.out_patch) write_text_file(*args.out_patch, to_json(scenario.patch()).dump(2) + "\n");
  });
}

int cmd_group(const GroupArgs& args, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const auto config = args.config.resolve();
    const bool strict = !args.config.lenient;
    const auto patch = patch_from_json(read_json_file(args.patch), "", strict);
    const auto runs = read_runs_file(args.runs, strict);
    std::vector<TestRunReport> baseline;
    std::vector<TestRunReport> updated;
    for (const auto& run : runs) {
      if (run.version_id == patch.baseline_version) {
        baseline.push_back(run);
      } else if (run.version_id == patch.updated_version) {
        updated.push_back(run);
      } else {
        throw Error(ErrorCode::MixedPopulation, "run with version_id '" + run.version_id +
                                                    "' matches neither patch version");
      }
    }
    auto grouping_config = config.grouping;
    grouping_config.identity = config.identity_mode;
    emit(to_json(causal::group_failures(baseline, updated, patch, grouping_config)), args.out, out);
  });
}

int cmd_detect(const DetectArgs& args, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const auto config = args.config.resolve();
    const auto series = series_from_json(read_json_file(args.series), !args.config.lenient);
    Json events = Json::array();
    for (const auto& e : cpd::detect_all(series, config.cpd)) events.push_back(to_json(e));
    emit(Json{{"events", std::move(events)}}, args.out, out);
  });
}

int cmd_pipeline(const PipelineArgs& args, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const auto config = args.config.resolve();
    const bool strict = !args.config.lenient;
    const auto patch = patch_from_json(read_json_file(args.patch), "", strict);
    const auto runs = read_runs_file(args.runs, strict);
    emit(pipeline::to_json(pipeline::run_pipeline(runs, patch, config)), args.out, out);
  });
}

int cmd_eval(const EvalArgs& args, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const bool strict = !args.lenient;
    const Json pred = read_json_file(args.pred);
    const Json truth_json = read_json_file(args.truth);
    if (!truth_json.is_object()) throw Error(ErrorCode::ParseError, "truth: expected an object");

    auto truth_events = [&] {
      std::vector<sim::GroundTruthEvent> events;
      if (!truth_json.contains("events")) return events;
      const Json& arr = truth_json.at("events");
      if (!arr.is_array()) throw Error(ErrorCode::ParseError, "truth.events: expected an array");
      for (std::size_t i = 0; i < arr.size(); ++i) {
        events.push_back(sim::truth_event_from_json(arr[i], "truth.events[" + std::to_string(i) + "]", strict));
      }
      std::stable_sort(events.begin(), events.end(), [](const auto& a, const auto& b) { return a.at_bucket < b.at_bucket; });
      return events;
    };

    if (pred.is_object() && pred.contains("entries")) {
      if (!truth_json.contains("grouping")) throw Error(ErrorCode::ParseError, "truth: missing grouping");
      const auto grouping = grouping_from_json(pred, strict);
      const auto truth = eval::grouping_truth_from_json(truth_json.at("grouping"), "truth.grouping", strict);
      std::optional<std::set<MethodId>> candidates;
      if (!args.candidates.empty()) {
        candidates.emplace();
        for (const auto& name : args.candidates) candidates->insert(MethodId(name));
      }
      emit(Json{{"grouping", eval::to_json(eval::score_grouping(grouping, truth, candidates))}}, args.out, out);
      return;
    }
    if (pred.is_object() && pred.contains("events")) {
      std::vector<cpd::ChangeEvent> events;
      const Json& arr = pred.at("events");
      if (!arr.is_array()) throw Error(ErrorCode::ParseError, "events: expected an array");
      for (std::size_t i = 0; i < arr.size(); ++i) {
        events.push_back(change_event_from_json(arr[i], "events[" + std::to_string(i) + "]", strict));
      }
      const auto score = eval::score_detection(events, truth_events(), args.tolerance);
      emit(Json{{"detection", eval::to_json(score)}}, args.out, out);
      return;
    }
    if (pred.is_object() && pred.contains("methods")) {
      // Pipeline report: each signature's events are scored against the
      // truth events of its test.
      const auto all_truth = truth_events();
      Json per_series = Json::array();
      std::uint64_t tp = 0, fp = 0, fn = 0;
      for (const auto& m : pred.at("methods")) {
        for (const auto& s : m.at("signatures")) {
          const auto signature = signature_from_json(s.at("signature"), "signature", strict);
          std::vector<cpd::ChangeEvent> events;
          for (const auto& e : s.at("events")) events.push_back(change_event_from_json(e, "event", false));
          std::vector<sim::GroundTruthEvent> truth;
          for (const auto& t : all_truth) {
            if (t.affected_test == signature.test_id) truth.push_back(t);
          }
          const auto score = eval::score_detection(events, truth, args.tolerance);
          tp += score.matched.size();
          fp += score.spurious.size();
          fn += score.misses.size();
          per_series.push_back(Json{{"method", m.at("method")}, {"signature", s.at("signature")},
                                    {"detection", eval::to_json(score)}});
        }
      }
      emit(Json{{"series", std::move(per_series)}, {"scores", eval::to_json(eval::ir_scores(tp, fp, fn))}},
           args.out, out);
      return;
    }
    throw Error(ErrorCode::ParseError, "pred: expected a grouping, an events list or a pipeline report");
  });
}

int cmd_bench(const BenchArgs& args, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const auto config = args.config.resolve();
    if (args.n < 1) throw Error(ErrorCode::InvalidParameter, "--n must be positive");
    emit(eval::to_json(eval::bench_detect(args.n, config.cpd, args.seed)), args.out, out);
  });
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Fix detection over flaky test streams"};
  app.require_subcommand(1);

  SimulateArgs simulate;
  auto* sim_cmd = app.add_subcommand("simulate", "Generate runs and ground truth from a scenario");
  sim_cmd->add_option("--scenario", simulate.scenario)->required();
  sim_cmd->add_option("--out-runs", simulate.out_runs)->required();
  sim_cmd->add_option("--out-truth", simulate.out_truth)->required();
  sim_cmd->add_option("--out-patch", simulate.out_patch);
  sim_cmd->add_option("--seed", simulate.seed, "override the scenario seed");
  sim_cmd->add_flag("--lenient", simulate.lenient);
  sim_cmd->add_option("--config", "accepted for uniformity; unused");

  GroupArgs group;
  auto* group_cmd = app.add_subcommand("group", "Group failures to causing methods");
  group_cmd->add_option("--runs", group.runs)->required();
  group_cmd->add_option("--patch", group.patch)->required();
  group_cmd->add_option("--out", group.out);
  add_config_options(*group_cmd, group.config);

  DetectArgs detect;
  auto* detect_cmd = app.add_subcommand("detect", "Detect changepoints in a degree series");
  detect_cmd->add_option("--series", detect.series)->required();
  detect_cmd->add_option("--out", detect.out);
  add_config_options(*detect_cmd, detect.config);

  PipelineArgs pipe;
  auto* pipe_cmd = app.add_subcommand("pipeline", "Group, build series, detect and report verdicts");
  pipe_cmd->add_option("--runs", pipe.runs)->required();
  pipe_cmd->add_option("--patch", pipe.patch)->required();
  pipe_cmd->add_option("--out", pipe.out);
  add_config_options(*pipe_cmd, pipe.config);

  EvalArgs evaluate;
  auto* eval_cmd = app.add_subcommand("eval", "Score predictions against ground truth");
  eval_cmd->add_option("--pred", evaluate.pred)->required();
  eval_cmd->add_option("--truth", evaluate.truth)->required();
  eval_cmd->add_option("--tolerance", evaluate.tolerance, "changepoint match tolerance in points");
  eval_cmd->add_option("--candidates", evaluate.candidates, "candidate methods, enables accuracy")
      ->delimiter(',');
  eval_cmd->add_option("--out", evaluate.out);
  eval_cmd->add_flag("--lenient", evaluate.lenient);
  eval_cmd->add_option("--config", "accepted for uniformity; unused");

  BenchArgs bench;
  auto* bench_cmd = app.add_subcommand("bench", "Time binary segmentation on a synthetic series");
  bench_cmd->add_option("--n", bench.n);
  bench_cmd->add_option("--seed", bench.seed);
  bench_cmd->add_option("--out", bench.out);
  add_config_options(*bench_cmd, bench.config);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp& e) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "usage error: " << e.what() << '\n';
    return kExitUsage;
  }

  if (sim_cmd->parsed()) return cmd_simulate(simulate, err);
  if (group_cmd->parsed()) return cmd_group(group, out, err);
  if (detect_cmd->parsed()) return cmd_detect(detect, out, err);
  if (pipe_cmd->parsed()) return cmd_pipeline(pipe, out, err);
  if (eval_cmd->parsed()) return cmd_eval(evaluate, out, err);
  if (bench_cmd->parsed()) return cmd_bench(bench, out, err);
  return kExitUsage;
}

}  // namespace fixdetect::cli
