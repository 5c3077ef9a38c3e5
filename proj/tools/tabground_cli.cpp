// Copyright 2026 The tabground Authors.
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

// Command-line front end: trajectory runs and the evaluation pipelines.

#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "tabground/backends.hpp"
#include "tabground/calibration.hpp"
#include "tabground/controller.hpp"
#include "tabground/pipelines.hpp"
#include "tabground/rewards.hpp"
#include "tabground/standards.hpp"
#include "tabground/theory.hpp"

namespace {

using nlohmann::json;
using namespace tabground;

std::string read_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

class Output {
 public:
  explicit Output(const std::string& path) {
    if (!path.empty() && path != "-") {
      file_.open(path, std::ios::binary);
      if (!file_) throw FormatError("cannot write " + path);
    }
  }
  std::ostream& stream() { return file_.is_open() ? static_cast<std::ostream&>(file_) : std::cout; }

 private:
  std::ofstream file_;
};

void emit(const std::string& path, const json& report) {
  Output out(path);
  out.stream() << report.dump(2) << "\n";
}

struct Common {
  std::string out;
  std::size_t workers = 0;
  std::uint64_t seed = 0;
};

void add_common(CLI::App* cmd, Common& common, bool with_seed, bool with_workers) {
  cmd->add_option("-o,--out", common.out, "Write the report here instead of stdout");
  if (with_seed) cmd->add_option("--seed", common.seed, "Random seed")->capture_default_str();
  if (with_workers) cmd->add_option("--workers", common.workers, "Worker threads (0 = hardware)")->capture_default_str();
}

struct RunArgs {
  std::string question;
  std::string table;
  std::string standards;
  std::string plan;
  std::string planner;
  std::string reasoner;
  std::string attention = "scripted:uniform";
  std::string calibration;
  std::string mask_source = "plan";
  double halt_delta = HaltConfig{}.delta_stag;
  std::size_t halt_k = HaltConfig{}.k_stag;
  std::size_t max_steps = HaltConfig{}.t_max;
  double p_flip = 0.2;
  bool tabrouge = false;
  bool fixed_clock = false;
};

int run_command(const RunArgs& args, const Common& common) {
  ControllerOptions options;
  options.halt = {args.halt_delta, args.halt_k, args.max_steps};
  options.halt.validate();
  options.p_flip = args.p_flip;
  options.seed = common.seed;
  const auto source = mask_source_from_string(args.mask_source);
  if (!source) throw InvalidArgument("unknown mask source '" + args.mask_source + "'");
  options.mask_source = *source;
  if (!args.calibration.empty()) options.calibration = calibration_from_json(json::parse(read_text(args.calibration)));
  if (args.tabrouge) options.content_rewards.push_back(std::make_shared<TabRougeReward>());
  if (args.fixed_clock) options.clock = [] { return 0.0; };

  const auto reasoner = make_reasoner_backend(BackendSpec::parse(args.reasoner));
  const auto attention = make_attention_backend(BackendSpec::parse(args.attention), common.seed);
  std::unique_ptr<PlannerBackend> planner;
  if (!args.planner.empty()) planner = make_planner_backend(BackendSpec::parse(args.planner));
  std::optional<std::string> plan_text;
  if (!args.plan.empty()) plan_text = read_text(args.plan);
  if (!plan_text && !planner) throw InvalidArgument("run needs --plan or --planner");
  const Backends backends{*reasoner, *attention, planner.get()};

  auto run_one = [&](const std::string& id, const std::string& question, const Table& table,
                     const CellMask* reference) {
    ControllerOptions local = options;
    local.record_id = id;
    local.reference_mask = reference;
    if (plan_text) return run_trajectory(question, table, parse_plan(*plan_text, table.columns()), backends, local);
    return run_pipeline(question, table, backends, local);
  };

  Output out(common.out);
  if (!args.standards.empty()) {
    for (const auto& s : read_standards(args.standards)) {
      out.stream() << trajectory_to_json(run_one(s.id, s.question, s.table, &s.mask)).dump() << "\n";
    }
  } else {
    if (args.table.empty()) throw InvalidArgument("run needs --table or --standards");
    const Table table = parse_table(read_text(args.table));
    out.stream() << trajectory_to_json(run_one("", args.question, table, nullptr)).dump() << "\n";
  }
  return 0;
}

json error_json(std::string_view kind, std::string_view message) {
  return {{"error", {{"kind", kind}, {"message", message}}}};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Cell-grounded verification and evaluation for multi-step table reasoning"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "tabground 0.1.0");

  Common common;

  RunArgs run;
  auto* run_cmd = app.add_subcommand("run", "Run grounded trajectories and print one JSON record per line");
  add_common(run_cmd, common, true, false);
  run_cmd->add_option("--question", run.question, "Question text (with --table)");
  run_cmd->add_option("--table", run.table, "Pipe-delimited table file");
  run_cmd->add_option("--standards", run.standards, "Standards JSONL; one trajectory per record");
  run_cmd->add_option("--plan", run.plan, "Plan text file");
  run_cmd->add_option("--planner", run.planner, "Planner backend");
  run_cmd->add_option("--reasoner", run.reasoner, "Reasoner backend")->required();
  run_cmd->add_option("--attention", run.attention, "Attention backend")->capture_default_str();
  run_cmd->add_option("--calibration", run.calibration, "Calibration parameters JSON");
  run_cmd->add_option("--mask-source", run.mask_source, "plan|reference|noised|uniform")->capture_default_str();
  run_cmd->add_option("--p-flip", run.p_flip, "Bit-flip probability for noised masks")->capture_default_str();
  run_cmd->add_option("--halt-delta", run.halt_delta, "Stagnation improvement threshold")->capture_default_str();
  run_cmd->add_option("--halt-k", run.halt_k, "Consecutive stagnant steps before halting")->capture_default_str();
  run_cmd->add_option("--max-steps", run.max_steps, "Step cap")->capture_default_str();
  run_cmd->add_flag("--tabrouge", run.tabrouge, "Also score each step with TABROUGE");
  run_cmd->add_flag("--fixed-clock", run.fixed_clock, "Record zero wall times (byte-stable logs)");

  std::string standards_path;
  std::string backend = "scripted:oracle";

  auto* auroc_cmd = app.add_subcommand("eval-auroc", "Cell-level AUROC of attention against standards");
  add_common(auroc_cmd, common, true, true);
  auroc_cmd->add_option("--standards", standards_path, "Standards JSONL")->required();
  auroc_cmd->add_option("--backend", backend, "Attention backend")->capture_default_str();

  std::size_t views = 5;
  auto* perm_cmd = app.add_subcommand("perm-stability", "AUROC spread across row-permuted views");
  add_common(perm_cmd, common, true, true);
  perm_cmd->add_option("--standards", standards_path, "Standards JSONL")->required();
  perm_cmd->add_option("--backend", backend, "Attention backend")->capture_default_str();
  perm_cmd->add_option("--views", views, "Views per record, identity first")->capture_default_str()->check(
      CLI::PositiveNumber);

  FalsificationOptions falsify;
  std::vector<std::string> kinds;
  auto* falsify_cmd = app.add_subcommand("falsify", "Ground-truth versus density-preserving null masks");
  add_common(falsify_cmd, common, true, true);
  falsify_cmd->add_option("--standards", standards_path, "Standards JSONL")->required();
  falsify_cmd->add_option("--backend", backend, "Attention backend")->capture_default_str();
  falsify_cmd->add_option("--draws", falsify.draws, "Null draws per kind")->capture_default_str()->check(
      CLI::PositiveNumber);
  falsify_cmd->add_option("--kinds", kinds, "Null kinds (default: all)");

  std::string judge_path;
  std::string human_path;
  auto* label_cmd = app.add_subcommand("labelability", "Judge/human agreement and Cohen's kappa");
  add_common(label_cmd, common, false, false);
  label_cmd->add_option("--judge", judge_path, "Judge labels JSONL")->required();
  label_cmd->add_option("--human", human_path, "Human labels JSONL")->required();

  std::string question;
  std::string table_path;
  auto* rouge_cmd = app.add_subcommand("tabrouge", "TABROUGE of a table state against a question");
  add_common(rouge_cmd, common, false, false);
  rouge_cmd->add_option("--question", question, "Question text")->required();
  rouge_cmd->add_option("--table", table_path, "Pipe-delimited table file")->required();

  std::string samples_path;
  CalibrationOptions calib;
  auto* calib_cmd = app.add_subcommand("calibrate", "Fit the logistic calibration of verifier scores");
  add_common(calib_cmd, common, true, false);
  calib_cmd->add_option("--samples", samples_path, "JSONL of {score, correct[, excluded]}")->required();
  calib_cmd->add_option("--train-fraction", calib.train_fraction)->capture_default_str();
  calib_cmd->add_option("--learning-rate", calib.learning_rate)->capture_default_str();
  calib_cmd->add_option("--patience", calib.patience)->capture_default_str();
  calib_cmd->add_option("--max-epochs", calib.max_epochs)->capture_default_str();

  TheoryOptions theory;
  auto* theory_cmd = app.add_subcommand("theory-check", "Simulation and TABROUGE direction checks");
  add_common(theory_cmd, common, true, false);
  theory_cmd->add_option("--paths", theory.paths, "Random-walk paths")->capture_default_str();
  theory_cmd->add_option("--steps", theory.steps, "Random-walk length")->capture_default_str();
  theory_cmd->add_option("--cases", theory.token_cases, "Randomized token cases")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    const PipelineOptions pipeline{common.workers};
    if (*run_cmd) return run_command(run, common);
    if (*auroc_cmd) {
      const auto attention = make_attention_backend(BackendSpec::parse(backend), common.seed);
      emit(common.out, to_json(eval_auroc(read_standards(standards_path), *attention, pipeline)));
    } else if (*perm_cmd) {
      const auto attention = make_attention_backend(BackendSpec::parse(backend), common.seed);
      emit(common.out,
           to_json(eval_perm_stability(read_standards(standards_path), *attention, views, common.seed, pipeline)));
    } else if (*falsify_cmd) {
      falsify.seed = common.seed;
      if (!kinds.empty()) {
        falsify.kinds.clear();
        for (const auto& k : kinds) {
          const auto kind = null_kind_from_string(k);
          if (!kind) throw InvalidArgument("unknown null kind '" + k + "'");
          falsify.kinds.push_back(*kind);
        }
      }
      const auto attention = make_attention_backend(BackendSpec::parse(backend), common.seed);
      emit(common.out, to_json(eval_falsification(read_standards(standards_path), *attention, falsify, pipeline)));
    } else if (*label_cmd) {
      emit(common.out, to_json(eval_labelability(read_labels(judge_path), read_labels(human_path))));
    } else if (*rouge_cmd) {
      const TableState state{parse_table(read_text(table_path)), 0, std::nullopt};
      const auto r = tabrouge(question, state);
      emit(common.out, {{"score", r.score}, {"lcs", r.lcs_len}, {"state_tokens", r.enc_len}});
    } else if (*calib_cmd) {
      calib.seed = common.seed;
      std::vector<CalibrationSample> samples;
      for (const auto& j : read_jsonl(samples_path)) {
        samples.push_back({j.at("score").get<double>(), j.at("correct").get<bool>(), j.value("excluded", false)});
      }
      const CalibrationFit fit = fit_calibration_detailed(samples, calib);
      emit(common.out, {{"params", calibration_to_json(fit.params)},
                        {"train_bce", fit.train_bce},
                        {"heldout_bce", fit.heldout_bce},
                        {"epochs", fit.epochs},
                        {"n_train", fit.n_train},
                        {"n_heldout", fit.n_heldout}});
    } else if (*theory_cmd) {
      theory.prune_cases = theory.token_cases;
      emit(common.out, to_json(theory_checks(common.seed, theory)));
    }
    return 0;
  } catch (const Error& e) {
    std::cerr << error_json(e.kind(), e.what()).dump() << "\n";
    return 1;
  } catch (const json::exception& e) {
    std::cerr << error_json("FormatError", e.what()).dump() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << error_json("IOError", e.what()).dump() << "\n";
    return 1;
  }
}
