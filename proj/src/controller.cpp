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

#include "tabground/controller.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>

#include "tabground/masks.hpp"
#include "tabground/synthetic.hpp"

namespace tabground {

namespace {

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

CellMask step_mask(const ControllerOptions& options, const Plan& plan, const Table& table, std::size_t t) {
  const auto rows = static_cast<Eigen::Index>(table.n_rows());
  const auto cols = static_cast<Eigen::Index>(table.n_cols());
  const CellMask* ref = options.reference_mask;
  switch (options.mask_source) {
    case MaskSource::plan:
      return t < plan.steps.size() ? compile_mask(plan.steps[t], table) : CellMask::uniform(rows, cols);
    case MaskSource::reference:
      return ref != nullptr && ref->same_shape(table) ? *ref : CellMask::uniform(rows, cols);
    case MaskSource::noised:
      return ref != nullptr && ref->same_shape(table) ? noise_mask(*ref, options.p_flip, mix64(options.seed, t))
                                                      : CellMask::uniform(rows, cols);
    case MaskSource::uniform:
      return CellMask::uniform(rows, cols);
  }
  return CellMask::uniform(rows, cols);
}

std::optional<std::string> candidate_of(const TableState& state) {
  if (state.table.n_rows() == 1 && state.table.n_cols() == 1) return state.table.cell(0, 0);
  return std::nullopt;
}

std::string best_answer(std::span<const StepEntry> steps) {
  const StepEntry* best = nullptr;
  for (const auto& e : steps) {
    if (e.candidate_answer && (best == nullptr || e.score() > best->score())) best = &e;
  }
  return best != nullptr ? *best->candidate_answer : std::string();
}

}  // namespace

void HaltConfig::validate() const {
  if (!(delta_stag >= 0.0)) throw InvalidArgument("delta_stag must be >= 0");
  if (k_stag < 1) throw InvalidArgument("k_stag must be >= 1");
  if (t_max < 1) throw InvalidArgument("t_max must be >= 1");
}

std::string_view to_string(HaltReason reason) {
  switch (reason) {
    case HaltReason::final_answer: return "final_answer";
    case HaltReason::stagnation: return "stagnation";
    case HaltReason::step_cap: return "step_cap";
    case HaltReason::backend_error: return "backend_error";
  }
  return "?";
}

std::string_view to_string(MaskSource source) {
  switch (source) {
    case MaskSource::plan: return "plan";
    case MaskSource::reference: return "reference";
    case MaskSource::noised: return "noised";
    case MaskSource::uniform: return "uniform";
  }
  return "?";
}

std::optional<MaskSource> mask_source_from_string(std::string_view name) {
  for (auto s : {MaskSource::plan, MaskSource::reference, MaskSource::noised, MaskSource::uniform}) {
    if (to_string(s) == name) return s;
  }
  return std::nullopt;
}

Clock steady_clock_seconds() {
  return [] {
    return std::chrono::duration<double>(std::chrono::steady_clock::now().time_since_epoch()).count();
  };
}

bool stagnated(std::span<const StepEntry> entries, const HaltConfig& halt) {
  if (entries.size() < halt.k_stag + 1) return false;
  for (std::size_t i = entries.size() - halt.k_stag; i < entries.size(); ++i) {
    double best = entries[0].score();
    for (std::size_t j = 1; j < i; ++j) best = std::max(best, entries[j].score());
    if (entries[i].score() - best > halt.delta_stag) return false;
    if (entries[i].state_hash != entries[i - 1].state_hash) return false;
  }
  return true;
}

std::string format_feedback(std::size_t step, double score, std::string_view rationale) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "[verifier] step=%zu score=%.3f rationale=", step, score);
  return buf + std::string(rationale);
}

TrajectoryRecord run_trajectory(std::string_view question, const Table& table, const Plan& plan,
                                const Backends& backends, const ControllerOptions& options) {
  options.halt.validate();
  const Clock clock = options.clock ? options.clock : steady_clock_seconds();
  const double started = clock();

  TrajectoryRecord record{.id = options.record_id, .question = std::string(question), .table = table, .plan = plan};

  TableState state{table, 0, std::nullopt};
  std::vector<std::string> feedback;
  bool halted = false;

  for (std::size_t t = 0; t < options.halt.t_max && !halted; ++t) {
    StepEntry entry;
    entry.step = t + 1;
    const CellMask mask = step_mask(options, plan, state.table, t);
    entry.mask_provenance = mask.provenance();
    const PlanStep* plan_step = t < plan.steps.size() ? &plan.steps[t] : nullptr;

    std::optional<StepOutcome> outcome;
    try {
      const ToolCall call = backends.reasoner.next_action({question, state, plan, plan_step, feedback});
      entry.call = call;
      outcome = execute(state, call);
    } catch (const BackendError& e) {
      record.halt_reason = HaltReason::backend_error;
      record.error = e.what();
      break;
    } catch (const InvalidToolCall& e) {
      entry.status = "format_error";
      entry.detail = e.what();
    } catch (const FormatError& e) {
      entry.status = "format_error";
      entry.detail = e.what();
    }

    CellAttention attention;
    try {
      const Serialized serialized = serialize(state.table);
      attention = backends.attention.attend(
          {options.record_id, question, state.table, serialized, t, &mask});
      attention.validate();
      const auto scored = r_attn_detailed(attention, mask, options.r_attn);
      entry.r_attn = scored.score;
      entry.attention_excluded = scored.excluded;
    } catch (const Error& e) {
      record.halt_reason = HaltReason::backend_error;
      record.error = std::string(e.kind()) + ": " + e.what();
      break;
    }
    if (options.calibration) entry.calibrated = options.calibration->calibrate(entry.r_attn);

    TableState next = state;
    if (outcome) {
      if (outcome->terminal()) {
        entry.status = "ok";
        entry.candidate_answer = outcome->answer();
        next.step_index = state.step_index + 1;
      } else {
        next = outcome->state();
        if (outcome->error) {
          entry.status = "tool_error:" + std::string(to_string(outcome->error->kind));
          entry.detail = outcome->error->reason;
        } else {
          entry.status = "ok";
          entry.candidate_answer = candidate_of(next);
        }
      }
    } else {
      next.step_index = state.step_index + 1;
    }
    entry.state_hash = state_hash(next);

    char mass[96];
    std::snprintf(mass, sizeof(mass), "r_attn=%.3f mask=%s", entry.r_attn,
                  std::string(to_string(entry.mask_provenance)).c_str());
    std::string rationale = mass;
    if (entry.attention_excluded) rationale += " excluded=zero_mass";
    for (const auto& reward : options.content_rewards) {
      entry.rewards.push_back(reward->evaluate(question, next));
      rationale += "; " + entry.rewards.back().name + ": " + entry.rewards.back().rationale;
    }
    if (entry.status != "ok") rationale += "; " + entry.status;
    entry.feedback = format_feedback(entry.step, entry.score(), rationale);
    feedback.push_back(entry.feedback);

    const bool final = outcome && outcome->terminal();
    record.steps.push_back(std::move(entry));
    state = std::move(next);

    if (final) {
      record.halt_reason = HaltReason::final_answer;
      record.final_answer = *record.steps.back().candidate_answer;
      halted = true;
    } else if (stagnated(record.steps, options.halt)) {
      record.halt_reason = HaltReason::stagnation;
      halted = true;
    } else {
      record.halt_reason = HaltReason::step_cap;
    }
  }
  if (record.halt_reason != HaltReason::final_answer) record.final_answer = best_answer(record.steps);
  record.reason_seconds = clock() - started;
  return record;
}

TrajectoryRecord run_pipeline(std::string_view question, const Table& table, const Backends& backends,
                              const ControllerOptions& options) {
  if (backends.planner == nullptr) throw InvalidArgument("run_pipeline needs a planner backend");
  const Clock clock = options.clock ? options.clock : steady_clock_seconds();
  const double started = clock();
  Plan plan;
  double plan_seconds = 0.0;
  try {
    plan = parse_plan(backends.planner->plan(question, table), table.columns());
    plan_seconds = clock() - started;
  } catch (const BackendError& e) {
    TrajectoryRecord record{.id = options.record_id, .question = std::string(question), .table = table};
    record.halt_reason = HaltReason::backend_error;
    record.error = e.what();
    record.plan_seconds = clock() - started;
    return record;
  }
  TrajectoryRecord record = run_trajectory(question, table, plan, backends, options);
  record.plan_seconds = plan_seconds;
  return record;
}

nlohmann::json step_to_json(const StepEntry& e) {
  nlohmann::json j = {{"step", e.step},
                      {"call", e.call ? tool_call_to_json(*e.call) : nlohmann::json(nullptr)},
                      {"status", e.status},
                      {"state_hash", hex64(e.state_hash)},
                      {"mask", to_string(e.mask_provenance)},
                      {"r_attn", e.r_attn},
                      {"attention_excluded", e.attention_excluded},
                      {"feedback", e.feedback}};
  if (!e.detail.empty()) j["detail"] = e.detail;
  if (e.calibrated) j["calibrated"] = *e.calibrated;
  if (e.candidate_answer) j["candidate_answer"] = *e.candidate_answer;
  j["rewards"] = nlohmann::json::array();
  for (const auto& r : e.rewards) j["rewards"].push_back(reward_to_json(r));
  return j;
}

nlohmann::json trajectory_to_json(const TrajectoryRecord& record) {
  nlohmann::json j = {{"id", record.id},
                      {"question", record.question},
                      {"table", table_to_json(record.table)},
                      {"plan", plan_to_json(record.plan)},
                      {"steps", nlohmann::json::array()},
                      {"halt_reason", to_string(record.halt_reason)},
                      {"final_answer", record.final_answer},
                      {"timings", {{"plan_seconds", record.plan_seconds}, {"reason_seconds", record.reason_seconds}}}};
  for (const auto& e : record.steps) j["steps"].push_back(step_to_json(e));
  if (!record.error.empty()) j["error"] = record.error;
  return j;
}

}  // namespace tabground
