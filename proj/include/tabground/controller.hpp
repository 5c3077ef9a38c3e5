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

#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "tabground/attention.hpp"
#include "tabground/backends.hpp"
#include "tabground/calibration.hpp"
#include "tabground/engine.hpp"
#include "tabground/plan.hpp"
#include "tabground/rewards.hpp"

namespace tabground {

struct HaltConfig {
  double delta_stag = 0.02;
  std::size_t k_stag = 2;
  std::size_t t_max = 6;

  /// Throws InvalidArgument unless delta_stag >= 0, k_stag >= 1, t_max >= 1.
  void validate() const;
};

enum class HaltReason { final_answer, stagnation, step_cap, backend_error };

std::string_view to_string(HaltReason reason);

/// Where the mask scored at each step comes from.
///   plan       compile_mask of the current plan step (uniform once the plan runs out)
///   reference  the caller's reference mask while it fits the state, else uniform
///   noised     noise_mask(reference, p_flip) while it fits, else uniform
///   uniform    always the uniform fallback
enum class MaskSource { plan, reference, noised, uniform };

std::string_view to_string(MaskSource source);
std::optional<MaskSource> mask_source_from_string(std::string_view name);

struct StepEntry {
  std::size_t step = 0;                ///< 1-based
  std::optional<ToolCall> call;        ///< absent when the reasoner reply was malformed
  std::string status;                  ///< "ok", "tool_error:<Kind>" or "format_error"
  std::string detail;                  ///< error reason, empty on success
  std::uint64_t state_hash = 0;        ///< hash of the state after the step
  MaskProvenance mask_provenance = MaskProvenance::uniform_fallback;
  double r_attn = 0.0;
  std::optional<double> calibrated;
  bool attention_excluded = false;
  std::vector<RewardSignal> rewards;
  std::optional<std::string> candidate_answer;
  std::string feedback;

  /// The score the halt rule and answer selection use: calibrated when a
  /// calibration is configured, raw r_attn otherwise.
  double score() const noexcept { return calibrated.value_or(r_attn); }
};

struct TrajectoryRecord {
  std::string id;
  std::string question;
  Table table;
  Plan plan{};
  std::vector<StepEntry> steps{};
  HaltReason halt_reason = HaltReason::step_cap;
  std::string final_answer{};
  std::string error{};  ///< backend failure message, empty otherwise
  double plan_seconds = 0.0;
  double reason_seconds = 0.0;
};

/// Monotonic seconds.
using Clock = std::function<double()>;
Clock steady_clock_seconds();

struct ControllerOptions {
  HaltConfig halt;
  RAttnOptions r_attn;
  std::optional<CalibrationParams> calibration;
  std::vector<std::shared_ptr<const StepReward>> content_rewards;
  MaskSource mask_source = MaskSource::plan;
  const CellMask* reference_mask = nullptr;
  double p_flip = 0.2;
  std::uint64_t seed = 0;
  std::string record_id;
  Clock clock;  ///< defaults to steady_clock_seconds()
};

struct Backends {
  const ReasonerBackend& reasoner;
  const AttentionBackend& attention;
  const PlannerBackend* planner = nullptr;
};

/// True when `entries` (the record so far) meets the stagnation rule: the
/// last k entries each improved on the best earlier score by at most delta
/// and each left the state hash unchanged from its predecessor. The first
/// entry never counts.
bool stagnated(std::span<const StepEntry> entries, const HaltConfig& halt);

/// Grounded execution loop. At step t the mask is compiled against s_t, the
/// reasoner proposes an action from (s_t, plan step, feedback so far), the
/// action is executed, attention over s_t is scored against the mask and the
/// verifier line is appended to the feedback. Backend failures end the
/// trajectory with halt_reason = backend_error.
TrajectoryRecord run_trajectory(std::string_view question, const Table& table, const Plan& plan,
                                const Backends& backends, const ControllerOptions& options = {});

/// Asks the planner for a plan, parses it against the schema and runs the
/// trajectory. Throws InvalidArgument when no planner is given.
TrajectoryRecord run_pipeline(std::string_view question, const Table& table, const Backends& backends,
                              const ControllerOptions& options = {});

std::string format_feedback(std::size_t step, double score, std::string_view rationale);

nlohmann::json step_to_json(const StepEntry& entry);
nlohmann::json trajectory_to_json(const TrajectoryRecord& record);

}  // namespace tabground
