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

#include <chrono>
#include <map>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "tabground/attention.hpp"
#include "tabground/engine.hpp"
#include "tabground/plan.hpp"
#include "tabground/table.hpp"

namespace tabground {

struct ReasonerRequest {
  std::string_view question;
  const TableState& state;
  const Plan& plan;
  const PlanStep* step = nullptr;          ///< nullptr once the plan is exhausted
  std::span<const std::string> feedback;   ///< verifier lines from earlier steps
};

struct AttentionRequest {
  std::string_view record_id;
  std::string_view question;
  const Table& table;
  const Serialized& serialized;
  std::size_t step_index = 0;
  /// Ground-truth designation when the caller has one. Only synthetic
  /// providers read it.
  const CellMask* reference_mask = nullptr;
};

/// Backends are shared across pipeline workers and must tolerate concurrent
/// calls. Transport failures surface as BackendError.
class ReasonerBackend {
 public:
  virtual ~ReasonerBackend() = default;
  virtual ToolCall next_action(const ReasonerRequest& request) const = 0;
};

class AttentionBackend {
 public:
  virtual ~AttentionBackend() = default;
  virtual CellAttention attend(const AttentionRequest& request) const = 0;
};

class PlannerBackend {
 public:
  virtual ~PlannerBackend() = default;
  virtual std::string plan(std::string_view question, const Table& table) const = 0;
};

/// Replays tool calls keyed by the state's step index.
class ScriptedReasoner final : public ReasonerBackend {
 public:
  explicit ScriptedReasoner(std::vector<ToolCall> calls) : calls_(std::move(calls)) {}
  ToolCall next_action(const ReasonerRequest& request) const override;

 private:
  std::vector<ToolCall> calls_;
};

/// Replays one attention matrix per step index.
class ScriptedAttention final : public AttentionBackend {
 public:
  explicit ScriptedAttention(std::vector<CellAttention> per_step) : per_step_(std::move(per_step)) {}
  CellAttention attend(const AttentionRequest& request) const override;

 private:
  std::vector<CellAttention> per_step_;
};

/// Attention payloads recorded per record id, read from JSONL lines of the
/// form {"id": str, "attention": <payload>}. A payload that is a list is
/// indexed by step.
class RecordedAttention final : public AttentionBackend {
 public:
  explicit RecordedAttention(std::map<std::string, nlohmann::json> payloads) : payloads_(std::move(payloads)) {}
  static RecordedAttention from_file(const std::string& path);
  CellAttention attend(const AttentionRequest& request) const override;

 private:
  std::map<std::string, nlohmann::json> payloads_;
};

class ScriptedPlanner final : public PlannerBackend {
 public:
  explicit ScriptedPlanner(std::string text) : text_(std::move(text)) {}
  std::string plan(std::string_view, const Table&) const override { return text_; }

 private:
  std::string text_;
};

/// Where a backend comes from. Parsed from CLI strings:
///   scripted:<name>[:<arg>]    e.g. scripted:oracle, scripted:peaked:3,
///                              scripted:file:calls.json
///   http                       endpoint/model/key from the environment
///   http:<endpoint>            endpoint given inline
struct BackendSpec {
  enum class Kind { scripted, http };

  Kind kind = Kind::scripted;
  std::string name;      ///< scripted provider name
  std::string argument;  ///< scripted provider argument (path, SNR, ...)
  std::string endpoint;
  std::string model;
  std::string api_key;
  std::chrono::milliseconds timeout{60000};

  /// Environment: TABGROUND_ENDPOINT, TABGROUND_MODEL, TABGROUND_API_KEY,
  /// TABGROUND_TIMEOUT_MS. Throws InvalidArgument on an unknown kind or an
  /// http spec without endpoint and model.
  static BackendSpec parse(std::string_view text);
};

/// Scripted names: oracle, uniform, random, peaked[:snr], file:<jsonl>.
std::unique_ptr<AttentionBackend> make_attention_backend(const BackendSpec& spec, std::uint64_t seed = 0);
/// Scripted: file:<json array of tool calls>.
std::unique_ptr<ReasonerBackend> make_reasoner_backend(const BackendSpec& spec);
/// Scripted: file:<plan text>.
std::unique_ptr<PlannerBackend> make_planner_backend(const BackendSpec& spec);

}  // namespace tabground
