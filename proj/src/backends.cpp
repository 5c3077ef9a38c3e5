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

#include "tabground/backends.hpp"

#include <cstdlib>
#include <fstream>
#include <sstream>

#include "tabground/http_backends.hpp"
#include "tabground/standards.hpp"
#include "tabground/synthetic.hpp"
#include "tabground/text.hpp"

namespace tabground {

namespace {

std::string env_or(const char* name, std::string fallback) {
  const char* value = std::getenv(name);
  return value != nullptr && *value != '\0' ? std::string(value) : std::move(fallback);
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

}  // namespace

ToolCall ScriptedReasoner::next_action(const ReasonerRequest& request) const {
  if (request.state.step_index >= calls_.size()) {
    throw BackendError("scripted reasoner has no action for step " + std::to_string(request.state.step_index));
  }
  return calls_[request.state.step_index];
}

CellAttention ScriptedAttention::attend(const AttentionRequest& request) const {
  if (request.step_index >= per_step_.size()) {
    throw BackendError("scripted attention has no matrix for step " + std::to_string(request.step_index));
  }
  return per_step_[request.step_index];
}

RecordedAttention RecordedAttention::from_file(const std::string& path) {
  std::map<std::string, nlohmann::json> payloads;
  for (auto& line : read_jsonl(path)) {
    if (!line.is_object() || !line.contains("id") || !line.contains("attention")) {
      throw FormatError("attention record needs \"id\" and \"attention\"");
    }
    payloads[line.at("id").get<std::string>()] = std::move(line.at("attention"));
  }
  return RecordedAttention(std::move(payloads));
}

CellAttention RecordedAttention::attend(const AttentionRequest& request) const {
  const auto it = payloads_.find(std::string(request.record_id));
  if (it == payloads_.end()) throw BackendError("no recorded attention for " + std::string(request.record_id));
  const nlohmann::json* payload = &it->second;
  if (payload->is_array()) {
    if (request.step_index >= payload->size()) {
      throw BackendError("no recorded attention for step " + std::to_string(request.step_index));
    }
    payload = &(*payload)[request.step_index];
  }
  try {
    return attention_from_json(*payload, request.serialized.index);
  } catch (const nlohmann::json::exception& e) {
    throw BackendError(std::string("bad attention payload: ") + e.what());
  }
}

BackendSpec BackendSpec::parse(std::string_view text) {
  BackendSpec spec;
  spec.endpoint = env_or("TABGROUND_ENDPOINT", "");
  spec.model = env_or("TABGROUND_MODEL", "");
  spec.api_key = env_or("TABGROUND_API_KEY", "");
  if (const auto ms = parse_number(env_or("TABGROUND_TIMEOUT_MS", "")); ms && *ms > 0) {
    spec.timeout = std::chrono::milliseconds(static_cast<long long>(*ms));
  }

  const std::string_view scripted = "scripted:";
  if (text.starts_with(scripted)) {
    const std::string_view rest = text.substr(scripted.size());
    const auto colon = rest.find(':');
    spec.kind = Kind::scripted;
    spec.name = std::string(rest.substr(0, colon));
    if (colon != std::string_view::npos) spec.argument = std::string(rest.substr(colon + 1));
    if (spec.name.empty()) throw InvalidArgument("empty scripted backend name");
    return spec;
  }
  if (text == "http" || text.starts_with("http:") || text.starts_with("https:")) {
    spec.kind = Kind::http;
    if (text.starts_with("http://") || text.starts_with("https://")) {
      spec.endpoint = std::string(text);
    } else if (text != "http") {
      spec.endpoint = std::string(text.substr(5));
    }
    if (spec.endpoint.empty()) throw InvalidArgument("http backend needs an endpoint (TABGROUND_ENDPOINT)");
    if (spec.model.empty()) throw InvalidArgument("http backend needs a model (TABGROUND_MODEL)");
    return spec;
  }
  throw InvalidArgument("unknown backend '" + std::string(text) + "'");
}

std::unique_ptr<AttentionBackend> make_attention_backend(const BackendSpec& spec, std::uint64_t seed) {
  if (spec.kind == BackendSpec::Kind::http) return std::make_unique<HttpAttention>(HttpClientConfig::from(spec));
  if (spec.name == "oracle") return std::make_unique<OracleAttention>();
  if (spec.name == "uniform") return std::make_unique<UniformAttention>();
  if (spec.name == "random") return std::make_unique<PositionalNoiseAttention>(seed);
  if (spec.name == "peaked") {
    double snr = 3.0;
    if (!spec.argument.empty()) {
      const auto v = parse_number(spec.argument);
      if (!v || *v < 0) throw InvalidArgument("peaked SNR must be a nonnegative number");
      snr = *v;
    }
    return std::make_unique<PeakedAttention>(snr, 0.5, seed);
  }
  if (spec.name == "file") return std::make_unique<RecordedAttention>(RecordedAttention::from_file(spec.argument));
  throw InvalidArgument("unknown scripted attention '" + spec.name + "'");
}

std::unique_ptr<ReasonerBackend> make_reasoner_backend(const BackendSpec& spec) {
  if (spec.kind == BackendSpec::Kind::http) return std::make_unique<HttpReasoner>(HttpClientConfig::from(spec));
  if (spec.name != "file") throw InvalidArgument("unknown scripted reasoner '" + spec.name + "'");
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(read_file(spec.argument));
  } catch (const nlohmann::json::parse_error& e) {
    throw FormatError(spec.argument + ": " + e.what());
  }
  if (!j.is_array()) throw FormatError(spec.argument + ": expected a JSON array of tool calls");
  std::vector<ToolCall> calls;
  for (const auto& item : j) calls.push_back(tool_call_from_json(item));
  return std::make_unique<ScriptedReasoner>(std::move(calls));
}

std::unique_ptr<PlannerBackend> make_planner_backend(const BackendSpec& spec) {
  if (spec.kind == BackendSpec::Kind::http) return std::make_unique<HttpPlanner>(HttpClientConfig::from(spec));
  if (spec.name != "file") throw InvalidArgument("unknown scripted planner '" + spec.name + "'");
  return std::make_unique<ScriptedPlanner>(read_file(spec.argument));
}

}  // namespace tabground
