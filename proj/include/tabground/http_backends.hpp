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
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "tabground/backends.hpp"

namespace tabground {

struct HttpClientConfig {
  std::string origin;       ///< scheme://host[:port]
  std::string path_prefix;  ///< e.g. "/v1", may be empty
  std::string model;
  std::string api_key;
  std::chrono::milliseconds timeout{60000};

  /// Splits spec.endpoint into origin and path prefix. Only plain http is
  /// supported; throws InvalidArgument otherwise.
  static HttpClientConfig from(const BackendSpec& spec);

  /// prefix + "/chat/completions", defaulting the prefix to "/v1".
  std::string chat_path() const;
};

struct ChatMessage {
  std::string role;
  std::string content;
};

/// POSTs {"model", "messages", "temperature": 0} to the chat-completions route
/// and returns choices[0].message.content. Throws BackendError on transport
/// failure, non-2xx status or an unexpected body.
std::string chat_complete(const HttpClientConfig& config, const std::vector<ChatMessage>& messages);

/// POSTs `body` as JSON to `path` and parses the JSON reply.
nlohmann::json post_json(const HttpClientConfig& config, const std::string& path, const nlohmann::json& body);

/// Reads one tool call from assistant content. A single surrounding code
/// fence is tolerated; anything else that is not one JSON object in the wire
/// form throws InvalidToolCall.
ToolCall parse_tool_call_reply(std::string_view content);

/// Messages sent to the reasoner for one step.
std::vector<ChatMessage> reasoner_messages(const ReasonerRequest& request);

class HttpReasoner final : public ReasonerBackend {
 public:
  explicit HttpReasoner(HttpClientConfig config) : config_(std::move(config)) {}
  ToolCall next_action(const ReasonerRequest& request) const override;

 private:
  HttpClientConfig config_;
};

/// POSTs {"model", "id", "question", "table", "step"} to prefix + "/attention";
/// the reply is an attention payload.
class HttpAttention final : public AttentionBackend {
 public:
  explicit HttpAttention(HttpClientConfig config) : config_(std::move(config)) {}
  CellAttention attend(const AttentionRequest& request) const override;

 private:
  HttpClientConfig config_;
};

class HttpPlanner final : public PlannerBackend {
 public:
  explicit HttpPlanner(HttpClientConfig config) : config_(std::move(config)) {}
  std::string plan(std::string_view question, const Table& table) const override;

 private:
  HttpClientConfig config_;
};

}  // namespace tabground
