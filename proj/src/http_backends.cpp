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

#include "tabground/http_backends.hpp"

#include <sstream>

#include <httplib.h>

#include "tabground/text.hpp"

namespace tabground {

namespace {

constexpr std::string_view kReasonerSystem =
    "You execute one table operation per turn. Reply with exactly one JSON object and nothing else.\n"
    "Forms:\n"
    "{\"tool\": \"filter\", \"args\": {\"column\": C, \"op\": \"=|!=|<|<=|>|>=|contains\", \"value\": V}}\n"
    "{\"tool\": \"sort\", \"args\": {\"column\": C, \"direction\": \"asc|desc\"}}\n"
    "{\"tool\": \"aggregate\", \"args\": {\"kind\": \"sum|count|average|min|max\", \"column\": C}}\n"
    "{\"tool\": \"lookup\", \"args\": {\"column\": C, \"row\": N}}\n"
    "{\"tool\": \"compare\", \"args\": {\"left\": {\"column\": C, \"row\": N}, \"right\": {\"column\": C, \"row\": N}}}\n"
    "{\"tool\": \"select\", \"args\": {\"columns\": [C, ...]}}\n"
    "{\"tool\": \"f_final_answer\", \"args\": {\"answer\": A}}\n"
    "Rows are 0-based.";

constexpr std::string_view kPlannerSystem =
    "Write a numbered plan for answering the question over the table. Each line starts with one of "
    "filter, sort, aggregate, lookup, compare, select, followed by a short description and a tag "
    "[target: Column] or [target: Column, row N] naming the cells the step will consult.";

httplib::Client make_client(const HttpClientConfig& config) {
  httplib::Client client(config.origin);
  const auto secs = std::chrono::duration_cast<std::chrono::seconds>(config.timeout);
  const auto usecs = std::chrono::duration_cast<std::chrono::microseconds>(config.timeout - secs);
  client.set_connection_timeout(secs.count(), usecs.count());
  client.set_read_timeout(secs.count(), usecs.count());
  client.set_write_timeout(secs.count(), usecs.count());
  if (!config.api_key.empty()) client.set_bearer_token_auth(config.api_key);
  return client;
}

}  // namespace

HttpClientConfig HttpClientConfig::from(const BackendSpec& spec) {
  HttpClientConfig config;
  config.model = spec.model;
  config.api_key = spec.api_key;
  config.timeout = spec.timeout;
  const std::string_view scheme = "http://";
  std::string_view url = spec.endpoint;
  if (!url.starts_with(scheme)) throw InvalidArgument("endpoint must start with http://: " + spec.endpoint);
  const auto slash = url.find('/', scheme.size());
  config.origin = std::string(url.substr(0, slash));
  if (slash != std::string_view::npos) {
    std::string_view prefix = url.substr(slash);
    while (prefix.ends_with('/')) prefix.remove_suffix(1);
    config.path_prefix = std::string(prefix);
  }
  if (config.origin.size() == scheme.size()) throw InvalidArgument("endpoint has no host: " + spec.endpoint);
  return config;
}

std::string HttpClientConfig::chat_path() const {
  return (path_prefix.empty() ? std::string("/v1") : path_prefix) + "/chat/completions";
}

nlohmann::json post_json(const HttpClientConfig& config, const std::string& path, const nlohmann::json& body) {
  auto client = make_client(config);
  auto res = client.Post(path, body.dump(), "application/json");
  if (!res) throw BackendError("POST " + config.origin + path + " failed: " + httplib::to_string(res.error()));
  if (res->status < 200 || res->status >= 300) {
    throw BackendError("POST " + config.origin + path + " returned HTTP " + std::to_string(res->status));
  }
  try {
    return nlohmann::json::parse(res->body);
  } catch (const nlohmann::json::parse_error& e) {
    throw BackendError(std::string("reply is not JSON: ") + e.what());
  }
}

std::string chat_complete(const HttpClientConfig& config, const std::vector<ChatMessage>& messages) {
  nlohmann::json body = {{"model", config.model}, {"temperature", 0}, {"messages", nlohmann::json::array()}};
  for (const auto& m : messages) body["messages"].push_back({{"role", m.role}, {"content", m.content}});
  const nlohmann::json reply = post_json(config, config.chat_path(), body);
  try {
    return reply.at("choices").at(0).at("message").at("content").get<std::string>();
  } catch (const nlohmann::json::exception&) {
    throw BackendError("chat reply lacks choices[0].message.content");
  }
}

ToolCall parse_tool_call_reply(std::string_view content) {
  std::string_view body = trim(content);
  if (body.starts_with("```")) {
    const auto first_newline = body.find('\n');
    const auto closing = body.rfind("```");
    if (first_newline == std::string_view::npos || closing <= first_newline) {
      throw InvalidToolCall("unterminated code fence");
    }
    body = trim(body.substr(first_newline + 1, closing - first_newline - 1));
  }
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(body);
  } catch (const nlohmann::json::parse_error& e) {
    throw InvalidToolCall(std::string("reply is not JSON: ") + e.what());
  }
  return tool_call_from_json(j);
}

std::vector<ChatMessage> reasoner_messages(const ReasonerRequest& request) {
  std::ostringstream user;
  user << "Question: " << request.question << "\n\nCurrent table:\n"
       << serialize(request.state.table).text << "\n\nPlan:\n"
       << render_plan(request.plan) << "\n\n";
  if (request.step != nullptr) {
    Plan current{{*request.step}, {}};
    user << "Current step: " << render_plan(current) << "\n";
  } else {
    user << "The plan is exhausted; answer if you can.\n";
  }
  for (const auto& line : request.feedback) user << line << "\n";
  return {{"system", std::string(kReasonerSystem)}, {"user", user.str()}};
}

ToolCall HttpReasoner::next_action(const ReasonerRequest& request) const {
  return parse_tool_call_reply(chat_complete(config_, reasoner_messages(request)));
}

CellAttention HttpAttention::attend(const AttentionRequest& request) const {
  const nlohmann::json body = {{"model", config_.model},
                               {"id", request.record_id},
                               {"question", request.question},
                               {"table", request.serialized.text},
                               {"step", request.step_index}};
  const nlohmann::json reply = post_json(config_, config_.path_prefix + "/attention", body);
  try {
    return attention_from_json(reply, request.serialized.index);
  } catch (const nlohmann::json::exception& e) {
    throw BackendError(std::string("bad attention payload: ") + e.what());
  }
}

std::string HttpPlanner::plan(std::string_view question, const Table& table) const {
  const std::string user = "Question: " + std::string(question) + "\n\nTable:\n" + serialize(table).text;
  return chat_complete(config_, {{"system", std::string(kPlannerSystem)}, {"user", user}});
}

}  // namespace tabground
