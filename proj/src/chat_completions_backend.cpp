#define CPPHTTPLIB_OPENSSL_SUPPORT
#include <httplib.h>

#include <cstdlib>

#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include "fcjudge/judge_backend.hpp"

namespace fcjudge {

using json = nlohmann::json;

std::string BuildChatCompletionBody(const JudgeRequest& request) {
  const json body = {
      {"model", request.model_id},
      {"messages", json::array({{{"role", "user"}, {"content", request.prompt.body}}})},
      {"temperature", request.temperature},
      {"max_tokens", request.max_output_tokens},
  };
  return body.dump();
}

Completion InterpretChatCompletionResponse(int http_status, std::string_view body) {
  if (http_status == 429 || http_status >= 500) {
    return Completion{{}, FinishState::kTransportError, true, http_status, std::string(body.substr(0, 500))};
  }
  if (http_status != 200) {
    return Completion{{}, FinishState::kTransportError, false, http_status, std::string(body.substr(0, 500))};
  }
  json doc;
  try {
    doc = json::parse(body);
  } catch (const json::parse_error& e) {
    return Completion{{}, FinishState::kTransportError, true, http_status,
                      fmt::format("unparseable response body: {}", e.what())};
  }
  if (!doc.contains("choices") || !doc.at("choices").is_array() || doc.at("choices").empty()) {
    return Completion{{}, FinishState::kTransportError, false, http_status, "response has no choices"};
  }
  const auto& choice = doc.at("choices").at(0);
  const auto& message = choice.value("message", json::object());
  std::string text;
  if (message.contains("content") && message.at("content").is_string()) {
    text = message.at("content").get<std::string>();
  }
  const std::string finish = choice.contains("finish_reason") && choice.at("finish_reason").is_string()
                                 ? choice.at("finish_reason").get<std::string>()
                                 : "stop";
  if (message.contains("refusal") && message.at("refusal").is_string()) {
    return Completion{message.at("refusal").get<std::string>(), FinishState::kRefused, false, http_status, {}};
  }
  if (finish == "content_filter") return Completion{text, FinishState::kRefused, false, http_status, {}};
  if (finish == "length") return Completion{text, FinishState::kTruncated, false, http_status, {}};
  return Completion{text, FinishState::kComplete, false, http_status, {}};
}

ChatCompletionsBackend::ChatCompletionsBackend(ChatCompletionsConfig config) : config_(std::move(config)) {
  const char* key = std::getenv(config_.api_key_env.c_str());
  if (key == nullptr || *key == '\0') {
    throw std::runtime_error(fmt::format("credential variable {} is not set", config_.api_key_env));
  }
  api_key_ = key;
}

Completion ChatCompletionsBackend::Complete(const JudgeRequest& request) {
  // One client per call: httplib clients are not safe to share across threads.
  httplib::Client client(config_.base_url);
  client.set_connection_timeout(30);
  client.set_read_timeout(config_.timeout_seconds);
  client.set_write_timeout(config_.timeout_seconds);
  const httplib::Headers headers = {{"Authorization", "Bearer " + api_key_}};
  auto result = client.Post(config_.path, headers, BuildChatCompletionBody(request), "application/json");
  if (!result) {
    return Completion{{}, FinishState::kTransportError, true, 0,
                      fmt::format("transport failure: {}", httplib::to_string(result.error()))};
  }
  return InterpretChatCompletionResponse(result->status, result->body);
}

}  // namespace fcjudge
