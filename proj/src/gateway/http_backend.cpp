#include "proofloop/gateway/http_backend.hpp"

#include <cstdlib>
#include <regex>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "proofloop/core/errors.hpp"

using nlohmann::json;

namespace proofloop::gateway {

HttpBackend::HttpBackend(HttpBackendConfig config) : config_(std::move(config)) {
  static const std::regex url(R"(^(https?://[^/]+)(/.*)?$)");
  std::smatch m;
  if (!std::regex_match(config_.endpoint, m, url)) {
    throw InvalidArgument("backend endpoint must be an http(s) URL: " + config_.endpoint);
  }
  scheme_host_ = m[1].str();
  base_path_ = m[2].str();
  while (!base_path_.empty() && base_path_.back() == '/') base_path_.pop_back();
  if (config_.model.empty()) throw InvalidArgument("backend model must be set");
  if (config_.id.empty()) config_.id = config_.model;
}

ModelResponse parse_chat_completion(const std::string& body, const std::string& backend_id) {
  json j;
  try {
    j = json::parse(body);
  } catch (const json::exception& e) {
    throw BackendFailure(std::string("malformed completion body: ") + e.what());
  }
  ModelResponse resp;
  resp.backend_id = backend_id;
  try {
    const auto& msg = j.at("choices").at(0).at("message");
    resp.text = msg.at("content").is_null() ? "" : msg.at("content").get<std::string>();
    const auto& usage = j.at("usage");
    resp.usage.input_tokens = usage.value("prompt_tokens", std::int64_t{0});
    std::int64_t completion = usage.value("completion_tokens", std::int64_t{0});
    std::int64_t reasoning = 0;
    if (usage.contains("completion_tokens_details") && usage["completion_tokens_details"].is_object()) {
      reasoning = usage["completion_tokens_details"].value("reasoning_tokens", std::int64_t{0});
    }
    resp.usage.thinking_tokens = std::min(reasoning, completion);
    resp.usage.output_tokens = completion - resp.usage.thinking_tokens;
  } catch (const json::exception& e) {
    throw BackendFailure(std::string("unexpected completion shape: ") + e.what());
  }
  return resp;
}

ModelResponse HttpBackend::generate(const ModelRequest& request) {
  httplib::Client client(scheme_host_);
  client.set_connection_timeout(30);
  client.set_read_timeout(config_.timeout_s);
  client.set_write_timeout(60);

  httplib::Headers headers;
  if (!config_.api_key_env.empty()) {
    const char* key = std::getenv(config_.api_key_env.c_str());
    if (!key || !*key) {
      throw BackendFailure("environment variable " + config_.api_key_env + " is not set");
    }
    headers.emplace("Authorization", std::string("Bearer ") + key);
  }
  json body{{"model", config_.model},
            {"messages", json::array({json{{"role", "user"}, {"content", request.prompt}}})},
            {"temperature", request.temperature},
            {"max_tokens", request.max_output_tokens}};

  auto res = client.Post(base_path_ + "/chat/completions", headers, body.dump(), "application/json");
  if (!res) {
    throw TransientBackendError("http request failed: " + httplib::to_string(res.error()));
  }
  if (res->status == 429 || res->status >= 500) {
    throw TransientBackendError("http status " + std::to_string(res->status));
  }
  if (res->status != 200) {
    throw BackendFailure("http status " + std::to_string(res->status) + ": " + res->body.substr(0, 200));
  }
  return parse_chat_completion(res->body, config_.id);
}

}  // namespace proofloop::gateway
