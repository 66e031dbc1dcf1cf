#include "proofloop/gateway/scripted_backend.hpp"

#include <algorithm>
#include <fstream>
#include <regex>
#include <sstream>

#include "proofloop/core/digest.hpp"
#include "proofloop/core/errors.hpp"

using nlohmann::json;

namespace proofloop::gateway {

std::int64_t approx_tokens(std::string_view text) {
  return static_cast<std::int64_t>((text.size() + 3) / 4);
}

bool ScriptRule::matches(const ModelRequest& request) const {
  if (role && *role != request.role) return false;
  for (const auto& needle : contains) {
    if (request.prompt.find(needle) == std::string::npos) return false;
  }
  for (const auto& needle : excludes) {
    if (request.prompt.find(needle) != std::string::npos) return false;
  }
  if (lane_regex && !std::regex_search(request.lane, std::regex(*lane_regex))) return false;
  return true;
}

Script& Script::on(Role role, std::vector<std::string> contains,
                   std::vector<std::string> responses, std::vector<std::string> excludes) {
  ScriptRule rule;
  rule.role = role;
  rule.contains = std::move(contains);
  rule.excludes = std::move(excludes);
  for (auto& text : responses) rule.responses.push_back({std::move(text), {}, {}, 0, false});
  rules.push_back(std::move(rule));
  return *this;
}

Script& Script::on_any(std::vector<std::string> contains, std::vector<std::string> responses) {
  ScriptRule rule;
  rule.contains = std::move(contains);
  for (auto& text : responses) rule.responses.push_back({std::move(text), {}, {}, 0, false});
  rules.push_back(std::move(rule));
  return *this;
}

json Script::to_json() const {
  json rules_json = json::array();
  for (const auto& r : rules) {
    json responses = json::array();
    for (const auto& resp : r.responses) {
      json rj{{"text", resp.text}};
      if (resp.input_tokens) rj["input_tokens"] = *resp.input_tokens;
      if (resp.output_tokens) rj["output_tokens"] = *resp.output_tokens;
      if (resp.thinking_tokens) rj["thinking_tokens"] = resp.thinking_tokens;
      if (resp.fail) rj["fail"] = true;
      responses.push_back(std::move(rj));
    }
    json rule{{"responses", responses}};
    if (!r.name.empty()) rule["name"] = r.name;
    if (r.role) rule["role"] = std::string(proofloop::to_string(*r.role));
    if (!r.contains.empty()) rule["contains"] = r.contains;
    if (!r.excludes.empty()) rule["excludes"] = r.excludes;
    if (r.lane_regex) rule["lane_regex"] = *r.lane_regex;
    if (r.scope == CursorScope::global) rule["scope"] = "global";
    rules_json.push_back(std::move(rule));
  }
  return json{{"version", kVersion}, {"backend_id", backend_id}, {"rules", rules_json}};
}

Script Script::from_json(const json& j) {
  Script s;
  int version = j.value("version", kVersion);
  if (version > kVersion) {
    throw VersionError("script version " + std::to_string(version) + " is newer than supported " +
                       std::to_string(kVersion));
  }
  s.backend_id = j.value("backend_id", "scripted");
  for (const auto& rj : j.at("rules")) {
    ScriptRule r;
    r.name = rj.value("name", "");
    if (rj.contains("role")) r.role = role_from_string(rj.at("role").get<std::string>());
    r.contains = rj.value("contains", std::vector<std::string>{});
    r.excludes = rj.value("excludes", std::vector<std::string>{});
    if (rj.contains("lane_regex")) r.lane_regex = rj.at("lane_regex").get<std::string>();
    r.scope = rj.value("scope", "lane") == "global" ? CursorScope::global : CursorScope::lane;
    for (const auto& resp : rj.at("responses")) {
      ScriptedResponse sr;
      if (resp.is_string()) {
        sr.text = resp.get<std::string>();
      } else {
        sr.text = resp.value("text", "");
        if (resp.contains("input_tokens")) sr.input_tokens = resp.at("input_tokens").get<std::int64_t>();
        if (resp.contains("output_tokens")) sr.output_tokens = resp.at("output_tokens").get<std::int64_t>();
        sr.thinking_tokens = resp.value("thinking_tokens", std::int64_t{0});
        sr.fail = resp.value("fail", false);
      }
      r.responses.push_back(std::move(sr));
    }
    if (r.responses.empty()) {
      throw SchemaError("script rule '" + r.name + "' has no responses");
    }
    s.rules.push_back(std::move(r));
  }
  return s;
}

Script Script::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InvalidArgument("cannot open script: " + path.string());
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw ParseError("script " + path.string() + ": " + e.what());
  }
  return from_json(j);
}

void Script::save(const std::filesystem::path& path) const {
  std::ofstream out(path);
  if (!out) throw InvalidArgument("cannot write script: " + path.string());
  out << to_json().dump(2) << "\n";
}

std::string Script::digest() const { return short_digest(to_json().dump()); }

ScriptedBackend::ScriptedBackend(Script script) : script_(std::move(script)) {
  for (const auto& rule : script_.rules) {
    for (const auto& r : rule.responses) {
      if (r.input_tokens) max_pinned_input_ = std::max(max_pinned_input_, *r.input_tokens);
    }
  }
}

std::int64_t ScriptedBackend::estimate_input_tokens(std::string_view prompt) const {
  return std::max(approx_tokens(prompt), max_pinned_input_);
}

ModelResponse ScriptedBackend::generate(const ModelRequest& request) {
  const ScriptedResponse* chosen = nullptr;
  {
    std::lock_guard lock(mu_);
    ++calls_;
    for (std::size_t i = 0; i < script_.rules.size(); ++i) {
      const auto& rule = script_.rules[i];
      if (!rule.matches(request)) continue;
      std::string key = rule.scope == CursorScope::lane ? request.run_id + "|" + request.lane : "";
      std::size_t& cursor = cursors_[{i, key}];
      chosen = &rule.responses[std::min(cursor, rule.responses.size() - 1)];
      ++cursor;
      break;
    }
  }
  if (!chosen) {
    throw BackendFailure("no scripted rule matches role=" + std::string(proofloop::to_string(request.role)) +
                         " lane=" + request.lane);
  }
  if (chosen->fail) throw TransientBackendError("scripted transient failure");

  ModelResponse resp;
  resp.text = chosen->text;
  resp.backend_id = script_.backend_id;
  resp.usage.input_tokens = chosen->input_tokens.value_or(approx_tokens(request.prompt));
  std::int64_t out = chosen->output_tokens.value_or(approx_tokens(chosen->text));
  std::int64_t thinking = std::min(chosen->thinking_tokens, request.max_output_tokens);
  resp.usage.thinking_tokens = thinking;
  resp.usage.output_tokens = std::min(out, request.max_output_tokens - thinking);
  return resp;
}

json ScriptedBackend::snapshot() const {
  std::lock_guard lock(mu_);
  json cursors = json::array();
  for (const auto& [key, pos] : cursors_) {
    cursors.push_back(json{{"rule", key.first}, {"key", key.second}, {"pos", pos}});
  }
  return json{{"cursors", cursors}};
}

void ScriptedBackend::restore(const json& state) {
  std::lock_guard lock(mu_);
  cursors_.clear();
  for (const auto& c : state.value("cursors", json::array())) {
    cursors_[{c.at("rule").get<std::size_t>(), c.at("key").get<std::string>()}] =
        c.at("pos").get<std::size_t>();
  }
}

std::size_t ScriptedBackend::calls() const {
  std::lock_guard lock(mu_);
  return calls_;
}

}  // namespace proofloop::gateway
