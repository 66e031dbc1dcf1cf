#include "proofloop/gateway/backend_config.hpp"

#include <fstream>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "proofloop/core/errors.hpp"
#include "proofloop/gateway/scripted_backend.hpp"

namespace pt = boost::property_tree;

namespace proofloop::gateway {
namespace {

IniSections flatten(const pt::ptree& tree) {
  IniSections out;
  for (const auto& [section, body] : tree) {
    auto& keys = out[section];
    for (const auto& [key, value] : body) keys[key] = value.data();
  }
  return out;
}

std::string get_or(const std::map<std::string, std::string>& sec, const std::string& key,
                   const std::string& fallback = "") {
  auto it = sec.find(key);
  return it == sec.end() ? fallback : it->second;
}

}  // namespace

IniSections parse_ini(const std::string& text) {
  std::istringstream in(text);
  pt::ptree tree;
  try {
    pt::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ParseError(std::string("config: ") + e.what());
  }
  return flatten(tree);
}

IniSections read_ini(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InvalidArgument("cannot open config: " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  try {
    return parse_ini(buf.str());
  } catch (const ParseError& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
}

BackendConfig BackendConfig::from_ini(const IniSections& ini, const std::filesystem::path& base_dir) {
  BackendConfig cfg;
  if (auto it = ini.find("backend"); it != ini.end()) {
    const auto& b = it->second;
    cfg.kind = get_or(b, "kind", "scripted");
    cfg.http.id = get_or(b, "id");
    cfg.http.endpoint = get_or(b, "endpoint");
    cfg.http.model = get_or(b, "model");
    cfg.http.api_key_env = get_or(b, "api_key_env");
    if (auto t = get_or(b, "timeout_s"); !t.empty()) cfg.http.timeout_s = std::stoi(t);
    if (auto s = get_or(b, "script"); !s.empty()) {
      std::filesystem::path p(s);
      cfg.script = p.is_relative() && !base_dir.empty() ? base_dir / p : p;
    }
  }
  if (cfg.kind != "scripted" && cfg.kind != "http") {
    throw InvalidArgument("backend kind must be 'scripted' or 'http', got '" + cfg.kind + "'");
  }
  for (const auto& [section, keys] : ini) {
    if (section.rfind("price:", 0) != 0) continue;
    std::string id = section.substr(6);
    try {
      cfg.prices.set(id, {Rate::parse(get_or(keys, "input_usd_per_million", "0")),
                          Rate::parse(get_or(keys, "output_usd_per_million", "0"))});
    } catch (const Error& e) {
      throw InvalidArgument("[" + section + "]: " + e.what());
    }
  }
  return cfg;
}

BackendConfig BackendConfig::load(const std::filesystem::path& path) {
  return from_ini(read_ini(path), path.parent_path());
}

std::shared_ptr<Backend> make_backend(const BackendConfig& config,
                                      const std::optional<std::filesystem::path>& script_override) {
  if (script_override || config.kind == "scripted") {
    auto path = script_override ? script_override : config.script;
    if (!path) throw InvalidArgument("scripted backend needs a script file");
    return std::make_shared<ScriptedBackend>(Script::load(*path));
  }
  return std::make_shared<HttpBackend>(config.http);
}

}  // namespace proofloop::gateway
