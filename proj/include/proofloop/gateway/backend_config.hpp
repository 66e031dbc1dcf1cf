#pragma once

#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <string>

#include "proofloop/gateway/backend.hpp"
#include "proofloop/gateway/http_backend.hpp"
#include "proofloop/gateway/pricing.hpp"

namespace proofloop::gateway {

// Flattened INI contents: section name -> key -> value.
using IniSections = std::map<std::string, std::map<std::string, std::string>>;

IniSections read_ini(const std::filesystem::path& path);
IniSections parse_ini(const std::string& text);

// [backend] kind/id/endpoint/model/api_key_env/timeout_s/script plus any
// number of [price:<backend-id>] sections with input_usd_per_million and
// output_usd_per_million.
struct BackendConfig {
  std::string kind = "scripted";  // "scripted" | "http"
  HttpBackendConfig http;
  std::optional<std::filesystem::path> script;
  PriceTable prices;

  static BackendConfig from_ini(const IniSections& ini, const std::filesystem::path& base_dir = {});
  static BackendConfig load(const std::filesystem::path& path);
};

// Builds the configured backend. `script_override` replaces any script path
// from the file and forces the scripted kind.
std::shared_ptr<Backend> make_backend(const BackendConfig& config,
                                      const std::optional<std::filesystem::path>& script_override = {});

}  // namespace proofloop::gateway
