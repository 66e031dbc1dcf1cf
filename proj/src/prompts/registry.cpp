#include "proofloop/prompts/registry.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "proofloop/core/digest.hpp"
#include "proofloop/core/errors.hpp"

namespace proofloop::prompts {
namespace {

constexpr std::string_view kMarker = "@@";

std::string read_all(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw InvalidArgument("cannot read template: " + p.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

bool is_slot_name(std::string_view s) {
  return !s.empty() && std::all_of(s.begin(), s.end(), [](char c) { return (c >= 'a' && c <= 'z') || c == '_'; });
}

bool known_slot(std::string_view s) {
  return std::find(kSlotNames.begin(), kSlotNames.end(), s) != kSlotNames.end();
}

// Calls on_text for literal runs and on_slot for each @@name@@ occurrence.
template <typename Text, typename Slot>
void scan(std::string_view body, Text on_text, Slot on_slot) {
  std::size_t pos = 0;
  while (pos < body.size()) {
    std::size_t open = body.find(kMarker, pos);
    if (open == std::string_view::npos) break;
    std::size_t close = body.find(kMarker, open + kMarker.size());
    if (close == std::string_view::npos) break;
    std::string_view name = body.substr(open + kMarker.size(), close - open - kMarker.size());
    if (!is_slot_name(name)) {
      on_text(body.substr(pos, open + 1 - pos));
      pos = open + 1;
      continue;
    }
    on_text(body.substr(pos, open - pos));
    on_slot(name);
    pos = close + kMarker.size();
  }
  on_text(body.substr(pos));
}

}  // namespace

std::string_view to_string(TemplateId id) {
  switch (id) {
    case TemplateId::solver: return "solver";
    case TemplateId::solver_engineered: return "solver_engineered";
    case TemplateId::grader_council: return "grader_council";
    case TemplateId::grader_simplified: return "grader_simplified";
    case TemplateId::conjecture_extractor: return "conjecture_extractor";
    case TemplateId::solution_parser: return "solution_parser";
    case TemplateId::answer_processor: return "answer_processor";
    case TemplateId::conjecture_parser: return "conjecture_parser";
    case TemplateId::answer_combiner: return "answer_combiner";
  }
  return "?";
}

TemplateId template_from_string(std::string_view s) {
  for (TemplateId id : kAllTemplates) {
    if (to_string(id) == s) return id;
  }
  throw InvalidArgument("unknown template: " + std::string(s));
}

std::vector<std::string> PromptTemplate::slots_in_body() const {
  std::vector<std::string> out;
  scan(body, [](std::string_view) {}, [&](std::string_view name) {
    if (std::find(out.begin(), out.end(), name) == out.end()) out.emplace_back(name);
  });
  return out;
}

std::string PromptTemplate::render(const Slots& slots) const {
  auto declared = [&](const std::string& n) {
    return std::find(required.begin(), required.end(), n) != required.end() ||
           std::find(optional.begin(), optional.end(), n) != optional.end();
  };
  for (const auto& [name, value] : slots) {
    if (!declared(name)) throw UnknownSlot(name);
  }
  for (const auto& name : required) {
    if (!slots.count(name)) throw MissingSlot(name);
  }
  std::string out;
  out.reserve(body.size() + 1024);
  scan(body, [&](std::string_view text) { out.append(text); },
       [&](std::string_view name) {
         auto it = slots.find(std::string(name));
         if (it == slots.end() || it->second.empty()) {
           out.append(kNoneProvided);
         } else {
           out.append(it->second);
         }
       });
  return out;
}

PromptRegistry PromptRegistry::load(const std::filesystem::path& dir) {
  const auto manifest_path = dir / "manifest.json";
  nlohmann::json manifest;
  try {
    manifest = nlohmann::json::parse(read_all(manifest_path));
  } catch (const nlohmann::json::exception& e) {
    throw SchemaError(manifest_path.string() + ": " + e.what());
  }
  PromptRegistry reg;
  reg.manifest_version_ = manifest.value("version", "unversioned");
  const auto& entries = manifest.at("templates");
  for (TemplateId id : kAllTemplates) {
    const std::string key(to_string(id));
    if (!entries.contains(key)) throw SchemaError("manifest lacks template '" + key + "'");
    const auto& e = entries.at(key);
    PromptTemplate t;
    t.id = id;
    t.body = read_all(dir / e.at("file").get<std::string>());
    t.required = e.value("required", std::vector<std::string>{});
    t.optional = e.value("optional", std::vector<std::string>{});
    auto present = t.slots_in_body();
    for (const auto& name : present) {
      if (!known_slot(name)) throw SchemaError(key + ": body uses unknown slot '" + name + "'");
    }
    for (const auto* list : {&t.required, &t.optional}) {
      for (const auto& name : *list) {
        if (std::find(present.begin(), present.end(), name) == present.end()) {
          throw SchemaError(key + ": slot '" + name + "' declared but absent from body");
        }
      }
    }
    reg.templates_.emplace(id, std::move(t));
  }
  reg.recompute_version();
  return reg;
}

std::filesystem::path PromptRegistry::default_dir() {
  if (const char* env = std::getenv("PROOFLOOP_TEMPLATES"); env && *env) return env;
  return PROOFLOOP_TEMPLATE_DIR;
}

PromptRegistry PromptRegistry::load_default() { return load(default_dir()); }

PromptRegistry PromptRegistry::with_override(TemplateId id, const std::filesystem::path& file) const {
  PromptRegistry copy = *this;
  PromptTemplate& t = copy.templates_.at(id);
  t.body = read_all(file);
  auto present = t.slots_in_body();
  for (const auto& name : t.required) {
    if (std::find(present.begin(), present.end(), name) == present.end()) {
      throw SchemaError(std::string(to_string(id)) + " override lacks required slot '" + name + "'");
    }
  }
  copy.recompute_version();
  return copy;
}

const PromptTemplate& PromptRegistry::get(TemplateId id) const { return templates_.at(id); }

void PromptRegistry::recompute_version() {
  std::string all;
  for (const auto& [id, t] : templates_) {
    all.append(to_string(id));
    all.push_back('\0');
    all.append(t.body);
    all.push_back('\0');
  }
  version_ = manifest_version_ + "+" + short_digest(all);
}

}  // namespace proofloop::prompts
