#pragma once

#include <array>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace proofloop::prompts {

enum class TemplateId {
  solver,
  solver_engineered,
  grader_council,
  grader_simplified,
  conjecture_extractor,
  solution_parser,
  answer_processor,
  conjecture_parser,
  answer_combiner,
};

inline constexpr std::array kAllTemplates{
    TemplateId::solver,           TemplateId::solver_engineered,    TemplateId::grader_council,
    TemplateId::grader_simplified, TemplateId::conjecture_extractor, TemplateId::solution_parser,
    TemplateId::answer_processor, TemplateId::conjecture_parser,    TemplateId::answer_combiner};

std::string_view to_string(TemplateId id);
TemplateId template_from_string(std::string_view s);

// Slot names a template may reference.
inline constexpr std::array<std::string_view, 6> kSlotNames{
    "problem", "solution", "solution_a", "solution_b", "additional_materials", "config_overrides"};

// Rendered in place of an absent optional slot or an empty value.
inline constexpr std::string_view kNoneProvided = "(none provided)";

using Slots = std::map<std::string, std::string>;

struct PromptTemplate {
  TemplateId id = TemplateId::solver;
  std::string body;  // slots written as @@name@@
  std::vector<std::string> required;
  std::vector<std::string> optional;

  // Slot names in order of first appearance in the body.
  std::vector<std::string> slots_in_body() const;
  // Throws MissingSlot / UnknownSlot. Substitution is single pass, so slot
  // values containing markers are copied verbatim.
  std::string render(const Slots& slots) const;
};

// Immutable set of templates loaded from a directory with a manifest.json.
class PromptRegistry {
 public:
  static PromptRegistry load(const std::filesystem::path& dir);
  // The templates shipped with the build.
  static PromptRegistry load_default();
  static std::filesystem::path default_dir();

  // Replaces one template body (user override); the slot contract stays.
  PromptRegistry with_override(TemplateId id, const std::filesystem::path& file) const;

  const PromptTemplate& get(TemplateId id) const;
  std::string render(TemplateId id, const Slots& slots) const { return get(id).render(slots); }

  // Manifest version plus a digest of every body, e.g. "v4+1a2b3c4d5e6f7a8b".
  const std::string& version() const { return version_; }

 private:
  void recompute_version();

  std::map<TemplateId, PromptTemplate> templates_;
  std::string manifest_version_;
  std::string version_;
};

}  // namespace proofloop::prompts
