#include <random>

#include <gtest/gtest.h>

#include "proofloop/core/errors.hpp"
#include "proofloop/prompts/registry.hpp"
#include "support/test_paths.hpp"

using namespace proofloop;
using namespace proofloop::prompts;

namespace {

const PromptRegistry& reg() {
  static const PromptRegistry r = PromptRegistry::load_default();
  return r;
}

std::size_t count(const std::string& hay, const std::string& needle) {
  std::size_t n = 0;
  for (auto p = hay.find(needle); p != std::string::npos; p = hay.find(needle, p + needle.size())) ++n;
  return n;
}

}  // namespace

TEST(Registry, LoadsEveryTemplate) {
  for (TemplateId id : kAllTemplates) {
    const auto& t = reg().get(id);
    EXPECT_FALSE(t.body.empty()) << to_string(id);
    for (const auto& s : t.required) {
      EXPECT_NE(t.body.find("@@" + s + "@@"), std::string::npos);
    }
  }
  EXPECT_EQ(reg().version().rfind("v4+", 0), 0u);
}

TEST(Render, SolverWithEmptyMaterials) {
  auto out = reg().render(TemplateId::solver, {{"problem", "P"}, {"additional_materials", ""}});
  EXPECT_NE(out.find("**The Problem:** P\n"), std::string::npos);
  EXPECT_NE(out.find(std::string("**Additional Materials:** ") + std::string(kNoneProvided)),
            std::string::npos);
  EXPECT_EQ(out.find("@@"), std::string::npos);
}

TEST(Render, OptionalSlotMayBeOmitted) {
  auto a = reg().render(TemplateId::solver, {{"problem", "P"}});
  auto b = reg().render(TemplateId::solver, {{"problem", "P"}, {"additional_materials", ""}});
  EXPECT_EQ(a, b);
}

TEST(Render, CombinerCarriesAllFourSlots) {
  auto out = reg().render(TemplateId::answer_combiner, {{"problem", "PROBLEM-TEXT"},
                                                        {"solution_a", "ALPHA-PROOF"},
                                                        {"solution_b", "BETA-PROOF"},
                                                        {"additional_materials", "MATERIAL-M"}});
  auto a = out.find("Solution A:");
  auto b = out.find("Solution B:");
  ASSERT_NE(a, std::string::npos);
  ASSERT_NE(b, std::string::npos);
  EXPECT_LT(a, out.find("ALPHA-PROOF"));
  EXPECT_LT(out.find("ALPHA-PROOF"), b);
  EXPECT_LT(b, out.find("BETA-PROOF"));
  EXPECT_NE(out.find("PROBLEM-TEXT"), std::string::npos);
  EXPECT_NE(out.find("MATERIAL-M"), std::string::npos);
}

TEST(Render, GraderWithoutSlotsReportsProblemMissing) {
  try {
    reg().render(TemplateId::grader_simplified, {});
    FAIL();
  } catch (const MissingSlot& e) {
    EXPECT_EQ(e.slot(), "problem");
  }
  try {
    reg().render(TemplateId::grader_council, {{"problem", "P"}});
    FAIL();
  } catch (const MissingSlot& e) {
    EXPECT_EQ(e.slot(), "solution");
  }
}

TEST(Render, UnknownSlotRejected) {
  try {
    reg().render(TemplateId::answer_processor, {{"solution", "s"}, {"problem", "p"}});
    FAIL();
  } catch (const UnknownSlot& e) {
    EXPECT_EQ(e.slot(), "problem");
  }
  EXPECT_THROW(reg().render(TemplateId::solver, {{"problem", "p"}, {"config_overrides", "x"}}), UnknownSlot);
  EXPECT_THROW(reg().render(TemplateId::solver, {{"problem", "p"}, {"nonsense", "x"}}), UnknownSlot);
}

TEST(Render, ValuesAreNotReexpanded) {
  auto out = reg().render(TemplateId::answer_processor, {{"solution", "look: @@problem@@ and $\\frac{a}{b}$"}});
  EXPECT_NE(out.find("look: @@problem@@ and $\\frac{a}{b}$"), std::string::npos);
}

TEST(Render, IsPure) {
  Slots s{{"problem", "P"}, {"solution", "S"}, {"additional_materials", "M"}};
  EXPECT_EQ(reg().render(TemplateId::grader_council, s), reg().render(TemplateId::grader_council, s));
}

// Each value shows up once per slot occurrence and sits between the literal
// text that surrounds its marker.
TEST(Render, RoundTripRecoversEveryValue) {
  std::mt19937 rng(11);
  const std::string alphabet = "abcxyz019 \n$\\{}_^()=+-*/.,;:";
  for (int trial = 0; trial < 40; ++trial) {
    for (TemplateId id : kAllTemplates) {
      const auto& t = reg().get(id);
      Slots slots;
      for (const auto* list : {&t.required, &t.optional}) {
        for (const auto& name : *list) {
          std::string v = "<<" + name + ":";
          int len = 1 + rng() % 40;
          for (int i = 0; i < len; ++i) v.push_back(alphabet[rng() % alphabet.size()]);
          slots[name] = v + ">>";
        }
      }
      auto out = t.render(slots);
      for (const auto& [name, value] : slots) {
        EXPECT_EQ(count(out, value), count(t.body, "@@" + name + "@@")) << to_string(id) << " " << name;
        auto marker = t.body.find("@@" + name + "@@");
        std::string before = t.body.substr(marker >= 20 ? marker - 20 : 0, std::min<std::size_t>(20, marker));
        if (before.find("@@") == std::string::npos) {
          EXPECT_NE(out.find(before + value), std::string::npos) << to_string(id) << " " << name;
        }
      }
    }
  }
}

TEST(Registry, OverrideKeepsSlotContract) {
  testkit::TempDir dir;
  testkit::write_file(dir / "solver.md", "Custom: @@problem@@ / @@additional_materials@@");
  auto custom = reg().with_override(TemplateId::solver, dir / "solver.md");
  EXPECT_EQ(custom.render(TemplateId::solver, {{"problem", "P"}}), "Custom: P / (none provided)");
  EXPECT_NE(custom.version(), reg().version());
  testkit::write_file(dir / "bad.md", "no slots here");
  EXPECT_THROW(reg().with_override(TemplateId::solver, dir / "bad.md"), SchemaError);
}

TEST(Registry, ManifestValidation) {
  testkit::TempDir dir;
  for (TemplateId id : kAllTemplates) {
    std::string f = std::string(to_string(id)) + ".md";
    std::filesystem::copy_file(PromptRegistry::default_dir() / f, dir / f);
  }
  testkit::write_file(dir / "manifest.json", R"({"version":"v4","templates":{}})");
  EXPECT_THROW(PromptRegistry::load(dir.path()), SchemaError);
  std::filesystem::copy_file(PromptRegistry::default_dir() / "manifest.json", dir / "manifest.json",
                             std::filesystem::copy_options::overwrite_existing);
  EXPECT_EQ(PromptRegistry::load(dir.path()).version(), reg().version());
  testkit::write_file(dir / "answer_processor.md", "Nothing to fill.");
  EXPECT_THROW(PromptRegistry::load(dir.path()), SchemaError);
}
