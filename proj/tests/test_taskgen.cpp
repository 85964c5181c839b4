#include <doctest.h>

#include <filesystem>
#include <set>

#include "cateval/corpus.hpp"
#include "cateval/errors.hpp"
#include "cateval/pairgen.hpp"
#include "cateval/taskgen.hpp"

using namespace cateval;
using namespace cateval::taskgen;

namespace {

std::filesystem::path fixture(const char* name) {
  return std::filesystem::path(CATEVAL_FIXTURE_DIR) / name;
}

std::vector<corpus::CodeObject> stripped_java_mini() {
  corpus::DatasetDescriptor desc;
  desc.name = corpus::DatasetName::HumanEvalX;
  desc.language = "java";
  auto loaded = corpus::load_dataset(desc, fixture("humaneval_java_mini.jsonl"));
  std::vector<corpus::CodeObject> out;
  for (const auto& obj : loaded.objects) out.push_back(corpus::strip_comments(obj));
  return out;
}

PromptTemplate tpl_for(TaskKind kind) {
  for (const auto& t : builtin_templates())
    if (t.task_kind == kind) return t;
  FAIL("no builtin template");
  return {};
}

}  // namespace

TEST_CASE("taskgen: builtin templates validate") {
  for (const auto& tpl : builtin_templates()) CHECK_NOTHROW(validate_template(tpl));
}

TEST_CASE("taskgen: the shipped prompt file matches the builtin set") {
  auto prompts = load_prompt_file(std::filesystem::path(CATEVAL_FIXTURE_DIR) /
                                  "../../prompts/templates.jsonl");
  REQUIRE(prompts.size() == builtin_templates().size());
  for (const auto& tpl : prompts) CHECK_NOTHROW(validate_template(tpl));
  CHECK_NOTHROW(find_template(prompts, "default-identify-v1"));
  CHECK_THROWS_AS(find_template(prompts, "missing-id"), ConfigError);
}

TEST_CASE("taskgen: placeholder mismatch is a fatal configuration error") {
  PromptTemplate bad;
  bad.id = "bad";
  bad.task_kind = TaskKind::Translation;
  bad.text = "Translate {code} now.";  // missing the language placeholders
  bad.answer_protocol = AnswerProtocol::code_block;
  CHECK_THROWS_AS(validate_template(bad), ConfigError);

  PromptTemplate extra;
  extra.id = "extra";
  extra.task_kind = TaskKind::Explanation;
  extra.text = "Explain {code} in {target_language}.";
  extra.answer_protocol = AnswerProtocol::free_text;
  CHECK_THROWS_AS(validate_template(extra), ConfigError);
}

TEST_CASE("taskgen: identification instances embed both codes and demand True/False") {
  auto objects = stripped_java_mini();
  auto built = pairgen::build_local_pairs(objects, 31);
  auto tasks = build_identification_tasks(built.pairs, tpl_for(TaskKind::MorphismIdentification));
  REQUIRE(tasks.size() == built.pairs.size());

  for (std::size_t i = 0; i < tasks.size(); ++i) {
    const auto& t = tasks[i];
    CHECK(t.kind == TaskKind::MorphismIdentification);
    CHECK(t.expected == AnswerProtocol::boolean_verdict);
    CHECK(t.rendered_input.find(built.pairs[i].left.source) != std::string::npos);
    CHECK(t.rendered_input.find(built.pairs[i].right.source) != std::string::npos);
    CHECK(t.rendered_input.find("\"True\" or \"False\"") != std::string::npos);
    CHECK(t.source_refs.size() == 2);
  }

  // empty input -> empty output
  CHECK(build_identification_tasks({}, tpl_for(TaskKind::MorphismIdentification)).empty());
}

TEST_CASE("taskgen: rendering is deterministic and distinct per payload") {
  auto objects = stripped_java_mini();
  auto built = pairgen::build_local_pairs(objects, 31);
  auto tpl = tpl_for(TaskKind::MorphismIdentification);
  auto a = build_identification_tasks(built.pairs, tpl);
  auto b = build_identification_tasks(built.pairs, tpl);
  REQUIRE(a.size() == b.size());
  std::set<std::string> rendered, ids;
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].rendered_input == b[i].rendered_input);
    rendered.insert(a[i].rendered_input);
    ids.insert(a[i].id);
  }
  CHECK(rendered.size() == a.size());
  CHECK(ids.size() == a.size());
}

TEST_CASE("taskgen: translation instances carry only prompt text and bare code") {
  auto objects = stripped_java_mini();
  auto tasks = build_translation_tasks(objects, "java", "python",
                                       tpl_for(TaskKind::Translation));
  REQUIRE(tasks.size() == objects.size());
  for (const auto& t : tasks) {
    CHECK(t.target_language == "python");
    CHECK(t.rendered_input.find("Translate the below java code to python code") !=
          std::string::npos);
    // the dataset docstrings must not leak into the model input
    CHECK(t.rendered_input.find("Sum the first n entries") == std::string::npos);
    CHECK(t.rendered_input.find("/**") == std::string::npos);
  }
}

TEST_CASE("taskgen: identity translation configuration is legal") {
  auto objects = stripped_java_mini();
  auto tasks = build_translation_tasks(objects, "java", "java",
                                       tpl_for(TaskKind::Translation));
  CHECK(tasks.size() == objects.size());
  CHECK(tasks[0].target_language == "java");
}

TEST_CASE("taskgen: translation rejects objects in the wrong language") {
  auto objects = stripped_java_mini();
  objects[0].language = "python";
  CHECK_THROWS_AS(
      build_translation_tasks(objects, "java", "python", tpl_for(TaskKind::Translation)),
      ConfigError);
}

TEST_CASE("taskgen: explanation and reproduction phases") {
  auto objects = stripped_java_mini();
  auto explain = build_explanation_tasks(objects, tpl_for(TaskKind::Explanation));
  REQUIRE(explain.size() == objects.size());
  for (const auto& t : explain) {
    CHECK(t.phase == Phase::explain_phase);
    CHECK(t.expected == AnswerProtocol::free_text);
    // tests never shown to the model
    CHECK(t.rendered_input.find("class Main") == std::string::npos);
  }

  std::vector<ExplanationText> explanations;
  for (const auto& obj : objects) explanations.push_back({obj.task_id, obj.source});
  explanations[2].text = "   \n";  // degenerate explanation

  auto build = build_reproduction_tasks(explanations, "java", tpl_for(TaskKind::Reproduction));
  CHECK(build.tasks.size() == objects.size() - 1);
  REQUIRE(build.skipped.size() == 1);
  CHECK(build.skipped[0] == objects[2].task_id);

  for (const auto& t : build.tasks) {
    CHECK(t.phase == Phase::reproduce_phase);
    CHECK(t.source_refs.size() == 2);
    CHECK(t.source_refs[1].rfind("explain:", 0) == 0);
  }
  // oracle round trip: code-as-explanation puts the source in the prompt
  CHECK(build.tasks[0].rendered_input.find(objects[0].source) != std::string::npos);
}

TEST_CASE("taskgen: task serialization round trip") {
  auto objects = stripped_java_mini();
  auto tasks = build_translation_tasks(objects, "java", "javascript",
                                       tpl_for(TaskKind::Translation));
  auto tmp = std::filesystem::temp_directory_path() / "cateval-tasks.jsonl";
  write_tasks(tmp, tasks, json{{"stage", "test"}});
  auto back = read_tasks(tmp);
  REQUIRE(back.size() == tasks.size());
  for (std::size_t i = 0; i < back.size(); ++i) {
    CHECK(back[i].id == tasks[i].id);
    CHECK(back[i].rendered_input == tasks[i].rendered_input);
    CHECK(back[i].target_language == tasks[i].target_language);
    CHECK(back[i].payload == tasks[i].payload);
  }
  std::filesystem::remove(tmp);
}
