#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <map>

#include "cateval/corpus.hpp"
#include "cateval/errors.hpp"
#include "cateval/java_lexer.hpp"
#include "cateval/java_tree.hpp"
#include "cateval/toolchain.hpp"

using namespace cateval;
using namespace cateval::corpus;

namespace {

std::filesystem::path fixture(const char* name) {
  return std::filesystem::path(CATEVAL_FIXTURE_DIR) / name;
}

LoadResult load_java_mini() {
  DatasetDescriptor desc;
  desc.name = DatasetName::HumanEvalX;
  desc.language = "java";
  return load_dataset(desc, fixture("humaneval_java_mini.jsonl"));
}

}  // namespace

TEST_CASE("corpus: dataset names parse and reject unknowns") {
  CHECK(dataset_from_string("HumanEval-X") == DatasetName::HumanEvalX);
  CHECK(dataset_from_string("mbxp") == DatasetName::MBXP);
  CHECK(dataset_from_string("code_contests") == DatasetName::CodeContest);
  CHECK_THROWS_AS(dataset_from_string("nope"), ConfigError);
}

TEST_CASE("corpus: load assembles full units and parses entry points") {
  auto loaded = load_java_mini();
  CHECK(loaded.errors.empty());
  REQUIRE(loaded.objects.size() == 12);

  const CodeObject& first = loaded.objects[0];
  CHECK(first.task_id == "Java/0");
  CHECK(first.language == "java");
  CHECK(first.entry_point == "sumBelow");  // parsed, not present in the record
  CHECK(first.source.find("public class Solution") != std::string::npos);
  CHECK(first.source.find("return total;") != std::string::npos);
  CHECK(first.tests.present);
  CHECK(first.tests.case_count > 0);
  CHECK(first.tests.script.find("class Main") != std::string::npos);

  // every object is a parseable single-function unit
  for (const auto& obj : loaded.objects) {
    auto unit = java::parse_unit(obj.source);
    int fns = 0;
    for (const auto& m : unit.methods)
      if (!m.is_constructor) ++fns;
    CHECK(fns == 1);
  }
}

TEST_CASE("corpus: empty input file gives an empty list") {
  auto tmp = std::filesystem::temp_directory_path() / "cateval-empty.jsonl";
  { std::ofstream out(tmp); }
  DatasetDescriptor desc;
  auto loaded = load_dataset(desc, tmp);
  CHECK(loaded.objects.empty());
  CHECK(loaded.errors.empty());
  std::filesystem::remove(tmp);
}

TEST_CASE("corpus: malformed records are collected, load continues") {
  DatasetDescriptor desc;
  desc.name = DatasetName::HumanEvalX;
  auto loaded = load_dataset(desc, fixture("malformed.jsonl"));
  CHECK(loaded.objects.size() == 2);
  CHECK(loaded.errors.size() == 2);  // bad json line + missing-fields record
}

TEST_CASE("corpus: missing path is a fatal environment error") {
  DatasetDescriptor desc;
  CHECK_THROWS_AS(load_dataset(desc, fixture("does_not_exist.jsonl")), EnvironmentError);
}

TEST_CASE("corpus: code contest records expand per solution with verdicts") {
  DatasetDescriptor desc;
  desc.name = DatasetName::CodeContest;
  desc.language = "python";
  auto loaded = load_dataset(desc, fixture("code_contest_mini.jsonl"));

  int add_two = 0, correct = 0, incorrect = 0;
  bool saw_java = false;
  for (const auto& obj : loaded.objects) {
    if (obj.problem_id == "1000_A. Add Two") {
      ++add_two;
      if (obj.language == "java") saw_java = true;
    }
    if (obj.verdict == SolutionVerdict::correct) ++correct;
    if (obj.verdict == SolutionVerdict::incorrect) ++incorrect;
    CHECK(!obj.tests.present);
    CHECK(!obj.problem_id.empty());
  }
  CHECK(add_two == 5);  // 3 correct (2 py + 1 java) + 2 incorrect
  CHECK(saw_java);
  CHECK(correct > 0);
  CHECK(incorrect > 0);
}

TEST_CASE("corpus: contest default rules keep only short solutions") {
  DatasetDescriptor desc;
  desc.name = DatasetName::CodeContest;
  auto loaded = load_dataset(desc, fixture("code_contest_mini.jsonl"));
  auto filtered = filter_corpus(loaded.objects, default_rules(DatasetName::CodeContest));

  bool long_one_kept = false;
  for (const auto& obj : filtered.objects)
    if (obj.problem_id == "1002_C. Long Only") long_one_kept = true;
  CHECK(!long_one_kept);
  bool long_one_rejected = false;
  for (const auto& r : filtered.rejected)
    if (r.reason.rfind("length>", 0) == 0) long_one_rejected = true;
  CHECK(long_one_rejected);
}

TEST_CASE("corpus: strip_comments removes docstrings, preserves tokens") {
  DatasetDescriptor desc;
  desc.name = DatasetName::MBXP;
  desc.language = "java";
  auto loaded = load_dataset(desc, fixture("mbxp_java_mini.jsonl"));
  REQUIRE(!loaded.objects.empty());

  for (const auto& obj : loaded.objects) {
    CHECK(obj.source.find("/**") != std::string::npos);  // prompt docstring present
    CodeObject stripped = strip_comments(obj);
    CHECK(stripped.source.find("/**") == std::string::npos);
    CHECK(stripped.source.find("//") == std::string::npos);

    auto before = java::lex_code(obj.source);
    auto after = java::lex_code(stripped.source);
    REQUIRE(before.size() == after.size());
    for (std::size_t i = 0; i < before.size(); ++i)
      CHECK(java::text_of(obj.source, before[i]) ==
            java::text_of(stripped.source, after[i]));
  }
}

TEST_CASE("corpus: strip_comments raises ParseError on broken java") {
  CodeObject obj;
  obj.language = "java";
  obj.source = "class A { /* unterminated";
  CHECK_THROWS_AS(strip_comments(obj), ParseError);
}

TEST_CASE("corpus: multi-function and unparseable sources are rejected") {
  auto loaded = load_java_mini();
  CodeObject multi = loaded.objects[0];
  multi.task_id = "multi";
  multi.source =
      "class Solution { static int f() { return 1; } static int g() { return 2; } }";
  CodeObject broken = loaded.objects[1];
  broken.task_id = "broken";
  broken.source = "class Solution { static int f( { return 1; }";

  FilterRules rules;
  rules.check_compile = false;
  std::vector<CodeObject> objs = {loaded.objects[0], multi, broken};
  auto filtered = filter_corpus(objs, rules);
  REQUIRE(filtered.objects.size() == 1);
  CHECK(filtered.objects[0].task_id == "Java/0");
  REQUIRE(filtered.rejected.size() == 2);
  CHECK(filtered.rejected[0].task_id == "multi");
  CHECK(filtered.rejected[0].reason == "multiple functions");
  CHECK(filtered.rejected[1].task_id == "broken");
  CHECK(filtered.rejected[1].reason.rfind("parse error", 0) == 0);
}

TEST_CASE("corpus: filtering is idempotent") {
  auto loaded = load_java_mini();
  FilterRules rules;
  rules.check_compile = false;
  auto once = filter_corpus(loaded.objects, rules);
  auto twice = filter_corpus(once.objects, rules);
  REQUIRE(once.objects.size() == twice.objects.size());
  for (std::size_t i = 0; i < once.objects.size(); ++i)
    CHECK(once.objects[i].source == twice.objects[i].source);
  CHECK(twice.rejected.empty());
}

TEST_CASE("corpus: compile check path honours the override command") {
  auto loaded = load_java_mini();
  std::vector<CodeObject> two(loaded.objects.begin(), loaded.objects.begin() + 2);

  FilterRules accept;
  accept.compile_command = {"python3", "-c", "import sys; sys.exit(0)"};
  auto kept = filter_corpus(two, accept);
  CHECK(kept.objects.size() == 2);

  FilterRules reject;
  reject.compile_command = {"python3", "-c", "import sys; sys.exit(1)"};
  auto dropped = filter_corpus(two, reject);
  CHECK(dropped.objects.empty());
  CHECK(dropped.rejected.size() == 2);
  CHECK(dropped.rejected[0].reason == "compile error");
}

TEST_CASE("corpus: real compile check runs or fails fast by toolchain") {
  auto loaded = load_java_mini();
  std::vector<CodeObject> one(loaded.objects.begin(), loaded.objects.begin() + 1);
  FilterRules rules;  // compile check on
  if (toolchain::available("java")) {
    auto filtered = filter_corpus(one, rules);
    CHECK(filtered.objects.size() == 1);
  } else {
    CHECK_THROWS_AS(filter_corpus(one, rules), EnvironmentError);
  }
}

TEST_CASE("corpus: python sources run through the real python compile probe") {
  DatasetDescriptor desc;
  desc.name = DatasetName::HumanEvalX;
  desc.language = "python";
  auto loaded = load_dataset(desc, fixture("humaneval_python_mini.jsonl"));
  REQUIRE(loaded.objects.size() == 6);
  CHECK(loaded.objects[0].entry_point == "sum_below");

  CodeObject bad = loaded.objects[0];
  bad.task_id = "Python/broken";
  bad.source = "def broken(:\n    return 1\n";
  auto objs = loaded.objects;
  objs.push_back(bad);

  FilterRules rules;  // python3 is available in any environment we support
  auto filtered = filter_corpus(objs, rules);
  CHECK(filtered.objects.size() == 6);
  REQUIRE(filtered.rejected.size() == 1);
  CHECK(filtered.rejected[0].task_id == "Python/broken");
}

TEST_CASE("corpus: known-missing suites are flagged tests.present=false") {
  DatasetDescriptor desc;
  desc.name = DatasetName::HumanEvalX;
  FieldMap fields = default_field_map(desc.name);
  fields.tests_missing = {"Java/0"};
  auto loaded = load_dataset(desc, fixture("humaneval_java_mini.jsonl"), fields);
  CHECK(!loaded.objects[0].tests.present);
  CHECK(loaded.objects[1].tests.present);
}

TEST_CASE("corpus: problem_id grouping partitions contest objects") {
  DatasetDescriptor desc;
  desc.name = DatasetName::CodeContest;
  auto loaded = load_dataset(desc, fixture("code_contest_mini.jsonl"));
  std::map<std::string, int> groups;
  for (const auto& obj : loaded.objects) ++groups[obj.problem_id];
  CHECK(groups.size() == 5);
  for (const auto& [id, count] : groups) CHECK(count >= 1);
}

TEST_CASE("corpus: write/read round trip preserves objects") {
  auto loaded = load_java_mini();
  auto tmp = std::filesystem::temp_directory_path() / "cateval-roundtrip.jsonl";
  write_corpus(tmp, loaded.objects, json{{"stage", "test"}});
  auto back = read_corpus(tmp);
  REQUIRE(back.size() == loaded.objects.size());
  for (std::size_t i = 0; i < back.size(); ++i) {
    CHECK(back[i].task_id == loaded.objects[i].task_id);
    CHECK(back[i].source == loaded.objects[i].source);
    CHECK(back[i].tests.script == loaded.objects[i].tests.script);
    CHECK(back[i].tests.present == loaded.objects[i].tests.present);
  }
  std::filesystem::remove(tmp);
}
