#include <doctest.h>

#include <filesystem>

#include "cateval/corpus.hpp"
#include "cateval/errors.hpp"
#include "cateval/harness.hpp"
#include "cateval/java_tree.hpp"
#include "cateval/jsonl.hpp"
#include "cateval/toolchain.hpp"

using namespace cateval;
using namespace cateval::harness;

namespace {

std::filesystem::path fixture(const char* name) {
  return std::filesystem::path(CATEVAL_FIXTURE_DIR) / name;
}

corpus::TestSuite suite_of(const std::string& script) {
  corpus::TestSuite suite;
  suite.script = script;
  suite.present = true;
  suite.case_count = 1;
  return suite;
}

}  // namespace

TEST_CASE("harness: verdict extraction on the spec examples") {
  CHECK(extract_boolean_verdict("t", "True, both compute the same result.").parsed ==
        ParsedVerdict::equivalent);
  CHECK(extract_boolean_verdict("t", "These are not equivalent. False.").parsed ==
        ParsedVerdict::nonequivalent);
  CHECK(extract_boolean_verdict("t", "It depends on the input.").parsed ==
        ParsedVerdict::unparseable);
}

TEST_CASE("harness: the 50-case verdict fixture parses with full agreement") {
  auto raw = read_jsonl(fixture("verdict_cases.jsonl"));
  REQUIRE(raw.records.size() == 50);
  int checked = 0;
  for (const auto& rec : raw.records) {
    std::string text = rec.at("text").get<std::string>();
    std::string label = rec.at("label").get<std::string>();
    Verdict v = extract_boolean_verdict("case", text);
    CHECK_MESSAGE(to_string(v.parsed) == label, "text: ", text);
    if (v.parsed != ParsedVerdict::unparseable) CHECK(!v.evidence.empty());
    ++checked;
  }
  CHECK(checked == 50);
}

TEST_CASE("harness: verdicts never merge and extraction is stable") {
  std::string text = "False is my answer; one might think True at first glance.";
  Verdict a = extract_boolean_verdict("t", text);
  Verdict b = extract_boolean_verdict("t", text);
  CHECK(a.parsed == b.parsed);
  CHECK(a.parsed == ParsedVerdict::nonequivalent);
  CHECK(a.evidence == b.evidence);
}

TEST_CASE("harness: code extraction prefers the language-tagged fence") {
  std::string text =
      "Here is the translation.\n```java\nint x;\n```\nAnd in python:\n"
      "```python\ndef f():\n    return 1\n```\nDone.";
  auto code = extract_code_block(text, "python");
  REQUIRE(code.has_value());
  CHECK(code->find("def f()") != std::string::npos);
  CHECK(code->find("int x") == std::string::npos);
}

TEST_CASE("harness: code extraction falls back to the first fence, then prose fails") {
  std::string text = "```\nconsole.log(1);\n```";
  auto code = extract_code_block(text, "python");
  REQUIRE(code.has_value());
  CHECK(code->find("console.log") != std::string::npos);

  CHECK(!extract_code_block("No code here, just words.", "python").has_value());
  CHECK(!extract_code_block("", "java").has_value());
}

TEST_CASE("harness: unfenced java function region parses (extraction oracle)") {
  std::string text =
      "Sure, here is the method:\n\n"
      "public static int twice(int x) {\n    return x * 2;\n}\n\n"
      "Hope that helps!";
  auto code = extract_code_block(text, "java");
  REQUIRE(code.has_value());
  // the extracted region must parse as a function (wrapped like the harness does)
  CHECK(java::parses("class Solution {\n" + *code + "\n}"));
  CHECK(code->find("Hope that helps") == std::string::npos);
}

TEST_CASE("harness: unfenced python def region is recovered") {
  std::string text =
      "The translated function:\n\ndef add(a, b):\n    total = a + b\n    return total\n\n"
      "It mirrors the original.";
  auto code = extract_code_block(text, "python");
  REQUIRE(code.has_value());
  CHECK(code->rfind("def add", 0) == 0);
  CHECK(code->find("mirrors") == std::string::npos);
}

TEST_CASE("harness: python execution statuses") {
  corpus::TestSuite suite = suite_of("assert f(2) == 4\nassert f(0) == 0\n");

  auto pass = run_execution_test("t1", "def f(x):\n    return x * 2\n", suite, "python");
  CHECK(pass.status == ExecStatus::pass);
  CHECK(pass.failure_type.empty());

  auto fail = run_execution_test("t2", "def f(x):\n    return x + 1\n", suite, "python");
  CHECK(fail.status == ExecStatus::test_failure);
  CHECK(fail.failure_type == "Test Failure");

  auto name_error =
      run_execution_test("t3", "def f(x):\n    return missing_var\n", suite, "python");
  CHECK(name_error.status == ExecStatus::runtime_error);
  CHECK(name_error.failure_type == "NameError");

  auto syntax = run_execution_test("t4", "def f(x:\n    return 1\n", suite, "python");
  CHECK(syntax.status == ExecStatus::compile_error);
  CHECK(syntax.failure_type == "SyntaxError");
}

TEST_CASE("harness: timeouts are their own status") {
  corpus::TestSuite suite = suite_of("f()\n");
  Limits limits;
  limits.run_timeout_s = 1;
  auto out = run_execution_test("t", "def f():\n    while True:\n        pass\n", suite,
                                "python", limits);
  CHECK(out.status == ExecStatus::timeout);
  CHECK(out.failure_type == "Timeout");
}

TEST_CASE("harness: javascript execution statuses") {
  corpus::TestSuite suite = suite_of(
      "const assert = require('assert');\nassert.strictEqual(f(2), 4);\n");
  auto pass = run_execution_test("t1", "function f(x) { return x * 2; }", suite,
                                 "javascript");
  CHECK(pass.status == ExecStatus::pass);

  auto ref = run_execution_test("t2", "function f(x) { return missingVar; }", suite,
                                "javascript");
  CHECK(ref.status == ExecStatus::runtime_error);
  CHECK(ref.failure_type == "ReferenceError");

  auto assert_fail = run_execution_test("t3", "function f(x) { return x; }", suite,
                                        "javascript");
  CHECK(assert_fail.status == ExecStatus::test_failure);
  CHECK(assert_fail.failure_type == "Test Failure");
}

TEST_CASE("harness: java execution path or honest environment error") {
  corpus::DatasetDescriptor desc;
  desc.name = corpus::DatasetName::HumanEvalX;
  desc.language = "java";
  auto loaded = corpus::load_dataset(desc, fixture("humaneval_java_mini.jsonl"));
  const auto& obj = loaded.objects[0];

  if (toolchain::available("java")) {
    auto out = run_execution_test(obj.task_id, obj.source, obj.tests, "java");
    CHECK(out.status == ExecStatus::pass);
  } else {
    CHECK_THROWS_AS(run_execution_test(obj.task_id, obj.source, obj.tests, "java"),
                    EnvironmentError);
  }
}

TEST_CASE("harness: classification of java compiler diagnostics") {
  NonPassExit compile{1, false, true};
  CHECK(classify_failure("java",
                         "Solution.java:5: error: cannot find symbol\n    foo();\n",
                         compile) == "CannotFindSymbol");
  CHECK(classify_failure("java",
                         "Solution.java:9: error: incompatible types: String cannot be "
                         "converted to int\n",
                         compile) == "IncompatibleTypes");
  CHECK(classify_failure("java", "Solution.java:2: error: ';' expected\n", compile) ==
        "Expected");
  CHECK(classify_failure("java", "garbled output", compile) == "CompileError");
}

TEST_CASE("harness: classification of runtime diagnostics") {
  NonPassExit run{1, false, false};
  CHECK(classify_failure("java",
                         "Exception in thread \"main\" java.lang.AssertionError: case 2\n",
                         run) == "Test Failure");
  CHECK(classify_failure(
            "java",
            "Exception in thread \"main\" java.lang.ArrayIndexOutOfBoundsException: 3\n",
            run) == "ArrayIndexOutOfBoundsException");
  CHECK(classify_failure("python",
                         "Traceback (most recent call last):\n  File \"main.py\", line 4\n"
                         "NameError: name 'x' is not defined\n",
                         run) == "NameError");
  CHECK(classify_failure("javascript", "ReferenceError: y is not defined\n", run) ==
        "ReferenceError");
  CHECK(classify_failure("python", "", run) == "Unknown");
  NonPassExit timed{-9, true, false};
  CHECK(classify_failure("python", "", timed) == "Timeout");
}

TEST_CASE("harness: canonical corpus objects pass their own suites") {
  auto objects = corpus::read_corpus(fixture("python_multisolution_mini.jsonl"));
  for (const auto& obj : objects) {
    auto passed = object_passes_own_suite(obj);
    REQUIRE(passed.has_value());
    CHECK(*passed == (obj.verdict == corpus::SolutionVerdict::correct));
  }
}

TEST_CASE("harness: absent suites and unknown languages are refused") {
  corpus::TestSuite absent;
  absent.present = false;
  CHECK_THROWS_AS(run_execution_test("t", "def f():\n    pass\n", absent, "python"),
                  ConfigError);
  corpus::TestSuite suite = suite_of("f()\n");
  CHECK_THROWS_AS(run_execution_test("t", "x", suite, "perl"), ConfigError);
}

TEST_CASE("harness: outcome serialization round trip") {
  corpus::TestSuite suite = suite_of("assert f(1) == 1\n");
  auto out = run_execution_test("t", "def f(x):\n    return x\n", suite, "python");
  auto tmp = std::filesystem::temp_directory_path() / "cateval-outcomes.jsonl";
  write_outcomes(tmp, {out}, json{{"stage", "test"}});
  auto back = read_outcomes(tmp);
  REQUIRE(back.size() == 1);
  CHECK(back[0].status == out.status);
  CHECK(back[0].task_id == out.task_id);
  std::filesystem::remove(tmp);
}
