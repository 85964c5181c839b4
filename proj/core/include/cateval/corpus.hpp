#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "cateval/jsonl.hpp"

namespace cateval::corpus {

enum class DatasetName { HumanEvalX, MBXP, MathQA, CodeContest };

std::string to_string(DatasetName name);
/// Throws ConfigError for unknown names.
DatasetName dataset_from_string(const std::string& name);

struct DatasetDescriptor {
  DatasetName name = DatasetName::HumanEvalX;
  std::string split = "test";
  std::string language = "java";
};

struct TestSuite {
  std::string script;
  int case_count = 0;
  bool present = false;
};

enum class SolutionVerdict { correct, incorrect, unknown };

/// One function-level program assembled into a standalone compilation unit,
/// with the executable test suite supplied by its dataset.
struct CodeObject {
  std::string task_id;
  std::string language;
  std::string source;       // full unit: imports + wrapper + the one function
  std::string entry_point;  // function name the suite invokes
  std::string declaration;  // extra context when the dataset separates it
  TestSuite tests;
  std::string problem_id;   // groups multiple solutions of one problem
  SolutionVerdict verdict = SolutionVerdict::unknown;
};

json to_json(const CodeObject& obj);
CodeObject code_object_from_json(const json& rec);

/// Field names used to pull a record apart, per dataset. The defaults match
/// the publicly distributed files; override via a JSON mapping file so new
/// datasets plug in without code changes.
struct FieldMap {
  std::string task_id = "task_id";
  std::string prompt = "prompt";
  std::string declaration = "declaration";
  std::string solution = "canonical_solution";
  std::string test = "test";
  std::string entry_point = "entry_point";
  /// Task ids whose suites are known-broken upstream; kept in the corpus
  /// with tests.present=false and excluded from pass@1 denominators.
  std::vector<std::string> tests_missing;
  /// Code Contest: numeric language codes worth keeping, mapped to tags.
  std::vector<std::pair<int, std::string>> contest_languages = {
      {3, "python"}, {4, "java"}};
};

FieldMap default_field_map(DatasetName name);
FieldMap field_map_from_json(const json& overrides, DatasetName name);

struct LoadResult {
  std::vector<CodeObject> objects;
  std::vector<RecordError> errors;  // record-level, load continues
};

/// Reads a newline-delimited record file into CodeObjects. Code Contest
/// records expand to one object per (correct|incorrect) solution sharing a
/// problem_id. Throws ConfigError for schema mismatches at the file level
/// and EnvironmentError when the path cannot be read.
LoadResult load_dataset(const DatasetDescriptor& desc, const std::filesystem::path& path,
                        const FieldMap& fields);
LoadResult load_dataset(const DatasetDescriptor& desc, const std::filesystem::path& path);

/// Removes comments and doc strings; all other tokens byte-identical.
/// Java sources only; other languages pass through unchanged.
CodeObject strip_comments(const CodeObject& obj);

struct FilterRules {
  bool check_parse = true;
  bool check_single_function = true;
  bool check_compile = true;
  std::optional<std::size_t> max_source_length;  // characters, Code Contest
  int compile_timeout_s = 30;
  /// Override for the compile probe (testing); empty = per-language default.
  std::vector<std::string> compile_command;
  int parallelism = 0;  // 0 = hardware concurrency
};

FilterRules default_rules(DatasetName name);

struct Rejection {
  std::string task_id;
  std::string reason;
};

struct FilterResult {
  std::vector<CodeObject> objects;   // passing subset, order preserved
  std::vector<Rejection> rejected;
};

/// Applies the configured checks. Throws EnvironmentError when a compile
/// check is requested but no toolchain for the language exists.
FilterResult filter_corpus(const std::vector<CodeObject>& objs, const FilterRules& rules);

void write_corpus(const std::filesystem::path& path, const std::vector<CodeObject>& objs,
                  const json& meta = json::object());
std::vector<CodeObject> read_corpus(const std::filesystem::path& path);

}  // namespace cateval::corpus
