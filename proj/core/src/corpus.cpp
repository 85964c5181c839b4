#include "cateval/corpus.hpp"

#include <algorithm>
#include <cctype>
#include <atomic>
#include <thread>

#include "cateval/errors.hpp"
#include "cateval/java_lexer.hpp"
#include "cateval/java_tree.hpp"
#include "cateval/lang.hpp"
#include "cateval/toolchain.hpp"

namespace cateval::corpus {

std::string to_string(DatasetName name) {
  switch (name) {
    case DatasetName::HumanEvalX: return "HumanEvalX";
    case DatasetName::MBXP: return "MBXP";
    case DatasetName::MathQA: return "MathQA";
    case DatasetName::CodeContest: return "CodeContest";
  }
  return "?";
}

DatasetName dataset_from_string(const std::string& name) {
  std::string t;
  for (char c : name)
    if (c != '-' && c != '_' && c != ' ')
      t.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
  if (t == "humanevalx" || t == "humaneval") return DatasetName::HumanEvalX;
  if (t == "mbxp" || t == "mbjp") return DatasetName::MBXP;
  if (t == "mathqa" || t == "mathqax") return DatasetName::MathQA;
  if (t == "codecontest" || t == "codecontests") return DatasetName::CodeContest;
  throw ConfigError("unknown dataset: " + name);
}

namespace {

std::string verdict_to_string(SolutionVerdict v) {
  switch (v) {
    case SolutionVerdict::correct: return "correct";
    case SolutionVerdict::incorrect: return "incorrect";
    case SolutionVerdict::unknown: return "unknown";
  }
  return "unknown";
}

SolutionVerdict verdict_from_string(const std::string& s) {
  if (s == "correct") return SolutionVerdict::correct;
  if (s == "incorrect") return SolutionVerdict::incorrect;
  return SolutionVerdict::unknown;
}

int count_test_cases(const std::string& script) {
  // Rough but stable: number of assertion-looking lines.
  int n = 0;
  std::size_t pos = 0;
  for (const char* needle : {"assert", "Assert", "ASSERT"}) {
    pos = 0;
    while ((pos = script.find(needle, pos)) != std::string::npos) {
      ++n;
      pos += 6;
    }
    if (n > 0) break;
  }
  return n;
}

std::string parsed_entry_point(const std::string& source) {
  try {
    auto unit = java::parse_unit(source);
    for (const auto& m : unit.methods)
      if (!m.is_constructor) return m.name;
  } catch (const ParseError&) {
  }
  return "";
}

}  // namespace

json to_json(const CodeObject& obj) {
  return json{{"task_id", obj.task_id},
              {"language", obj.language},
              {"source", obj.source},
              {"entry_point", obj.entry_point},
              {"declaration", obj.declaration},
              {"problem_id", obj.problem_id},
              {"verdict", verdict_to_string(obj.verdict)},
              {"tests",
               {{"script", obj.tests.script},
                {"case_count", obj.tests.case_count},
                {"present", obj.tests.present}}}};
}

CodeObject code_object_from_json(const json& rec) {
  CodeObject obj;
  obj.task_id = rec.value("task_id", "");
  obj.language = rec.value("language", "");
  obj.source = rec.value("source", "");
  obj.entry_point = rec.value("entry_point", "");
  obj.declaration = rec.value("declaration", "");
  obj.problem_id = rec.value("problem_id", "");
  obj.verdict = verdict_from_string(rec.value("verdict", "unknown"));
  if (rec.contains("tests") && rec["tests"].is_object()) {
    const auto& t = rec["tests"];
    obj.tests.script = t.value("script", "");
    obj.tests.case_count = t.value("case_count", 0);
    obj.tests.present = t.value("present", false);
  }
  return obj;
}

FieldMap default_field_map(DatasetName name) {
  FieldMap map;
  if (name == DatasetName::HumanEvalX)
    map.tests_missing = {"Java/32", "Java/38", "Java/50"};
  return map;
}

FieldMap field_map_from_json(const json& overrides, DatasetName name) {
  FieldMap map = default_field_map(name);
  if (overrides.contains("task_id")) map.task_id = overrides["task_id"];
  if (overrides.contains("prompt")) map.prompt = overrides["prompt"];
  if (overrides.contains("declaration")) map.declaration = overrides["declaration"];
  if (overrides.contains("solution")) map.solution = overrides["solution"];
  if (overrides.contains("test")) map.test = overrides["test"];
  if (overrides.contains("entry_point")) map.entry_point = overrides["entry_point"];
  if (overrides.contains("tests_missing"))
    map.tests_missing = overrides["tests_missing"].get<std::vector<std::string>>();
  if (overrides.contains("contest_languages")) {
    map.contest_languages.clear();
    for (const auto& [code, tag] : overrides["contest_languages"].items())
      map.contest_languages.emplace_back(std::stoi(code), tag.get<std::string>());
  }
  return map;
}

namespace {

/// Expands one Code Contest record into per-solution objects.
void expand_contest_record(const json& rec, const FieldMap& fields,
                           std::size_t line_no, LoadResult& out) {
  std::string problem = rec.value("name", "");
  if (problem.empty()) {
    out.errors.push_back({line_no, "contest record missing name"});
    return;
  }

  auto language_tag = [&](int code) -> std::string {
    for (const auto& [c, tag] : fields.contest_languages)
      if (c == code) return tag;
    return "";
  };

  auto expand = [&](const char* key, SolutionVerdict verdict, const char* id_mark) {
    if (!rec.contains(key) || !rec[key].is_object()) return;
    const auto& sol = rec[key];
    if (!sol.contains("language") || !sol.contains("solution")) return;
    const auto& langs = sol["language"];
    const auto& texts = sol["solution"];
    std::size_t n = std::min(langs.size(), texts.size());
    for (std::size_t i = 0; i < n; ++i) {
      std::string tag = langs[i].is_number_integer()
                            ? language_tag(langs[i].get<int>())
                            : lang::normalize(langs[i].get<std::string>()).value_or("");
      if (tag.empty()) continue;
      CodeObject obj;
      obj.problem_id = problem;
      obj.task_id = problem + "#" + id_mark + std::to_string(i);
      obj.language = tag;
      obj.source = texts[i].get<std::string>();
      obj.verdict = verdict;
      obj.tests.present = false;
      out.objects.push_back(std::move(obj));
    }
  };

  expand("solutions", SolutionVerdict::correct, "c");
  expand("incorrect_solutions", SolutionVerdict::incorrect, "i");
}

}  // namespace

LoadResult load_dataset(const DatasetDescriptor& desc, const std::filesystem::path& path,
                        const FieldMap& fields) {
  if (!std::filesystem::exists(path))
    throw EnvironmentError("dataset path does not exist: " + path.string());
  if (!lang::known(desc.language))
    throw ConfigError("language tag outside registry: " + desc.language);

  auto raw = read_jsonl(path);
  LoadResult out;
  out.errors = raw.errors;

  std::size_t line_no = 0;
  for (const auto& rec : raw.records) {
    ++line_no;
    if (desc.name == DatasetName::CodeContest) {
      expand_contest_record(rec, fields, line_no, out);
      continue;
    }
    if (!rec.contains(fields.task_id) || !rec.contains(fields.solution)) {
      out.errors.push_back({line_no, "record missing required fields"});
      continue;
    }
    CodeObject obj;
    obj.task_id = rec[fields.task_id].get<std::string>();
    obj.language = desc.language;
    obj.problem_id = obj.task_id;

    // Prefer the comment-free declaration (HumanEval-X) over the prompt as
    // the assembly prefix; MBXP-style records only carry the prompt.
    std::string prefix;
    if (rec.contains(fields.declaration) && rec[fields.declaration].is_string() &&
        !rec[fields.declaration].get<std::string>().empty())
      prefix = rec[fields.declaration].get<std::string>();
    else if (rec.contains(fields.prompt) && rec[fields.prompt].is_string())
      prefix = rec[fields.prompt].get<std::string>();
    obj.source = prefix + rec[fields.solution].get<std::string>();

    if (rec.contains(fields.entry_point) && rec[fields.entry_point].is_string())
      obj.entry_point = rec[fields.entry_point].get<std::string>();
    if (obj.entry_point.empty() && desc.language == lang::kJava)
      obj.entry_point = parsed_entry_point(obj.source);

    if (rec.contains(fields.test) && rec[fields.test].is_string()) {
      obj.tests.script = rec[fields.test].get<std::string>();
      obj.tests.present = !obj.tests.script.empty();
      obj.tests.case_count = count_test_cases(obj.tests.script);
    }
    if (std::find(fields.tests_missing.begin(), fields.tests_missing.end(),
                  obj.task_id) != fields.tests_missing.end())
      obj.tests.present = false;

    out.objects.push_back(std::move(obj));
  }
  return out;
}

LoadResult load_dataset(const DatasetDescriptor& desc, const std::filesystem::path& path) {
  return load_dataset(desc, path, default_field_map(desc.name));
}

CodeObject strip_comments(const CodeObject& obj) {
  CodeObject out = obj;
  if (obj.language == lang::kJava) out.source = java::strip_comments(obj.source);
  return out;
}

FilterRules default_rules(DatasetName name) {
  FilterRules rules;
  if (name == DatasetName::CodeContest) {
    rules.check_parse = false;
    rules.check_single_function = false;
    rules.check_compile = false;
    rules.max_source_length = 500;
  }
  return rules;
}

FilterResult filter_corpus(const std::vector<CodeObject>& objs, const FilterRules& rules) {
  FilterResult result;
  std::vector<std::string> reject_reason(objs.size());

  // Structural checks first; they are cheap and sequential.
  for (std::size_t i = 0; i < objs.size(); ++i) {
    const CodeObject& obj = objs[i];
    if (obj.source.empty()) {
      reject_reason[i] = "empty source";
      continue;
    }
    if (rules.max_source_length && obj.source.size() > *rules.max_source_length) {
      reject_reason[i] = "length>" + std::to_string(*rules.max_source_length);
      continue;
    }
    if (obj.language == lang::kJava && (rules.check_parse || rules.check_single_function)) {
      try {
        auto unit = java::parse_unit(obj.source);
        if (rules.check_single_function) {
          std::size_t fns = 0;
          for (const auto& m : unit.methods)
            if (!m.is_constructor) ++fns;
          if (fns == 0) reject_reason[i] = "no function";
          else if (fns > 1) reject_reason[i] = "multiple functions";
        }
      } catch (const ParseError& e) {
        reject_reason[i] = std::string("parse error: ") + e.what();
      }
    }
  }

  if (rules.check_compile) {
    // One probe per distinct language up front so a missing toolchain is a
    // fatal environment error, not a mass rejection.
    std::vector<std::string> languages;
    for (const auto& obj : objs)
      if (std::find(languages.begin(), languages.end(), obj.language) == languages.end())
        languages.push_back(obj.language);
    if (rules.compile_command.empty())
      for (const auto& tag : languages)
        if (!toolchain::available(tag))
          throw EnvironmentError("compile check requested but toolchain for '" + tag +
                                 "' is unavailable");

    unsigned int workers = rules.parallelism > 0
                               ? static_cast<unsigned int>(rules.parallelism)
                               : std::max(1u, std::thread::hardware_concurrency());
    std::atomic<std::size_t> next{0};
    auto work = [&]() {
      while (true) {
        std::size_t i = next.fetch_add(1);
        if (i >= objs.size()) return;
        if (!reject_reason[i].empty()) continue;
        auto check = toolchain::compile_check(objs[i].language, objs[i].source,
                                              rules.compile_timeout_s,
                                              rules.compile_command);
        if (check.timed_out) reject_reason[i] = "compile timeout";
        else if (!check.ok) reject_reason[i] = "compile error";
      }
    };
    std::vector<std::thread> pool;
    for (unsigned int w = 0; w < workers; ++w) pool.emplace_back(work);
    for (auto& t : pool) t.join();
  }

  for (std::size_t i = 0; i < objs.size(); ++i) {
    if (reject_reason[i].empty()) result.objects.push_back(objs[i]);
    else result.rejected.push_back({objs[i].task_id, reject_reason[i]});
  }
  return result;
}

void write_corpus(const std::filesystem::path& path, const std::vector<CodeObject>& objs,
                  const json& meta) {
  std::vector<json> records;
  records.reserve(objs.size() + 1);
  if (!meta.empty()) records.push_back(json{{"_meta", meta}});
  for (const auto& obj : objs) records.push_back(to_json(obj));
  write_jsonl(path, records);
}

std::vector<CodeObject> read_corpus(const std::filesystem::path& path) {
  auto raw = read_jsonl(path);
  std::vector<CodeObject> objs;
  for (const auto& rec : raw.records) {
    if (rec.contains("_meta")) continue;
    objs.push_back(code_object_from_json(rec));
  }
  return objs;
}

}  // namespace cateval::corpus
