#include "cateval/harness.hpp"

#include <unistd.h>

#include <algorithm>
#include <atomic>
#include <cctype>
#include <map>
#include <fstream>

#include "cateval/errors.hpp"
#include "cateval/java_tree.hpp"
#include "cateval/lang.hpp"
#include "cateval/subprocess.hpp"

namespace fs = std::filesystem;

namespace cateval::harness {

std::string to_string(ParsedVerdict v) {
  switch (v) {
    case ParsedVerdict::equivalent: return "equivalent";
    case ParsedVerdict::nonequivalent: return "nonequivalent";
    case ParsedVerdict::unparseable: return "unparseable";
  }
  return "?";
}

namespace {

std::string lower(const std::string& s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  return out;
}

bool word_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_';
}

/// Position of the first standalone occurrence of `word` in lowered text.
std::size_t find_word(const std::string& hay, const std::string& word,
                      std::size_t from = 0) {
  std::size_t pos = from;
  while ((pos = hay.find(word, pos)) != std::string::npos) {
    bool left_ok = pos == 0 || !word_char(hay[pos - 1]);
    std::size_t end = pos + word.size();
    bool right_ok = end >= hay.size() || !word_char(hay[end]);
    if (left_ok && right_ok) return pos;
    pos = end;
  }
  return std::string::npos;
}

std::string window(const std::string& text, std::size_t pos, std::size_t len) {
  std::size_t begin = pos > 40 ? pos - 40 : 0;
  std::size_t end = std::min(text.size(), pos + len + 40);
  return text.substr(begin, end - begin);
}

}  // namespace

Verdict extract_boolean_verdict(const std::string& task_id, const std::string& text) {
  Verdict verdict;
  verdict.task_id = task_id;

  std::string low = lower(text);
  std::size_t true_pos = find_word(low, "true");
  std::size_t false_pos = find_word(low, "false");

  if (true_pos != std::string::npos &&
      (false_pos == std::string::npos || true_pos < false_pos)) {
    verdict.parsed = ParsedVerdict::equivalent;
    verdict.evidence = window(text, true_pos, 4);
    return verdict;
  }
  if (false_pos != std::string::npos) {
    verdict.parsed = ParsedVerdict::nonequivalent;
    verdict.evidence = window(text, false_pos, 5);
    return verdict;
  }

  // no bare token: negation-adjacent equivalence phrasing
  std::size_t eq = 0;
  while ((eq = low.find("equivalent", eq)) != std::string::npos) {
    std::size_t from = eq > 24 ? eq - 24 : 0;
    std::string before = low.substr(from, eq - from);
    if (before.find("not ") != std::string::npos ||
        before.find("n't ") != std::string::npos ||
        before.find("non-") != std::string::npos ||
        (eq >= 3 && low.compare(eq - 3, 3, "non") == 0)) {
      verdict.parsed = ParsedVerdict::nonequivalent;
      verdict.evidence = window(text, eq, 10);
      return verdict;
    }
    eq += 10;
  }

  verdict.parsed = ParsedVerdict::unparseable;
  return verdict;
}

Verdict extract_boolean_verdict(const modelgw::ModelResponse& resp) {
  return extract_boolean_verdict(resp.task_id, resp.raw_text);
}

json to_json(const Verdict& v) {
  return json{{"task_id", v.task_id},
              {"parsed", to_string(v.parsed)},
              {"evidence", v.evidence}};
}

Verdict verdict_from_json(const json& rec) {
  Verdict v;
  v.task_id = rec.value("task_id", "");
  std::string p = rec.value("parsed", "unparseable");
  v.parsed = p == "equivalent"      ? ParsedVerdict::equivalent
             : p == "nonequivalent" ? ParsedVerdict::nonequivalent
                                    : ParsedVerdict::unparseable;
  v.evidence = rec.value("evidence", "");
  return v;
}

// ---------------------------------------------------------------------------
// Code extraction.

namespace {

struct Fence {
  std::string tag;
  std::string content;
};

std::vector<Fence> fenced_blocks(const std::string& text) {
  std::vector<Fence> blocks;
  std::size_t pos = 0;
  while ((pos = text.find("```", pos)) != std::string::npos) {
    std::size_t tag_end = text.find('\n', pos + 3);
    if (tag_end == std::string::npos) break;
    std::string tag = text.substr(pos + 3, tag_end - pos - 3);
    while (!tag.empty() && (tag.back() == '\r' || tag.back() == ' ')) tag.pop_back();
    std::size_t close = text.find("```", tag_end + 1);
    if (close == std::string::npos) break;
    std::string content = text.substr(tag_end + 1, close - tag_end - 1);
    blocks.push_back({lower(tag), std::move(content)});
    pos = close + 3;
  }
  return blocks;
}

bool tag_matches(const std::string& tag, const std::string& language) {
  if (language == lang::kPython)
    return tag == "python" || tag == "py" || tag == "python3";
  if (language == lang::kJavaScript)
    return tag == "javascript" || tag == "js" || tag == "node";
  if (language == lang::kJava) return tag == "java";
  return false;
}

bool balanced_quotes_and_brackets(const std::string& text) {
  int paren = 0, bracket = 0, brace = 0;
  bool in_s = false, in_d = false;
  for (std::size_t i = 0; i < text.size(); ++i) {
    char c = text[i];
    if (in_s || in_d) {
      if (c == '\\') ++i;
      else if (in_s && c == '\'') in_s = false;
      else if (in_d && c == '"') in_d = false;
      continue;
    }
    switch (c) {
      case '\'': in_s = true; break;
      case '"': in_d = true; break;
      case '(': ++paren; break;
      case ')': --paren; break;
      case '[': ++bracket; break;
      case ']': --bracket; break;
      case '{': ++brace; break;
      case '}': --brace; break;
      default: break;
    }
    if (paren < 0 || bracket < 0 || brace < 0) return false;
  }
  return paren == 0 && bracket == 0 && brace == 0 && !in_s && !in_d;
}

std::optional<std::string> bare_python_function(const std::string& text) {
  std::vector<std::string> lines;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t eol = text.find('\n', pos);
    lines.push_back(text.substr(pos, eol == std::string::npos ? eol : eol - pos));
    if (eol == std::string::npos) break;
    pos = eol + 1;
  }

  std::string best;
  for (std::size_t i = 0; i < lines.size(); ++i) {
    const std::string& l = lines[i];
    bool starter = l.rfind("def ", 0) == 0 || l.rfind("import ", 0) == 0 ||
                   l.rfind("from ", 0) == 0 || l.rfind("class ", 0) == 0 ||
                   l.rfind("@", 0) == 0;
    if (!starter) continue;
    std::string region;
    bool saw_def = l.rfind("def ", 0) == 0 || l.rfind("class ", 0) == 0;
    for (std::size_t j = i; j < lines.size(); ++j) {
      const std::string& line = lines[j];
      bool blank = line.find_first_not_of(" \t\r") == std::string::npos;
      bool indented = !line.empty() && (line[0] == ' ' || line[0] == '\t');
      bool top_starter = line.rfind("def ", 0) == 0 || line.rfind("import ", 0) == 0 ||
                         line.rfind("from ", 0) == 0 || line.rfind("class ", 0) == 0 ||
                         line.rfind("@", 0) == 0;
      if (j > i && !blank && !indented && !top_starter) break;
      if (top_starter && (line.rfind("def ", 0) == 0 || line.rfind("class ", 0) == 0))
        saw_def = true;
      region += line;
      region += "\n";
    }
    if (saw_def && balanced_quotes_and_brackets(region) && region.size() > best.size())
      best = region;
  }
  if (best.empty()) return std::nullopt;
  while (!best.empty() && best.back() == '\n') best.pop_back();
  return best + "\n";
}

std::optional<std::string> bare_brace_function(const std::string& text,
                                               const std::string& language) {
  // candidate start markers scanned in order; the longest balanced region
  // that also satisfies the language check wins
  std::vector<std::size_t> starts;
  static const char* kJsMarkers[] = {"function ", "const ", "let ", "class "};
  static const char* kJavaMarkers[] = {"public ", "private ", "protected ", "static ",
                                       "class ", "import ", "void ", "int ", "long ",
                                       "double ", "boolean ", "String "};
  if (language == lang::kJavaScript) {
    for (auto m : kJsMarkers)
      for (std::size_t p = text.find(m); p != std::string::npos; p = text.find(m, p + 1))
        if (p == 0 || text[p - 1] == '\n') starts.push_back(p);
  } else {
    for (auto m : kJavaMarkers)
      for (std::size_t p = text.find(m); p != std::string::npos; p = text.find(m, p + 1))
        if (p == 0 || text[p - 1] == '\n') starts.push_back(p);
  }
  std::sort(starts.begin(), starts.end());
  starts.erase(std::unique(starts.begin(), starts.end()), starts.end());

  std::string best;
  for (std::size_t start : starts) {
    // extend to the last position where braces balance back to zero
    int depth = 0;
    bool in_s = false, in_d = false, seen_brace = false;
    std::size_t end = std::string::npos;
    for (std::size_t i = start; i < text.size(); ++i) {
      char c = text[i];
      if (in_s || in_d) {
        if (c == '\\') ++i;
        else if (in_s && c == '\'') in_s = false;
        else if (in_d && c == '"') in_d = false;
        continue;
      }
      if (c == '\'') in_s = true;
      else if (c == '"') in_d = true;
      else if (c == '{') { ++depth; seen_brace = true; }
      else if (c == '}') {
        --depth;
        if (depth == 0 && seen_brace) end = i + 1;
        if (depth < 0) break;
      }
    }
    if (end == std::string::npos) continue;
    std::string region = text.substr(start, end - start);
    if (language == lang::kJava) {
      std::string wrapped = region.find("class ") != std::string::npos
                                ? region
                                : "class Solution {\n" + region + "\n}";
      if (!java::parses(wrapped)) continue;
    } else if (!balanced_quotes_and_brackets(region)) {
      continue;
    }
    if (region.size() > best.size()) best = region;
  }
  if (best.empty()) return std::nullopt;
  return best + "\n";
}

}  // namespace

std::optional<std::string> extract_code_block(const std::string& text,
                                              const std::string& language) {
  auto blocks = fenced_blocks(text);
  for (const auto& b : blocks)
    if (tag_matches(b.tag, language)) return b.content;
  if (!blocks.empty()) return blocks.front().content;

  if (language == lang::kPython) return bare_python_function(text);
  return bare_brace_function(text, language);
}

std::optional<std::string> extract_code_block(const modelgw::ModelResponse& resp,
                                              const std::string& language) {
  return extract_code_block(resp.raw_text, language);
}

// ---------------------------------------------------------------------------
// Execution test.

std::string to_string(ExecStatus s) {
  switch (s) {
    case ExecStatus::pass: return "pass";
    case ExecStatus::test_failure: return "test_failure";
    case ExecStatus::compile_error: return "compile_error";
    case ExecStatus::runtime_error: return "runtime_error";
    case ExecStatus::timeout: return "timeout";
    case ExecStatus::extraction_failure: return "extraction_failure";
  }
  return "?";
}

ExecStatus exec_status_from_string(const std::string& s) {
  if (s == "pass") return ExecStatus::pass;
  if (s == "test_failure") return ExecStatus::test_failure;
  if (s == "compile_error") return ExecStatus::compile_error;
  if (s == "runtime_error") return ExecStatus::runtime_error;
  if (s == "timeout") return ExecStatus::timeout;
  return ExecStatus::extraction_failure;
}

json to_json(const ExecutionOutcome& o) {
  return json{{"task_id", o.task_id},
              {"status", to_string(o.status)},
              {"failure_type", o.failure_type},
              {"stderr_digest", o.stderr_digest},
              {"duration_ms", o.duration_ms}};
}

ExecutionOutcome outcome_from_json(const json& rec) {
  ExecutionOutcome o;
  o.task_id = rec.value("task_id", "");
  o.status = exec_status_from_string(rec.value("status", "extraction_failure"));
  o.failure_type = rec.value("failure_type", "");
  o.stderr_digest = rec.value("stderr_digest", "");
  o.duration_ms = rec.value("duration_ms", 0);
  return o;
}

void write_outcomes(const std::filesystem::path& path,
                    const std::vector<ExecutionOutcome>& outcomes, const json& meta) {
  std::vector<json> records;
  if (!meta.empty()) records.push_back(json{{"_meta", meta}});
  for (const auto& o : outcomes) records.push_back(to_json(o));
  write_jsonl(path, records);
}

std::vector<ExecutionOutcome> read_outcomes(const std::filesystem::path& path) {
  auto raw = read_jsonl(path);
  std::vector<ExecutionOutcome> out;
  for (const auto& rec : raw.records) {
    if (rec.contains("_meta")) continue;
    out.push_back(outcome_from_json(rec));
  }
  return out;
}

namespace {

std::string first_diagnostic_line(const std::string& stderr_text) {
  std::size_t pos = 0;
  while (pos < stderr_text.size()) {
    std::size_t eol = stderr_text.find('\n', pos);
    std::string line = stderr_text.substr(
        pos, eol == std::string::npos ? std::string::npos : eol - pos);
    if (line.find_first_not_of(" \t\r") != std::string::npos)
      return line.substr(0, 160);
    if (eol == std::string::npos) break;
    pos = eol + 1;
  }
  return "";
}

std::string camel_case_label(const std::string& message) {
  std::string out;
  bool boundary = true;
  for (char c : message) {
    if (std::isalnum(static_cast<unsigned char>(c))) {
      out.push_back(boundary ? static_cast<char>(std::toupper(static_cast<unsigned char>(c)))
                             : c);
      boundary = false;
    } else {
      boundary = true;
    }
  }
  return out.empty() ? "CompileError" : out.substr(0, 48);
}

/// Exception-ish word ending in Error/Exception anywhere in the line.
std::string exception_name_in(const std::string& line) {
  std::size_t i = 0;
  std::string best;
  while (i < line.size()) {
    if (!word_char(line[i]) && line[i] != '.' && line[i] != '$') {
      ++i;
      continue;
    }
    std::size_t start = i;
    while (i < line.size() && (word_char(line[i]) || line[i] == '.' || line[i] == '$'))
      ++i;
    std::string token = line.substr(start, i - start);
    auto dot = token.rfind('.');
    std::string simple = dot == std::string::npos ? token : token.substr(dot + 1);
    if (simple.size() > 5 &&
        (simple.size() >= 5 && simple.compare(simple.size() - 5, 5, "Error") == 0)) {
      best = simple;
      break;
    }
    if (simple.size() > 9 && simple.compare(simple.size() - 9, 9, "Exception") == 0) {
      best = simple;
      break;
    }
  }
  return best;
}

struct TempSandbox {
  fs::path path;
  explicit TempSandbox(const std::string& hint) {
    static std::atomic<std::uint64_t> counter{0};
    path = fs::temp_directory_path() /
           ("cateval-sbx-" + std::to_string(::getpid()) + "-" +
            std::to_string(counter.fetch_add(1)) + "-" + hint);
    fs::create_directories(path);
  }
  ~TempSandbox() {
    std::error_code ec;
    fs::remove_all(path, ec);
  }
};

std::map<std::string, std::string> scrubbed_env(const fs::path& home) {
  const char* path = std::getenv("PATH");
  return {{"PATH", path ? path : "/usr/bin:/bin"},
          {"HOME", home.string()},
          {"LANG", "C.UTF-8"},
          {"LC_ALL", "C.UTF-8"}};
}

void write_file(const fs::path& p, const std::string& content) {
  std::ofstream out(p);
  out << content;
  if (!out) throw EnvironmentError("cannot write sandbox file " + p.string());
}

}  // namespace

std::string classify_failure(const std::string& language, const std::string& stderr_text,
                             const NonPassExit& exit_state) {
  if (exit_state.timed_out) return "Timeout";

  if (language == lang::kJava) {
    if (exit_state.compile_stage) {
      static const std::pair<const char*, const char*> kKnown[] = {
          {"cannot find symbol", "CannotFindSymbol"},
          {"incompatible types", "IncompatibleTypes"},
          {"method does not override", "MethodDoesNotOverride"},
          {"unreachable statement", "UnreachableStatement"},
          {"missing return statement", "MissingReturnStatement"},
      };
      auto err = stderr_text.find("error: ");
      if (err != std::string::npos) {
        std::string msg = stderr_text.substr(err + 7);
        auto eol = msg.find('\n');
        if (eol != std::string::npos) msg = msg.substr(0, eol);
        for (const auto& [needle, label] : kKnown)
          if (msg.rfind(needle, 0) == 0) return label;
        return camel_case_label(msg);
      }
      return "CompileError";
    }
    std::string name = exception_name_in(stderr_text);
    if (name == "AssertionError") return "Test Failure";
    if (!name.empty()) return name;
    return stderr_text.empty() ? "Unknown" : "Unknown";
  }

  if (language == lang::kPython || language == lang::kJavaScript) {
    std::string name = exception_name_in(stderr_text);
    if (name == "AssertionError" ||
        stderr_text.find("ERR_ASSERTION") != std::string::npos)
      return "Test Failure";
    if (!name.empty()) return name;
    return "Unknown";
  }
  return "Unknown";
}

namespace {

ExecStatus status_for_label(const std::string& language, const std::string& label) {
  if (label == "Timeout") return ExecStatus::timeout;
  if (label == "Test Failure") return ExecStatus::test_failure;
  if (label == "SyntaxError" || label == "IndentationError" || label == "TabError")
    return ExecStatus::compile_error;
  (void)language;
  return ExecStatus::runtime_error;
}

}  // namespace

ExecutionOutcome run_execution_test(const std::string& task_id, const std::string& code,
                                    const corpus::TestSuite& suite,
                                    const std::string& language, const Limits& limits) {
  if (!suite.present)
    throw ConfigError("run_execution_test requires a present suite (" + task_id + ")");
  if (!lang::known(language))
    throw ConfigError("run_execution_test: unknown language " + language);
  if (!toolchain::available(language))
    throw EnvironmentError("toolchain for '" + language + "' unavailable");

  ExecutionOutcome outcome;
  outcome.task_id = task_id;
  TempSandbox sandbox(language);
  auto env = scrubbed_env(sandbox.path);

  SubprocessOptions run_opts;
  run_opts.cwd = sandbox.path;
  run_opts.env = env;
  run_opts.timeout_ms = limits.run_timeout_s * 1000;

  std::int64_t total_ms = 0;

  if (language == lang::kJava) {
    // candidate file named for its public class; bare functions get the
    // Solution wrapper the suites expect
    std::string candidate = code;
    std::string file_name = toolchain::java_file_name(candidate);
    bool has_class = candidate.find("class") != std::string::npos && java::parses(candidate);
    if (!has_class) {
      candidate = "class Solution {\n" + code + "\n}";
      file_name = "Solution.java";
    }
    std::string suite_file = toolchain::java_file_name(suite.script);
    std::string suite_class = suite_file.substr(0, suite_file.size() - 5);
    if (suite_file == file_name) {
      outcome.status = ExecStatus::compile_error;
      outcome.failure_type = "DuplicateClass";
      return outcome;
    }
    write_file(sandbox.path / file_name, candidate);
    write_file(sandbox.path / suite_file, suite.script);

    SubprocessOptions compile_opts = run_opts;
    compile_opts.timeout_ms = limits.compile_timeout_s * 1000;
    auto compiled = run_subprocess({"javac", file_name, suite_file}, compile_opts);
    total_ms += compiled.duration_ms;
    if (compiled.timed_out || compiled.exit_code != 0) {
      NonPassExit exit_state{compiled.exit_code, compiled.timed_out, true};
      outcome.failure_type = classify_failure(language, compiled.err, exit_state);
      outcome.status = compiled.timed_out ? ExecStatus::timeout : ExecStatus::compile_error;
      outcome.stderr_digest = first_diagnostic_line(compiled.err);
      outcome.duration_ms = total_ms;
      return outcome;
    }

    std::string xmx = "-Xmx" + std::to_string(limits.memory_mb) + "m";
    auto ran = run_subprocess({"java", xmx, "-cp", ".", suite_class}, run_opts);
    total_ms += ran.duration_ms;
    outcome.duration_ms = total_ms;
    if (!ran.timed_out && ran.exit_code == 0) {
      outcome.status = ExecStatus::pass;
      return outcome;
    }
    NonPassExit exit_state{ran.exit_code, ran.timed_out, false};
    outcome.failure_type = classify_failure(language, ran.err, exit_state);
    outcome.status = status_for_label(language, outcome.failure_type);
    outcome.stderr_digest = first_diagnostic_line(ran.err);
    return outcome;
  }

  // interpreted targets: single assembled file
  std::string file_name = language == lang::kPython ? "main.py" : "main.js";
  write_file(sandbox.path / file_name, code + "\n\n" + suite.script + "\n");

  std::vector<std::string> cmd;
  if (language == lang::kPython) {
    run_opts.memory_bytes = limits.memory_mb * 1024 * 1024;
    cmd = {"python3", file_name};
  } else {
    cmd = {"node", "--max-old-space-size=" + std::to_string(limits.memory_mb), file_name};
  }
  auto ran = run_subprocess(cmd, run_opts);
  outcome.duration_ms = ran.duration_ms;
  if (!ran.timed_out && ran.exit_code == 0) {
    outcome.status = ExecStatus::pass;
    return outcome;
  }
  NonPassExit exit_state{ran.exit_code, ran.timed_out, false};
  outcome.failure_type = classify_failure(language, ran.err, exit_state);
  outcome.status = status_for_label(language, outcome.failure_type);
  outcome.stderr_digest = first_diagnostic_line(ran.err);
  return outcome;
}

std::optional<bool> object_passes_own_suite(const corpus::CodeObject& obj,
                                            const Limits& limits) {
  if (!obj.tests.present) return std::nullopt;
  if (!toolchain::available(obj.language)) return std::nullopt;
  try {
    auto outcome = run_execution_test(obj.task_id, obj.source, obj.tests, obj.language,
                                      limits);
    return outcome.status == ExecStatus::pass;
  } catch (const EnvironmentError&) {
    return std::nullopt;
  }
}

}  // namespace cateval::harness
