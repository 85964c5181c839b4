#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "cateval/corpus.hpp"
#include "cateval/modelgw.hpp"
#include "cateval/toolchain.hpp"

namespace cateval::harness {

// ---------------------------------------------------------------------------
// Pairing test: parse an equivalence judgment out of mixed prose.

enum class ParsedVerdict { equivalent, nonequivalent, unparseable };
std::string to_string(ParsedVerdict v);

struct Verdict {
  std::string task_id;
  ParsedVerdict parsed = ParsedVerdict::unparseable;
  std::string evidence;  // matched token with a +-40 char window
};

/// Case-insensitive scan for standalone "true"/"false"; first match wins.
/// "not (functionally) equivalent" phrasing counts as nonequivalent when no
/// bare token appears. Anything else is unparseable — a value, not an error.
Verdict extract_boolean_verdict(const std::string& task_id, const std::string& text);
Verdict extract_boolean_verdict(const modelgw::ModelResponse& resp);

json to_json(const Verdict& v);
Verdict verdict_from_json(const json& rec);

// ---------------------------------------------------------------------------
// Code extraction from code-text mixtures.

/// First fenced block tagged with the language, else the first fenced block,
/// else the longest contiguous region that reads as a function in the target
/// language. Absent when nothing plausible is found.
std::optional<std::string> extract_code_block(const std::string& text,
                                              const std::string& language);
std::optional<std::string> extract_code_block(const modelgw::ModelResponse& resp,
                                              const std::string& language);

// ---------------------------------------------------------------------------
// Execution test: compile and run candidates against a suite in a sandbox.

enum class ExecStatus {
  pass,
  test_failure,
  compile_error,
  runtime_error,
  timeout,
  extraction_failure,
};
std::string to_string(ExecStatus s);
ExecStatus exec_status_from_string(const std::string& s);

struct ExecutionOutcome {
  std::string task_id;
  ExecStatus status = ExecStatus::extraction_failure;
  std::string failure_type;   // empty iff status == pass
  std::string stderr_digest;  // first diagnostic line, truncated
  std::int64_t duration_ms = 0;
};

json to_json(const ExecutionOutcome& o);
ExecutionOutcome outcome_from_json(const json& rec);
void write_outcomes(const std::filesystem::path& path,
                    const std::vector<ExecutionOutcome>& outcomes,
                    const json& meta = json::object());
std::vector<ExecutionOutcome> read_outcomes(const std::filesystem::path& path);

struct Limits {
  int compile_timeout_s = 60;
  int run_timeout_s = 30;
  std::uint64_t memory_mb = 512;
};

/// Assembles candidate + suite into a fresh sandbox directory, compiles
/// where the language needs it, runs, and maps the result. The sandbox is
/// removed afterwards. Throws EnvironmentError when the toolchain for the
/// language is missing (distinct from candidate failures).
ExecutionOutcome run_execution_test(const std::string& task_id, const std::string& code,
                                    const corpus::TestSuite& suite,
                                    const std::string& language,
                                    const Limits& limits = {});

/// Exit evidence of a non-passing run. Only constructed for non-pass
/// outcomes, so classification of a pass is unrepresentable.
struct NonPassExit {
  int exit_code = 1;
  bool timed_out = false;
  bool compile_stage = false;
};

/// Maps diagnostics to a failure label: compiler diagnostic name, else
/// interpreter exception class, else "Test Failure" for assertion failures,
/// else "Unknown".
std::string classify_failure(const std::string& language, const std::string& stderr_text,
                             const NonPassExit& exit_state);

/// Convenience for pair flagging and oracle stubs: run the object's own
/// suite. nullopt when the toolchain is unavailable.
std::optional<bool> object_passes_own_suite(const corpus::CodeObject& obj,
                                            const Limits& limits = {});

}  // namespace cateval::harness
