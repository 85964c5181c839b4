#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace cateval {

struct SubprocessOptions {
  std::optional<std::filesystem::path> cwd;
  int timeout_ms = 30000;
  std::uint64_t memory_bytes = 0;  // 0 = unlimited (RLIMIT_AS on the child)
  /// When set, the child sees only these variables (plus nothing inherited).
  std::optional<std::map<std::string, std::string>> env;
  std::string stdin_data;
};

struct SubprocessResult {
  int exit_code = -1;      // -signal when killed by a signal
  bool timed_out = false;
  std::string out;
  std::string err;
  std::int64_t duration_ms = 0;
};

/// Runs argv[0] with the given arguments, capturing stdout/stderr. The child
/// is placed in its own process group and the whole group is killed on
/// timeout. Throws EnvironmentError only for host-side failures (fork/pipe);
/// a missing executable surfaces as exit_code 127.
SubprocessResult run_subprocess(const std::vector<std::string>& argv,
                                const SubprocessOptions& opts = {});

/// True if `name` resolves on PATH.
bool executable_on_path(const std::string& name);

}  // namespace cateval
