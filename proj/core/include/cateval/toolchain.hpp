#pragma once

#include <string>
#include <vector>

namespace cateval::toolchain {

struct ToolInfo {
  std::string language;
  std::string tool;      // javac / python3 / node
  bool available = false;
  std::string version;
};

/// Compiler / interpreter presence for a language tag.
ToolInfo probe(const std::string& language);
std::vector<ToolInfo> probe_all();
bool available(const std::string& language);

struct CheckResult {
  bool ok = false;
  bool timed_out = false;
  std::string diagnostics;  // stderr of the checker
};

/// Syntax/compile probe of a standalone source text. For Java the file name
/// follows the public class; python uses py_compile; javascript `node
/// --check`. `command_override` replaces the checker binary+args, with the
/// source file path appended (test hook).
CheckResult compile_check(const std::string& language, const std::string& source,
                          int timeout_s,
                          const std::vector<std::string>& command_override = {});

/// Main-class or file naming helper: the file Java source must be saved as.
std::string java_file_name(const std::string& source);

}  // namespace cateval::toolchain
