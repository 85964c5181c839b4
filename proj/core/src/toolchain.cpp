#include "cateval/toolchain.hpp"

#include <unistd.h>

#include <filesystem>
#include <fstream>

#include "cateval/errors.hpp"
#include "cateval/java_tree.hpp"
#include "cateval/lang.hpp"
#include "cateval/subprocess.hpp"

namespace fs = std::filesystem;

namespace cateval::toolchain {

namespace {

std::string tool_for(const std::string& language) {
  if (language == lang::kJava) return "javac";
  if (language == lang::kPython) return "python3";
  if (language == lang::kJavaScript) return "node";
  return "";
}

std::string first_line(const std::string& s) {
  auto nl = s.find('\n');
  return nl == std::string::npos ? s : s.substr(0, nl);
}

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() /
           ("cateval-" + std::to_string(::getpid()) + "-" +
            std::to_string(reinterpret_cast<std::uintptr_t>(this)));
    fs::create_directories(path);
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path, ec);
  }
};

}  // namespace

ToolInfo probe(const std::string& language) {
  ToolInfo info;
  info.language = language;
  info.tool = tool_for(language);
  if (info.tool.empty() || !executable_on_path(info.tool)) return info;
  SubprocessOptions opts;
  opts.timeout_ms = 10000;
  auto res = run_subprocess({info.tool, "--version"}, opts);
  if (res.exit_code == 0) {
    info.available = true;
    info.version = first_line(res.out.empty() ? res.err : res.out);
  } else {
    // javac reports its version on stderr for some JDKs via `-version`
    auto res2 = run_subprocess({info.tool, "-version"}, opts);
    if (res2.exit_code == 0) {
      info.available = true;
      info.version = first_line(res2.out.empty() ? res2.err : res2.out);
    }
  }
  return info;
}

std::vector<ToolInfo> probe_all() {
  std::vector<ToolInfo> out;
  for (const auto& tag : lang::all()) out.push_back(probe(tag));
  return out;
}

bool available(const std::string& language) { return probe(language).available; }

std::string java_file_name(const std::string& source) {
  try {
    auto unit = java::parse_unit(source);
    if (!unit.primary_class.empty()) return unit.primary_class + ".java";
  } catch (const ParseError&) {
  }
  return "Main.java";
}

CheckResult compile_check(const std::string& language, const std::string& source,
                          int timeout_s,
                          const std::vector<std::string>& command_override) {
  CheckResult result;
  TempDir dir;

  std::string file_name;
  std::vector<std::string> cmd;
  if (language == lang::kJava) {
    file_name = java_file_name(source);
    cmd = {"javac", "-d", dir.path.string()};
  } else if (language == lang::kPython) {
    file_name = "candidate.py";
    cmd = {"python3", "-m", "py_compile"};
  } else if (language == lang::kJavaScript) {
    file_name = "candidate.js";
    cmd = {"node", "--check"};
  } else {
    throw ConfigError("compile_check: unsupported language " + language);
  }
  if (!command_override.empty()) cmd = command_override;

  fs::path file = dir.path / file_name;
  {
    std::ofstream out(file);
    out << source;
    if (!out) throw EnvironmentError("cannot write " + file.string());
  }
  cmd.push_back(file.string());

  SubprocessOptions opts;
  opts.cwd = dir.path;
  opts.timeout_ms = timeout_s * 1000;
  auto res = run_subprocess(cmd, opts);
  result.timed_out = res.timed_out;
  result.ok = !res.timed_out && res.exit_code == 0;
  result.diagnostics = res.err;
  return result;
}

}  // namespace cateval::toolchain
