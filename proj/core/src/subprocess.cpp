#include "cateval/subprocess.hpp"

#include <fcntl.h>
#include <poll.h>
#include <signal.h>
#include <sys/resource.h>
#include <sys/wait.h>
#include <unistd.h>

#include <chrono>
#include <cstdlib>
#include <cstring>

#include "cateval/errors.hpp"

namespace cateval {

namespace {

[[noreturn]] void child_exec(const std::vector<std::string>& argv,
                             const SubprocessOptions& opts, int in_fd, int out_fd,
                             int err_fd) {
  ::setpgid(0, 0);
  ::dup2(in_fd, STDIN_FILENO);
  ::dup2(out_fd, STDOUT_FILENO);
  ::dup2(err_fd, STDERR_FILENO);
  for (int fd = 3; fd < 256; ++fd) ::close(fd);

  if (opts.cwd && ::chdir(opts.cwd->c_str()) != 0) ::_exit(126);
  if (opts.memory_bytes > 0) {
    rlimit lim{opts.memory_bytes, opts.memory_bytes};
    ::setrlimit(RLIMIT_AS, &lim);
  }

  std::vector<char*> cargv;
  cargv.reserve(argv.size() + 1);
  for (const auto& a : argv) cargv.push_back(const_cast<char*>(a.c_str()));
  cargv.push_back(nullptr);

  if (opts.env) {
    std::vector<std::string> kv;
    kv.reserve(opts.env->size());
    for (const auto& [k, v] : *opts.env) kv.push_back(k + "=" + v);
    std::vector<char*> cenv;
    cenv.reserve(kv.size() + 1);
    for (auto& e : kv) cenv.push_back(e.data());
    cenv.push_back(nullptr);
    ::execvpe(cargv[0], cargv.data(), cenv.data());
  } else {
    ::execvp(cargv[0], cargv.data());
  }
  ::_exit(127);
}

}  // namespace

SubprocessResult run_subprocess(const std::vector<std::string>& argv,
                                const SubprocessOptions& opts) {
  if (argv.empty()) throw EnvironmentError("run_subprocess: empty argv");

  int in_pipe[2], out_pipe[2], err_pipe[2];
  if (::pipe(in_pipe) || ::pipe(out_pipe) || ::pipe(err_pipe))
    throw EnvironmentError("pipe() failed");

  auto start = std::chrono::steady_clock::now();
  pid_t pid = ::fork();
  if (pid < 0) throw EnvironmentError("fork() failed");
  if (pid == 0) {
    ::close(in_pipe[1]);
    ::close(out_pipe[0]);
    ::close(err_pipe[0]);
    child_exec(argv, opts, in_pipe[0], out_pipe[1], err_pipe[1]);
  }

  ::close(in_pipe[0]);
  ::close(out_pipe[1]);
  ::close(err_pipe[1]);

  if (!opts.stdin_data.empty()) {
    size_t off = 0;
    while (off < opts.stdin_data.size()) {
      ssize_t n = ::write(in_pipe[1], opts.stdin_data.data() + off,
                          opts.stdin_data.size() - off);
      if (n <= 0) break;
      off += static_cast<size_t>(n);
    }
  }
  ::close(in_pipe[1]);

  ::fcntl(out_pipe[0], F_SETFL, O_NONBLOCK);
  ::fcntl(err_pipe[0], F_SETFL, O_NONBLOCK);

  SubprocessResult result;
  bool out_open = true, err_open = true;
  char buf[4096];
  auto deadline = start + std::chrono::milliseconds(opts.timeout_ms);

  auto drain = [&](int fd, std::string& sink, bool& open_flag) {
    while (true) {
      ssize_t n = ::read(fd, buf, sizeof(buf));
      if (n > 0) {
        sink.append(buf, static_cast<size_t>(n));
      } else if (n == 0) {
        open_flag = false;
        return;
      } else {
        if (errno == EAGAIN || errno == EWOULDBLOCK) return;
        open_flag = false;
        return;
      }
    }
  };

  while (out_open || err_open) {
    auto now = std::chrono::steady_clock::now();
    if (now >= deadline) {
      result.timed_out = true;
      ::kill(-pid, SIGKILL);
      break;
    }
    int wait_ms = static_cast<int>(
        std::chrono::duration_cast<std::chrono::milliseconds>(deadline - now).count());
    if (wait_ms < 1) wait_ms = 1;
    if (wait_ms > 200) wait_ms = 200;

    pollfd fds[2];
    nfds_t nfds = 0;
    if (out_open) fds[nfds++] = {out_pipe[0], POLLIN, 0};
    if (err_open) fds[nfds++] = {err_pipe[0], POLLIN, 0};
    ::poll(fds, nfds, wait_ms);
    if (out_open) drain(out_pipe[0], result.out, out_open);
    if (err_open) drain(err_pipe[0], result.err, err_open);
  }

  int status = 0;
  if (result.timed_out) {
    ::waitpid(pid, &status, 0);
    drain(out_pipe[0], result.out, out_open);
    drain(err_pipe[0], result.err, err_open);
    result.exit_code = -SIGKILL;
  } else {
    ::waitpid(pid, &status, 0);
    if (WIFEXITED(status)) result.exit_code = WEXITSTATUS(status);
    else if (WIFSIGNALED(status)) result.exit_code = -WTERMSIG(status);
  }
  ::close(out_pipe[0]);
  ::close(err_pipe[0]);

  result.duration_ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                           std::chrono::steady_clock::now() - start)
                           .count();
  return result;
}

bool executable_on_path(const std::string& name) {
  const char* path = std::getenv("PATH");
  if (!path) return false;
  std::string paths(path);
  size_t pos = 0;
  while (pos <= paths.size()) {
    size_t next = paths.find(':', pos);
    std::string dir = paths.substr(pos, next == std::string::npos ? next : next - pos);
    if (!dir.empty()) {
      std::filesystem::path candidate = std::filesystem::path(dir) / name;
      std::error_code ec;
      if (std::filesystem::exists(candidate, ec) &&
          ::access(candidate.c_str(), X_OK) == 0)
        return true;
    }
    if (next == std::string::npos) break;
    pos = next + 1;
  }
  return false;
}

}  // namespace cateval
