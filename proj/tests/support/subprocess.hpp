#pragma once

// Minimal process plumbing for driving the CLI binary from tests.

#include <signal.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cstdio>
#include <string>

namespace testsupport {

struct CmdResult {
  int exit_code = -1;
  std::string output;  // stdout + stderr, interleaved
};

// Runs a shell command to completion and captures its combined output.
inline CmdResult run_cmd(const std::string& cmd) {
  CmdResult result;
  std::string full = cmd + " 2>&1";
  FILE* pipe = popen(full.c_str(), "r");
  if (pipe == nullptr) return result;
  char buf[4096];
  size_t n;
  while ((n = fread(buf, 1, sizeof buf, pipe)) > 0) result.output.append(buf, n);
  int status = pclose(pipe);
  if (WIFEXITED(status)) result.exit_code = WEXITSTATUS(status);
  return result;
}

// Long-running command started in the background, stdout redirected to a
// file; terminated (SIGTERM) when the object goes out of scope.
class BackgroundProc {
 public:
  BackgroundProc(const std::string& cmd, const std::string& stdout_file) {
    // The child inherits the stdio buffers; empty them so its freopen cannot
    // replay the parent's pending output.
    std::fflush(stdout);
    std::fflush(stderr);
    pid_ = fork();
    if (pid_ == 0) {
      if (std::freopen(stdout_file.c_str(), "w", stdout) == nullptr) _exit(126);
      std::string exec_cmd = "exec " + cmd;
      execl("/bin/sh", "sh", "-c", exec_cmd.c_str(), static_cast<char*>(nullptr));
      _exit(127);
    }
  }
  ~BackgroundProc() { terminate(); }
  BackgroundProc(const BackgroundProc&) = delete;
  BackgroundProc& operator=(const BackgroundProc&) = delete;

  void terminate() {
    if (pid_ > 0) {
      kill(pid_, SIGTERM);
      waitpid(pid_, nullptr, 0);
      pid_ = -1;
    }
  }

 private:
  pid_t pid_ = -1;
};

}  // namespace testsupport
