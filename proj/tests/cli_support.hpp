#pragma once

#include <cstdio>
#include <string>
#include <sys/wait.h>

namespace test_support {

struct CommandResult {
  int exit_code = -1;
  std::string output;
};

// Runs the CLI with `args` through the shell, capturing stdout and stderr.
inline CommandResult run_cli(const std::string& args) {
  CommandResult r;
  const std::string cmd = std::string("\"") + SPARSEBONUS_CLI + "\" " + args + " 2>&1";
  FILE* pipe = popen(cmd.c_str(), "r");
  if (!pipe) return r;
  char buf[4096];
  std::size_t n;
  while ((n = std::fread(buf, 1, sizeof buf, pipe)) > 0) r.output.append(buf, n);
  const int status = pclose(pipe);
  r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

}  // namespace test_support
