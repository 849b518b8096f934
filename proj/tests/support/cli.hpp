#pragma once

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <string>

namespace lscd::testkit {

// Runs the lscd binary with the given argument string; returns its exit code.
inline int run_cli(const std::string& args) {
  std::string cmd = std::string(LSCD_CLI_PATH) + " " + args + " >/dev/null 2>&1";
  int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

inline std::string quoted(const std::filesystem::path& p) { return "'" + p.string() + "'"; }

}  // namespace lscd::testkit
