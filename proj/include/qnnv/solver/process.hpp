#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace qnnv {

struct ProcessResult {
  bool spawned = false;
  bool timed_out = false;
  int exit_code = -1; // -1 when killed by a signal
  std::string out;
  std::string err;
  double seconds = 0.0;
};

/// Runs argv[0] (looked up in PATH) with stdout and stderr captured.  The
/// child gets its own process group, which is killed once `timeout_secs`
/// elapses.  When the program cannot be started, `spawned` is false and `err`
/// carries the reason.
ProcessResult run_process(const std::vector<std::string>& argv, double timeout_secs,
                          const std::filesystem::path& cwd = {});

} // namespace qnnv
