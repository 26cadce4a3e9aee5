#pragma once

#include "qnnv/core/integer.hpp"

#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace qnnv {

enum class Outcome { sat, unsat, unknown, timeout, solver_error };

std::string to_string(Outcome outcome);

/// Solver executable from the QNNV_SOLVER environment variable, else "z3".
std::string default_solver();

struct SolverConfig {
  std::string executable = default_solver();
  std::vector<std::string> args; // placed before the script path
  double timeout_secs = 60.0;
  std::filesystem::path work_dir; // where script files go; empty = system temp dir
  bool keep_scripts = false;
};

struct RawOutcome {
  Outcome outcome = Outcome::solver_error;
  std::string stdout_text;
  std::string stderr_text;
  double wall_seconds = 0.0;
};

/// Writes the script to a uniquely named file, runs the solver on it and
/// classifies the first verdict line of its output.
RawOutcome run_solver(std::string_view script_text, const SolverConfig& config);

using Assignment = std::map<std::string, Integer>;

/// Decodes a get-value response.  Accepts #b..., #x... and (_ bvN w)
/// literals.  Every name in `inputs` must be present and lie in
/// [0, 2^input_bits - 1].
Assignment parse_model(std::string_view stdout_text, const std::vector<std::string>& inputs, unsigned input_bits);

} // namespace qnnv
