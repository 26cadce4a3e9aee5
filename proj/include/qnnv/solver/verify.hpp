#pragma once

#include "qnnv/encoder/encoder.hpp"
#include "qnnv/solver/solver.hpp"

#include <optional>

namespace qnnv {

struct RobustnessQuery {
  IntVector sample;
  std::size_t label = 0;
  Integer epsilon = 0;
};

struct Verdict {
  Outcome outcome = Outcome::solver_error;
  std::optional<IntVector> model; // present iff outcome == sat
  double wall_seconds = 0.0;
  std::optional<bool> validated; // set only alongside a model
  std::string diagnostic;
};

/// True iff `assignment` lies in the query's ball and the interpreter
/// classifies it differently from the query label.
bool validate_counterexample(const QuantizedNetwork& net, std::span<const Integer> assignment,
                             const RobustnessQuery& query);

struct VerifyReport {
  Verdict verdict;
  double encode_seconds = 0.0;
  smt::EncodeStats stats;
};

/// Encode, solve, decode and replay.  A Sat model that fails validation
/// throws Error(Errc::encoder_mismatch).
VerifyReport verify_robustness(const QuantizedNetwork& net, const RobustnessQuery& query,
                               const smt::EncodeOptions& opts, const SolverConfig& config);

} // namespace qnnv
