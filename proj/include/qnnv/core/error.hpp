#pragma once

#include <stdexcept>
#include <string>

namespace qnnv {

enum class Errc {
  invalid_input,
  shape_mismatch,
  weight_out_of_range,
  malformed_model,
  parse_error,
  solver_error,
  width_budget,
  size_guard,
  encoder_mismatch,
  io_error,
};

const char* to_string(Errc code);

/// Exception type for every recoverable failure in the toolchain.  The code
/// lets callers (and tests) tell diagnostics apart without string matching.
class Error : public std::runtime_error {
public:
  Error(Errc code, const std::string& what) : std::runtime_error(what), code_(code) {}

  Errc code() const noexcept { return code_; }

private:
  Errc code_;
};

} // namespace qnnv
