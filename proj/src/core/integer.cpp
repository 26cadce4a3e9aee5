#include "qnnv/core/integer.hpp"
#include "qnnv/core/error.hpp"

namespace qnnv {

const char* to_string(Errc code) {
  switch (code) {
  case Errc::invalid_input: return "invalid input";
  case Errc::shape_mismatch: return "shape mismatch";
  case Errc::weight_out_of_range: return "weight out of range";
  case Errc::malformed_model: return "malformed model";
  case Errc::parse_error: return "parse error";
  case Errc::solver_error: return "solver error";
  case Errc::width_budget: return "width budget exceeded";
  case Errc::size_guard: return "size guard exceeded";
  case Errc::encoder_mismatch: return "encoder/interpreter mismatch";
  case Errc::io_error: return "i/o error";
  }
  return "unknown error";
}

Integer pow2(unsigned exponent) {
  Integer r = 1;
  r <<= exponent;
  return r;
}

Integer floor_div_pow2(const Integer& v, unsigned k) {
  if (k == 0) return v;
  const Integer divisor = pow2(k);
  Integer q = v / divisor; // truncates toward zero
  if (v < 0 && q * divisor != v) q -= 1;
  return q;
}

unsigned magnitude_bits(const Integer& v) {
  if (v == 0) return 0;
  const Integer m = abs(v);
  return static_cast<unsigned>(boost::multiprecision::msb(m)) + 1;
}

unsigned signed_width(const Integer& v) {
  // b bits hold [-2^(b-1), 2^(b-1) - 1].
  if (v >= 0) return magnitude_bits(v) + 1;
  return magnitude_bits(-v - 1) + 1;
}

std::string to_string(const Integer& v) { return v.str(); }

} // namespace qnnv
