#include "qnnv/encoder/widths.hpp"
#include "qnnv/core/error.hpp"

namespace qnnv::smt {

unsigned ceil_log2(std::size_t n) {
  unsigned bits = 0;
  while ((std::size_t{1} << bits) < n) ++bits;
  return bits;
}

unsigned naive_bits(unsigned k, std::size_t n) {
  if (k == 0 || n == 0) throw Error(Errc::invalid_input, "naive_bits needs k >= 1 and n >= 1");
  return 2 * k + ceil_log2(n) + 1;
}

unsigned minimal_bits(const Interval& iv) {
  return std::max(signed_width(iv.lo), signed_width(iv.hi));
}

} // namespace qnnv::smt
