#include "qnnv/absint/interval.hpp"
#include "qnnv/core/error.hpp"
#include "qnnv/core/interpreter.hpp"

namespace qnnv {

Interval::Interval(Integer lo_, Integer hi_) : lo(std::move(lo_)), hi(std::move(hi_)) {
  if (lo > hi) throw Error(Errc::invalid_input, "empty interval [" + lo.str() + ", " + hi.str() + "]");
}

Interval operator+(const Interval& a, const Interval& b) { return {a.lo + b.lo, a.hi + b.hi}; }

Interval scale(const Interval& a, const Integer& factor) {
  if (factor >= 0) return {a.lo * factor, a.hi * factor};
  return {a.hi * factor, a.lo * factor};
}

// Floor shift, clamp and edge shifts are monotone, so applying them to the
// endpoints is exact.
Interval round_shift(const Interval& a, unsigned k) { return {round_shift(a.lo, k), round_shift(a.hi, k)}; }

Interval clamp_relu_n(const Interval& a, unsigned n) { return {clamp_relu_n(a.lo, n), clamp_relu_n(a.hi, n)}; }

Interval shift_apply(const Interval& a, unsigned amount, ShiftDirection direction) {
  return {shift_apply(a.lo, amount, direction), shift_apply(a.hi, amount, direction)};
}

} // namespace qnnv
