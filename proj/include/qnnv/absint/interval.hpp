#pragma once

#include "qnnv/core/integer.hpp"
#include "qnnv/core/network.hpp"

#include <span>
#include <vector>

namespace qnnv {

/// Inclusive integer interval [lo, hi] with lo <= hi.
struct Interval {
  Integer lo;
  Integer hi;

  Interval() = default;
  Interval(Integer lo_, Integer hi_);
  static Interval point(const Integer& v) { return {v, v}; }

  bool contains(const Integer& v) const { return lo <= v && v <= hi; }
  bool contains(const Interval& other) const { return lo <= other.lo && other.hi <= hi; }
  bool is_point() const { return lo == hi; }

  friend bool operator==(const Interval&, const Interval&) = default;
};

Interval operator+(const Interval& a, const Interval& b);
Interval scale(const Interval& a, const Integer& factor);
Interval round_shift(const Interval& a, unsigned k);
Interval clamp_relu_n(const Interval& a, unsigned n);
Interval shift_apply(const Interval& a, unsigned amount, ShiftDirection direction);

using IntervalVector = std::vector<Interval>;

} // namespace qnnv
