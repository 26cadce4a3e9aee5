#pragma once

#include "qnnv/absint/interval.hpp"

namespace qnnv::smt {

/// Worst-case accumulator width for n products of k-bit operands:
/// 2k + ceil(log2 n) + 1.
unsigned naive_bits(unsigned k, std::size_t n);

/// Smallest two's-complement width whose range contains the interval.
unsigned minimal_bits(const Interval& iv);

unsigned ceil_log2(std::size_t n);

} // namespace qnnv::smt
