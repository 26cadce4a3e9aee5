#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <string>
#include <vector>

namespace qnnv {

/// Arbitrary precision signed integer.  All network arithmetic runs on it so
/// evaluation never overflows regardless of layer width.
using Integer = boost::multiprecision::cpp_int;
using IntVector = std::vector<Integer>;

Integer pow2(unsigned exponent);

/// floor(v / 2^k).  Rounds toward negative infinity for negative values.
Integer floor_div_pow2(const Integer& v, unsigned k);

/// Number of bits in the magnitude of v (0 for v == 0).
unsigned magnitude_bits(const Integer& v);

/// Smallest b such that v lies in the two's-complement range of b bits.
unsigned signed_width(const Integer& v);

std::string to_string(const Integer& v);

} // namespace qnnv
