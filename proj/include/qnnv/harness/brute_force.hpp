#pragma once

#include "qnnv/core/network.hpp"

#include <cstdint>
#include <optional>
#include <span>

namespace qnnv {

struct BruteForceResult {
  bool robust = true;                     // Unsat: no counterexample in the ball
  std::optional<IntVector> counterexample; // first one in scan order
  std::uint64_t points = 0;               // inputs evaluated
};

inline constexpr std::uint64_t kDefaultBallCap = std::uint64_t{1} << 20;

/// Number of points of the l-infinity ball clipped to the input domain.
Integer ball_volume(const QuantizedNetwork& net, std::span<const Integer> sample, const Integer& epsilon);

/// Enumerates the ball in lexicographic order (first coordinate most
/// significant, ascending) and stops at the first misclassified point.
/// Throws Error(size_guard) when the ball holds more than `cap` points.
BruteForceResult brute_force_verify(const QuantizedNetwork& net, std::span<const Integer> sample, std::size_t label,
                                    const Integer& epsilon, std::uint64_t cap = kDefaultBallCap);

} // namespace qnnv
