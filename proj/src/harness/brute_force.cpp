#include "qnnv/harness/brute_force.hpp"
#include "qnnv/absint/propagate.hpp"
#include "qnnv/core/error.hpp"
#include "qnnv/core/interpreter.hpp"

namespace qnnv {

Integer ball_volume(const QuantizedNetwork& net, std::span<const Integer> sample, const Integer& epsilon) {
  Integer volume = 1;
  for (const auto& iv : input_intervals_for_ball(sample, epsilon, net.input_bits)) volume *= iv.hi - iv.lo + 1;
  return volume;
}

BruteForceResult brute_force_verify(const QuantizedNetwork& net, std::span<const Integer> sample, std::size_t label,
                                    const Integer& epsilon, std::uint64_t cap) {
  if (sample.size() != net.input_size())
    throw Error(Errc::shape_mismatch, "sample has " + std::to_string(sample.size()) + " entries, network expects " +
                                          std::to_string(net.input_size()));
  const auto box = input_intervals_for_ball(sample, epsilon, net.input_bits);
  const Integer volume = ball_volume(net, sample, epsilon);
  if (volume > cap)
    throw Error(Errc::size_guard, "ball holds " + volume.str() + " points, cap is " + std::to_string(cap));

  BruteForceResult result;
  IntVector x;
  for (const auto& iv : box) x.push_back(iv.lo);
  for (;;) {
    ++result.points;
    if (classify(net, x) != label) {
      result.robust = false;
      result.counterexample = x;
      return result;
    }
    std::size_t j = x.size();
    while (j > 0) {
      --j;
      if (x[j] < box[j].hi) {
        ++x[j];
        break;
      }
      x[j] = box[j].lo;
      if (j == 0) return result;
    }
    if (x.empty()) return result;
  }
}

} // namespace qnnv
