#pragma once

#include "qnnv/core/network.hpp"

#include <span>
#include <vector>

namespace qnnv {

/// floor(v * 2^-k), i.e. an arithmetic right shift.
Integer round_shift(const Integer& v, unsigned k);

/// ReLU-N: max(0, min(2^n - 1, v)).
Integer clamp_relu_n(const Integer& v, unsigned n);

Integer shift_apply(const Integer& x, unsigned amount, ShiftDirection direction);

/// Intermediate values of one layer evaluation.
struct LayerTrace {
  IntVector pre_round;  // x'
  IntVector post_round; // x''
  IntVector output;     // y
};

LayerTrace trace_layer(const FixedPointLayer& layer, std::span<const Integer> x);
IntVector eval_layer(const FixedPointLayer& layer, std::span<const Integer> x);

std::vector<LayerTrace> trace_network(const QuantizedNetwork& net, std::span<const Integer> x);
IntVector eval_network(const QuantizedNetwork& net, std::span<const Integer> x);

/// Argmax with ties resolved toward the lowest index.
std::size_t argmax(std::span<const Integer> outputs);

std::size_t classify(const QuantizedNetwork& net, std::span<const Integer> x);

/// Whether output `challenger` would be picked over `label` when its logit is
/// equal to the label's.  This is the tie-break rule shared with the encoder:
/// lower indices win ties.
constexpr bool wins_tie(std::size_t challenger, std::size_t label) { return challenger < label; }

} // namespace qnnv
