#pragma once

#include "qnnv/core/integer.hpp"

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace qnnv {

enum class ShiftDirection { right, left };

/// Per-edge pre-shift applied to a source activation before it is weighted.
/// Only networks generated by the reduction module carry one.
struct EdgeShift {
  std::vector<std::vector<unsigned>> amounts; // n_out x n_in
  ShiftDirection direction = ShiftDirection::right;
};

/// One fully connected layer in fixed-point form:
///   x'_i  = sum_j w_ij * shift(x_j, e_ij) + b_i
///   x''_i = floor(x'_i / 2^k_i)
///   y_i   = max(0, min(2^N_i - 1, x''_i))
struct FixedPointLayer {
  std::vector<IntVector> weights; // n_out rows of n_in entries
  IntVector bias;
  std::vector<unsigned> bit_shift;
  std::vector<unsigned> clamp_bits;
  std::optional<EdgeShift> edge_shift;

  std::size_t outputs() const { return weights.size(); }
  std::size_t inputs() const { return weights.empty() ? 0 : weights.front().size(); }

  unsigned edge_shift_at(std::size_t row, std::size_t col) const {
    return edge_shift ? edge_shift->amounts[row][col] : 0u;
  }
  ShiftDirection shift_direction() const {
    return edge_shift ? edge_shift->direction : ShiftDirection::right;
  }
  unsigned max_clamp_bits() const;
};

struct QuantizedNetwork {
  std::vector<FixedPointLayer> layers;
  unsigned input_bits = 1;
  unsigned weight_bits = 1;
  std::map<std::string, std::string> metadata;

  std::size_t input_size() const { return layers.empty() ? 0 : layers.front().inputs(); }
  std::size_t output_size() const { return layers.empty() ? 0 : layers.back().outputs(); }

  /// Weights plus biases, the usual way parameter counts are reported.
  std::size_t parameter_count() const;

  /// Largest value an input neuron may take, 2^input_bits - 1.
  Integer input_max() const { return pow2(input_bits) - 1; }
};

/// Checks every structural invariant; throws Error with a code identifying
/// which one failed (shape_mismatch, weight_out_of_range, invalid_input).
void validate(const QuantizedNetwork& net);

} // namespace qnnv
