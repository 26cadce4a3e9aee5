#pragma once

#include "qnnv/absint/interval.hpp"
#include "qnnv/core/sum_tree.hpp"

#include "json.hpp"

namespace qnnv {

/// Bounds of one layer.  `tree[i][n]` is the interval of node n of row i's
/// balanced summation tree (SumTree::balanced(summand_count(layer, i))).
struct LayerBounds {
  IntervalVector pre_round;
  IntervalVector post_round;
  IntervalVector post_clamp;
  std::vector<IntervalVector> tree;
};

struct IntervalMap {
  IntervalVector inputs;
  std::vector<LayerBounds> layers;
};

/// The l-infinity ball of radius epsilon around `sample`, clipped to the
/// unsigned input domain of `input_bits` bits.
IntervalVector input_intervals_for_ball(std::span<const Integer> sample, const Integer& epsilon,
                                        unsigned input_bits);

/// Exact range of sum_j w_j * t_j + b for t_j ranging over ins_j.
Interval affine_interval(std::span<const Integer> weights, const Integer& bias, std::span<const Interval> ins);

/// Interval of summand `leaf` of `row` (a weighted input or the bias).
Interval summand_interval(const FixedPointLayer& layer, std::size_t row, std::size_t leaf,
                          std::span<const Interval> ins);

LayerBounds propagate_layer(const FixedPointLayer& layer, std::span<const Interval> ins);

/// Layer-by-layer interval propagation.  Sound: every concrete value of the
/// interpreter for inputs drawn from `ins` lies inside the matching interval.
IntervalMap propagate_network(const QuantizedNetwork& net, std::span<const Interval> ins);

nlohmann::json to_json(const IntervalMap& map);

} // namespace qnnv
