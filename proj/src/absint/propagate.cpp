#include "qnnv/absint/propagate.hpp"
#include "qnnv/core/error.hpp"
#include "qnnv/core/model_io.hpp"

namespace qnnv {

IntervalVector input_intervals_for_ball(std::span<const Integer> sample, const Integer& epsilon,
                                        unsigned input_bits) {
  if (epsilon < 0) throw Error(Errc::invalid_input, "epsilon must be non-negative");
  const Integer top = pow2(input_bits) - 1;
  IntervalVector out;
  out.reserve(sample.size());
  for (std::size_t j = 0; j < sample.size(); ++j) {
    const Integer& x = sample[j];
    if (x < 0 || x > top)
      throw Error(Errc::invalid_input,
                  "sample component " + std::to_string(j) + " = " + x.str() + " outside [0, " + top.str() + "]");
    Integer lo = x - epsilon;
    Integer hi = x + epsilon;
    if (lo < 0) lo = 0;
    if (hi > top) hi = top;
    out.emplace_back(std::move(lo), std::move(hi));
  }
  return out;
}

Interval affine_interval(std::span<const Integer> weights, const Integer& bias, std::span<const Interval> ins) {
  if (weights.size() != ins.size()) throw Error(Errc::shape_mismatch, "affine_interval: length mismatch");
  Interval acc = Interval::point(bias);
  for (std::size_t j = 0; j < weights.size(); ++j) acc = acc + scale(ins[j], weights[j]);
  return acc;
}

Interval summand_interval(const FixedPointLayer& layer, std::size_t row, std::size_t leaf,
                          std::span<const Interval> ins) {
  if (leaf == layer.inputs()) return Interval::point(layer.bias[row]);
  const Interval shifted = shift_apply(ins[leaf], layer.edge_shift_at(row, leaf), layer.shift_direction());
  return scale(shifted, layer.weights[row][leaf]);
}

LayerBounds propagate_layer(const FixedPointLayer& layer, std::span<const Interval> ins) {
  if (ins.size() != layer.inputs())
    throw Error(Errc::shape_mismatch, "propagate_layer: expected " + std::to_string(layer.inputs()) +
                                          " input intervals, got " + std::to_string(ins.size()));
  LayerBounds out;
  const std::size_t n_out = layer.outputs();
  out.pre_round.reserve(n_out);
  out.post_round.reserve(n_out);
  out.post_clamp.reserve(n_out);
  out.tree.reserve(n_out);
  for (std::size_t i = 0; i < n_out; ++i) {
    const SumTree shape = SumTree::balanced(summand_count(layer, i));
    IntervalVector nodes;
    nodes.reserve(shape.nodes.size());
    for (const auto& node : shape.nodes) {
      if (node.is_leaf())
        nodes.push_back(summand_interval(layer, i, static_cast<std::size_t>(node.leaf), ins));
      else
        nodes.push_back(nodes[node.left] + nodes[node.right]);
    }
    out.pre_round.push_back(nodes.back());
    out.post_round.push_back(round_shift(out.pre_round.back(), layer.bit_shift[i]));
    out.post_clamp.push_back(clamp_relu_n(out.post_round.back(), layer.clamp_bits[i]));
    out.tree.push_back(std::move(nodes));
  }
  return out;
}

IntervalMap propagate_network(const QuantizedNetwork& net, std::span<const Interval> ins) {
  if (ins.size() != net.input_size())
    throw Error(Errc::shape_mismatch, "propagate_network: expected " + std::to_string(net.input_size()) +
                                          " input intervals, got " + std::to_string(ins.size()));
  IntervalMap map;
  map.inputs.assign(ins.begin(), ins.end());
  const IntervalVector* current = &map.inputs;
  for (const auto& layer : net.layers) {
    map.layers.push_back(propagate_layer(layer, *current));
    current = &map.layers.back().post_clamp;
  }
  return map;
}

namespace {

nlohmann::json intervals_json(const IntervalVector& v) {
  nlohmann::json out = nlohmann::json::array();
  for (const auto& iv : v) out.push_back({integer_to_json(iv.lo), integer_to_json(iv.hi)});
  return out;
}

} // namespace

nlohmann::json to_json(const IntervalMap& map) {
  nlohmann::json doc;
  doc["inputs"] = intervals_json(map.inputs);
  nlohmann::json layers = nlohmann::json::array();
  for (const auto& layer : map.layers) {
    nlohmann::json l;
    l["pre_round"] = intervals_json(layer.pre_round);
    l["post_round"] = intervals_json(layer.post_round);
    l["post_clamp"] = intervals_json(layer.post_clamp);
    nlohmann::json tree = nlohmann::json::array();
    for (const auto& row : layer.tree) tree.push_back(intervals_json(row));
    l["tree"] = std::move(tree);
    layers.push_back(std::move(l));
  }
  doc["layers"] = std::move(layers);
  return doc;
}

} // namespace qnnv
