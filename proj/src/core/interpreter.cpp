#include "qnnv/core/interpreter.hpp"
#include "qnnv/core/error.hpp"

namespace qnnv {

Integer round_shift(const Integer& v, unsigned k) { return floor_div_pow2(v, k); }

Integer clamp_relu_n(const Integer& v, unsigned n) {
  if (v < 0) return 0;
  const Integer top = pow2(n) - 1;
  return v > top ? top : v;
}

Integer shift_apply(const Integer& x, unsigned amount, ShiftDirection direction) {
  if (amount == 0) return x;
  if (direction == ShiftDirection::left) return x * pow2(amount);
  return floor_div_pow2(x, amount);
}

LayerTrace trace_layer(const FixedPointLayer& layer, std::span<const Integer> x) {
  if (x.size() != layer.inputs())
    throw Error(Errc::shape_mismatch, "layer expects " + std::to_string(layer.inputs()) + " inputs, got " +
                                          std::to_string(x.size()));
  const ShiftDirection direction = layer.shift_direction();
  LayerTrace trace;
  trace.pre_round.reserve(layer.outputs());
  trace.post_round.reserve(layer.outputs());
  trace.output.reserve(layer.outputs());
  for (std::size_t i = 0; i < layer.outputs(); ++i) {
    Integer acc = layer.bias[i];
    const auto& row = layer.weights[i];
    for (std::size_t j = 0; j < row.size(); ++j) {
      if (row[j] == 0) continue;
      acc += row[j] * shift_apply(x[j], layer.edge_shift_at(i, j), direction);
    }
    Integer rounded = round_shift(acc, layer.bit_shift[i]);
    trace.output.push_back(clamp_relu_n(rounded, layer.clamp_bits[i]));
    trace.pre_round.push_back(std::move(acc));
    trace.post_round.push_back(std::move(rounded));
  }
  return trace;
}

IntVector eval_layer(const FixedPointLayer& layer, std::span<const Integer> x) {
  return trace_layer(layer, x).output;
}

namespace {

void check_input_domain(const QuantizedNetwork& net, std::span<const Integer> x) {
  if (x.size() != net.input_size())
    throw Error(Errc::shape_mismatch, "network expects " + std::to_string(net.input_size()) + " inputs, got " +
                                          std::to_string(x.size()));
  const Integer top = net.input_max();
  for (std::size_t j = 0; j < x.size(); ++j)
    if (x[j] < 0 || x[j] > top)
      throw Error(Errc::invalid_input, "input " + std::to_string(j) + " = " + x[j].str() + " outside [0, " +
                                           top.str() + "]");
}

} // namespace

std::vector<LayerTrace> trace_network(const QuantizedNetwork& net, std::span<const Integer> x) {
  check_input_domain(net, x);
  std::vector<LayerTrace> traces;
  traces.reserve(net.layers.size());
  std::span<const Integer> current = x;
  for (const auto& layer : net.layers) {
    traces.push_back(trace_layer(layer, current));
    current = traces.back().output;
  }
  return traces;
}

IntVector eval_network(const QuantizedNetwork& net, std::span<const Integer> x) {
  check_input_domain(net, x);
  IntVector current(x.begin(), x.end());
  for (const auto& layer : net.layers) current = eval_layer(layer, current);
  return current;
}

std::size_t argmax(std::span<const Integer> outputs) {
  if (outputs.empty()) throw Error(Errc::invalid_input, "argmax of an empty output vector");
  std::size_t best = 0;
  for (std::size_t c = 1; c < outputs.size(); ++c)
    if (outputs[c] > outputs[best]) best = c;
  return best;
}

std::size_t classify(const QuantizedNetwork& net, std::span<const Integer> x) {
  const IntVector out = eval_network(net, x);
  return argmax(out);
}

} // namespace qnnv
