#include "qnnv/core/network.hpp"
#include "qnnv/core/error.hpp"

#include <algorithm>

namespace qnnv {

unsigned FixedPointLayer::max_clamp_bits() const {
  return clamp_bits.empty() ? 0u : *std::max_element(clamp_bits.begin(), clamp_bits.end());
}

std::size_t QuantizedNetwork::parameter_count() const {
  std::size_t count = 0;
  for (const auto& layer : layers) count += layer.outputs() * layer.inputs() + layer.bias.size();
  return count;
}

namespace {

std::string where(std::size_t layer) { return "layer " + std::to_string(layer) + ": "; }

void validate_layer(const FixedPointLayer& layer, std::size_t index, unsigned weight_bits) {
  const std::size_t n_out = layer.outputs();
  if (n_out == 0) throw Error(Errc::shape_mismatch, where(index) + "no output neurons");
  const std::size_t n_in = layer.inputs();
  if (n_in == 0) throw Error(Errc::shape_mismatch, where(index) + "no input columns");
  for (const auto& row : layer.weights)
    if (row.size() != n_in) throw Error(Errc::shape_mismatch, where(index) + "ragged weight matrix");
  if (layer.bias.size() != n_out)
    throw Error(Errc::shape_mismatch, where(index) + "bias length does not match weight rows");
  if (layer.bit_shift.size() != n_out)
    throw Error(Errc::shape_mismatch, where(index) + "bit_shift length does not match weight rows");
  if (layer.clamp_bits.size() != n_out)
    throw Error(Errc::shape_mismatch, where(index) + "clamp_bits length does not match weight rows");
  for (unsigned n : layer.clamp_bits)
    if (n == 0) throw Error(Errc::invalid_input, where(index) + "clamp_bits must be positive");
  if (layer.edge_shift) {
    const auto& amounts = layer.edge_shift->amounts;
    if (amounts.size() != n_out)
      throw Error(Errc::shape_mismatch, where(index) + "edge_shift rows do not match weight rows");
    for (const auto& row : amounts)
      if (row.size() != n_in)
        throw Error(Errc::shape_mismatch, where(index) + "edge_shift columns do not match weight columns");
  }
  const Integer limit = pow2(weight_bits);
  for (const auto& row : layer.weights)
    for (const auto& w : row)
      if (abs(w) >= limit)
        throw Error(Errc::weight_out_of_range,
                    where(index) + "weight " + w.str() + " exceeds declared width of " +
                        std::to_string(weight_bits) + " bits");
}

} // namespace

void validate(const QuantizedNetwork& net) {
  if (net.input_bits == 0) throw Error(Errc::invalid_input, "input_bits must be positive");
  if (net.weight_bits == 0) throw Error(Errc::invalid_input, "weight_bits must be positive");
  if (net.layers.empty()) throw Error(Errc::shape_mismatch, "network has no layers");
  for (std::size_t t = 0; t < net.layers.size(); ++t) {
    validate_layer(net.layers[t], t, net.weight_bits);
    if (t > 0 && net.layers[t].inputs() != net.layers[t - 1].outputs())
      throw Error(Errc::shape_mismatch, where(t) + "input count " + std::to_string(net.layers[t].inputs()) +
                                            " does not chain with previous layer's " +
                                            std::to_string(net.layers[t - 1].outputs()) + " outputs");
  }
}

} // namespace qnnv
