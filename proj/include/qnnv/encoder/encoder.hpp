#pragma once

#include "qnnv/absint/propagate.hpp"
#include "qnnv/encoder/redundancy.hpp"
#include "qnnv/encoder/smt_script.hpp"
#include "qnnv/encoder/widths.hpp"

#include <span>
#include <string>
#include <vector>

namespace qnnv::smt {

/// A bit-vector term together with how its bits are read.  Network inputs and
/// baseline activations are unsigned; everything else is two's complement.
struct BvValue {
  TermRef term;
  unsigned width = 0;
  bool is_signed = true;
};

/// Reinterprets `v` at `width` bits: extends by its own signedness or keeps
/// the low bits.  The result is congruent to v modulo 2^width and is tagged
/// signed; callers choose widths that hold the true value.
BvValue resize(TermStore& terms, const BvValue& v, unsigned width);

/// Sums `products` with a balanced binary addition tree of the shape
/// SumTree::balanced(products.size()).  With minimal_bits the width of every
/// node is minimal_bits(node_intervals[node]); otherwise leaves are widened to
/// `leaf_width` and every level adds one bit.
BvValue build_sum_tree(TermStore& terms, std::span<const BvValue> products, std::span<const Interval> node_intervals,
                       const EncodeOptions& opts, unsigned leaf_width);

/// ReLU-N on a two's-complement value whose range is `iv`.  With
/// dead_branch_removal the interval selects a constant, the identity, a
/// one-sided or the full clamp.
BvValue encode_relu_n(TermStore& terms, const BvValue& x, unsigned clamp_bits, const Interval& iv,
                      const EncodeOptions& opts, EncodeStats* stats = nullptr);

/// Which form encode_relu_n picks for a given interval.
enum class ClampForm { constant_zero, constant_top, identity, lower_only, upper_only, full };
ClampForm select_clamp_form(const Interval& iv, unsigned clamp_bits);

struct EncodedNetwork {
  std::vector<std::string> input_names;
  std::vector<BvValue> outputs;
  IntervalMap bounds;
};

/// Appends the encoding of `net` to `script`: one unsigned input variable per
/// network input named `<prefix>x<j>`, range assertions matching `ins`, and
/// every layer's neuron value as a named definition.
EncodedNetwork encode_network_into(SmtScript& script, const QuantizedNetwork& net, std::span<const Interval> ins,
                                   const EncodeOptions& opts, const std::string& prefix = "");

SmtScript encode_network(const QuantizedNetwork& net, std::span<const Interval> ins, const EncodeOptions& opts);

/// Encodes the negation of local robustness: some input of the l-infinity
/// ball around `sample` is classified differently from `label`.  Sat means
/// an adversarial input exists.
SmtScript encode_robustness_query(const QuantizedNetwork& net, std::span<const Integer> sample, std::size_t label,
                                  const Integer& epsilon, const EncodeOptions& opts);

} // namespace qnnv::smt
