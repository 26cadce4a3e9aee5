#include "qnnv/encoder/encoder.hpp"
#include "qnnv/core/error.hpp"
#include "qnnv/core/interpreter.hpp"

#include <algorithm>
#include <map>

namespace qnnv::smt {

BvValue resize(TermStore& terms, const BvValue& v, unsigned width) {
  if (width == v.width) return {v.term, width, true};
  if (width > v.width) {
    const unsigned extra = width - v.width;
    return {v.is_signed ? terms.sign_extend(v.term, extra) : terms.zero_extend(v.term, extra), width, true};
  }
  return {terms.extract(v.term, width - 1, 0), width, true};
}

BvValue build_sum_tree(TermStore& terms, std::span<const BvValue> products, std::span<const Interval> node_intervals,
                       const EncodeOptions& opts, unsigned leaf_width) {
  if (products.empty()) throw Error(Errc::invalid_input, "build_sum_tree: no summands");
  const SumTree shape = SumTree::balanced(products.size());
  if (opts.minimal_bits && node_intervals.size() != shape.nodes.size())
    throw Error(Errc::shape_mismatch, "build_sum_tree: expected " + std::to_string(shape.nodes.size()) +
                                          " node intervals, got " + std::to_string(node_intervals.size()));
  if (products.size() == 1) return products.front();

  std::vector<BvValue> values;
  values.reserve(shape.nodes.size());
  for (std::size_t n = 0; n < shape.nodes.size(); ++n) {
    const SumTree::Node& node = shape.nodes[n];
    const unsigned width = opts.minimal_bits ? minimal_bits(node_intervals[n]) : leaf_width + node.height;
    if (node.is_leaf()) {
      values.push_back(resize(terms, products[static_cast<std::size_t>(node.leaf)], width));
      continue;
    }
    const BvValue lhs = resize(terms, values[node.left], width);
    const BvValue rhs = resize(terms, values[node.right], width);
    values.push_back({terms.add(lhs.term, rhs.term), width, true});
  }
  return values.back();
}

ClampForm select_clamp_form(const Interval& iv, unsigned clamp_bits) {
  const Integer top = pow2(clamp_bits) - 1;
  if (iv.hi <= 0) return ClampForm::constant_zero;
  if (iv.lo >= top) return ClampForm::constant_top;
  if (iv.lo >= 0 && iv.hi <= top) return ClampForm::identity;
  if (iv.lo < 0 && iv.hi <= top) return ClampForm::lower_only;
  if (iv.lo >= 0 && iv.hi > top) return ClampForm::upper_only;
  return ClampForm::full;
}

BvValue encode_relu_n(TermStore& terms, const BvValue& x, unsigned clamp_bits, const Interval& iv,
                      const EncodeOptions& opts, EncodeStats* stats) {
  const ClampForm form = opts.dead_branch_removal ? select_clamp_form(iv, clamp_bits) : ClampForm::full;
  const Integer top = pow2(clamp_bits) - 1;
  const unsigned out_width = opts.minimal_bits ? minimal_bits(clamp_relu_n(iv, clamp_bits)) : clamp_bits;
  const bool out_signed = opts.minimal_bits;

  if (form == ClampForm::constant_zero) return {terms.constant(0, out_width), out_width, out_signed};
  if (form == ClampForm::constant_top) return {terms.constant(top, out_width), out_width, out_signed};

  // Compare in a width that holds both x and 2^N - 1 as signed values.
  const unsigned cw = std::max(x.width + (x.is_signed ? 0u : 1u), clamp_bits + 1);
  const BvValue xc = resize(terms, x, cw);
  const TermRef zero = terms.constant(0, cw);
  const TermRef upper = terms.constant(top, cw);
  TermRef r = xc.term;
  std::size_t decisions = 0;
  switch (form) {
  case ClampForm::identity: break;
  case ClampForm::lower_only:
    r = terms.ite(terms.slt(xc.term, zero), zero, xc.term);
    decisions = 1;
    break;
  case ClampForm::upper_only:
    r = terms.ite(terms.slt(upper, xc.term), upper, xc.term);
    decisions = 1;
    break;
  case ClampForm::full:
    r = terms.ite(terms.slt(xc.term, zero), zero, terms.ite(terms.slt(upper, xc.term), upper, xc.term));
    decisions = 2;
    break;
  default: break;
  }
  if (stats) stats->decision_points += decisions;
  if (out_signed) return resize(terms, {r, cw, true}, out_width);
  return {terms.extract(r, clamp_bits - 1, 0), clamp_bits, false};
}

namespace {

class LayerEncoder {
public:
  LayerEncoder(SmtScript& script, const FixedPointLayer& layer, const LayerBounds& bounds, const EncodeOptions& opts,
               unsigned weight_bits)
      : script_(script), terms_(script.terms), layer_(layer), bounds_(bounds), opts_(opts), weight_bits_(weight_bits) {}

  std::vector<BvValue> encode(const std::vector<BvValue>& sources, const std::string& name_prefix) {
    const std::size_t n_out = layer_.outputs();
    const std::size_t n_in = layer_.inputs();
    prepare_widths(sources);

    // products[i][j]: w_ij * shift(x_j, e_ij) at the leaf width of row i.
    std::vector<std::vector<BvValue>> products(n_out, std::vector<BvValue>(n_in));
    for (std::size_t j = 0; j < n_in; ++j) encode_column(sources, j, products);

    std::vector<BvValue> outputs;
    outputs.reserve(n_out);
    for (std::size_t i = 0; i < n_out; ++i) {
      std::vector<BvValue> summands = std::move(products[i]);
      if (layer_.bias[i] != 0) {
        const unsigned w = leaf_width(i, n_in);
        summands.push_back({terms_.constant(layer_.bias[i], w), w, true});
      }
      const BvValue acc = build_sum_tree(terms_, summands, bounds_.tree[i], opts_, naive_leaf_width_[i]);
      script_.stats.accumulators += 1;
      script_.stats.accumulator_bits += acc.width;
      script_.stats.max_width = std::max(script_.stats.max_width, acc.width);

      BvValue rounded{terms_.ashr(acc.term, layer_.bit_shift[i]), acc.width, true};
      if (opts_.minimal_bits) rounded = resize(terms_, rounded, minimal_bits(bounds_.post_round[i]));
      BvValue y = encode_relu_n(terms_, rounded, layer_.clamp_bits[i], bounds_.post_round[i], opts_, &script_.stats);
      script_.define(name_prefix + std::to_string(i), y.term);
      outputs.push_back(y);
    }
    return outputs;
  }

private:
  void prepare_widths(const std::vector<BvValue>& sources) {
    unsigned source_bits = 0;
    for (const auto& s : sources) source_bits = std::max(source_bits, s.width);
    unsigned max_left = 0;
    if (layer_.edge_shift && layer_.edge_shift->direction == ShiftDirection::left)
      for (const auto& row : layer_.edge_shift->amounts)
        for (unsigned e : row) max_left = std::max(max_left, e);
    // Operand width k of the worst-case accumulator formula.
    const unsigned k = std::max(weight_bits_, source_bits + max_left);
    naive_leaf_width_.resize(layer_.outputs());
    for (std::size_t i = 0; i < layer_.outputs(); ++i) {
      unsigned w = 2 * k + 1;
      if (layer_.bias[i] != 0) w = std::max(w, signed_width(layer_.bias[i]));
      naive_leaf_width_[i] = w;
    }
    leaf_nodes_.assign(layer_.outputs(), {});
    for (std::size_t i = 0; i < layer_.outputs(); ++i) {
      const SumTree shape = SumTree::balanced(summand_count(layer_, i));
      leaf_nodes_[i].resize(shape.leaves);
      for (std::size_t n = 0; n < shape.nodes.size(); ++n)
        if (shape.nodes[n].is_leaf()) leaf_nodes_[i][static_cast<std::size_t>(shape.nodes[n].leaf)] = n;
    }
  }

  unsigned leaf_width(std::size_t row, std::size_t leaf) const {
    if (!opts_.minimal_bits) return naive_leaf_width_[row];
    return minimal_bits(bounds_.tree[row][leaf_nodes_[row][leaf]]);
  }

  BvValue shifted_source(const BvValue& x, unsigned amount) {
    if (amount == 0) return x;
    if (layer_.shift_direction() == ShiftDirection::right)
      return {terms_.lshr(x.term, amount), x.width, x.is_signed};
    const TermRef wide = x.is_signed ? terms_.sign_extend(x.term, amount) : terms_.zero_extend(x.term, amount);
    return {terms_.shl(wide, amount), x.width + amount, x.is_signed};
  }

  BvValue fresh_product(const BvValue& xs, const Integer& w, unsigned width) {
    const BvValue xr = resize(terms_, xs, width);
    script_.stats.multiplications += 1;
    return {terms_.mul(xr.term, terms_.constant(w, width)), width, true};
  }

  void encode_column(const std::vector<BvValue>& sources, std::size_t j,
                     std::vector<std::vector<BvValue>>& products) {
    // Rows sharing an edge shift see the same shifted source value.
    std::map<unsigned, std::vector<std::size_t>> groups;
    for (std::size_t i = 0; i < layer_.outputs(); ++i) groups[layer_.edge_shift_at(i, j)].push_back(i);

    for (const auto& [amount, rows] : groups) {
      const BvValue xs = shifted_source(sources[j], amount);
      if (!opts_.redundancy_elimination) {
        for (std::size_t i : rows) products[i][j] = fresh_product(xs, layer_.weights[i][j], leaf_width(i, j));
        continue;
      }
      IntVector column;
      column.reserve(rows.size());
      for (std::size_t i : rows) column.push_back(layer_.weights[i][j]);
      const MultiplicationPlan plan = plan_redundancy_elimination(column);

      std::vector<BvValue> made(rows.size());
      for (std::size_t p = 0; p < rows.size(); ++p)
        if (plan[p].action == MulAction::fresh_mul) made[p] = fresh_product(xs, column[p], leaf_width(rows[p], j));
      for (std::size_t p = 0; p < rows.size(); ++p) {
        const std::size_t i = rows[p];
        const unsigned width = leaf_width(i, j);
        const PlanStep& step = plan[p];
        BvValue v;
        switch (step.action) {
        case MulAction::zero: v = {terms_.constant(0, width), width, true}; break;
        case MulAction::identity: v = resize(terms_, xs, width); break;
        case MulAction::fresh_mul: v = made[p]; break;
        case MulAction::reuse: v = resize(terms_, made[step.source], width); break;
        case MulAction::neg_reuse:
          v = resize(terms_, made[step.source], width);
          v.term = terms_.neg(v.term);
          script_.stats.negations += 1;
          break;
        case MulAction::shift_reuse:
          // Widen to the consumer's width before shifting so no high bits drop.
          v = resize(terms_, made[step.source], width);
          v.term = terms_.shl(v.term, step.shift);
          script_.stats.shifts += 1;
          break;
        }
        products[i][j] = v;
      }
    }
  }

  SmtScript& script_;
  TermStore& terms_;
  const FixedPointLayer& layer_;
  const LayerBounds& bounds_;
  const EncodeOptions& opts_;
  unsigned weight_bits_;
  std::vector<unsigned> naive_leaf_width_;
  std::vector<std::vector<std::size_t>> leaf_nodes_;
};

} // namespace

EncodedNetwork encode_network_into(SmtScript& script, const QuantizedNetwork& net, std::span<const Interval> ins,
                                   const EncodeOptions& opts, const std::string& prefix) {
  EncodedNetwork out;
  out.bounds = propagate_network(net, ins);
  script.options = opts;
  TermStore& terms = script.terms;

  std::vector<BvValue> values;
  const Integer input_max = net.input_max();
  std::vector<TermRef> ranges;
  for (std::size_t j = 0; j < net.input_size(); ++j) {
    const std::string name = prefix + "x" + std::to_string(j);
    script.declare(name, net.input_bits);
    out.input_names.push_back(name);
    const TermRef var = terms.variable(name, net.input_bits);
    values.push_back({var, net.input_bits, false});
    if (ins[j].lo > 0) ranges.push_back(terms.ule(terms.constant(ins[j].lo, net.input_bits), var));
    if (ins[j].hi < input_max) ranges.push_back(terms.ule(var, terms.constant(ins[j].hi, net.input_bits)));
  }
  for (TermRef r : ranges) script.assertions.push_back(r);

  for (std::size_t t = 0; t < net.layers.size(); ++t) {
    LayerEncoder layer(script, net.layers[t], out.bounds.layers[t], opts, net.weight_bits);
    values = layer.encode(values, prefix + "l" + std::to_string(t) + "_y");
  }
  const std::size_t last = net.layers.size() - 1;
  for (std::size_t c = 0; c < values.size(); ++c)
    script.outputs.push_back(prefix + "l" + std::to_string(last) + "_y" + std::to_string(c));
  out.outputs = std::move(values);
  return out;
}

SmtScript encode_network(const QuantizedNetwork& net, std::span<const Interval> ins, const EncodeOptions& opts) {
  SmtScript script;
  encode_network_into(script, net, ins, opts);
  return script;
}

SmtScript encode_robustness_query(const QuantizedNetwork& net, std::span<const Integer> sample, std::size_t label,
                                  const Integer& epsilon, const EncodeOptions& opts) {
  if (label >= net.output_size())
    throw Error(Errc::invalid_input, "label " + std::to_string(label) + " out of range for " +
                                         std::to_string(net.output_size()) + " outputs");
  if (sample.size() != net.input_size())
    throw Error(Errc::shape_mismatch, "sample has " + std::to_string(sample.size()) + " components, network expects " +
                                          std::to_string(net.input_size()));
  const IntervalVector ball = input_intervals_for_ball(sample, epsilon, net.input_bits);
  SmtScript script;
  EncodedNetwork enc = encode_network_into(script, net, ball, opts);
  TermStore& terms = script.terms;

  unsigned cw = 0;
  for (const auto& y : enc.outputs) cw = std::max(cw, y.width + (y.is_signed ? 0u : 1u));
  const TermRef target = resize(terms, enc.outputs[label], cw).term;
  std::vector<TermRef> beats;
  for (std::size_t c = 0; c < enc.outputs.size(); ++c) {
    if (c == label) continue;
    const TermRef other = resize(terms, enc.outputs[c], cw).term;
    // Under the lowest-index tie-break, c wins ties only when c < label.
    beats.push_back(wins_tie(c, label) ? terms.sle(target, other) : terms.slt(target, other));
  }
  script.assertions.push_back(terms.lor(beats));
  return script;
}

} // namespace qnnv::smt
