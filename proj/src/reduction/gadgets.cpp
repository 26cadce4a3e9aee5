#include "qnnv/reduction/gadgets.hpp"
#include "qnnv/core/error.hpp"
#include "qnnv/core/interpreter.hpp"
#include "qnnv/core/model_io.hpp"
#include "qnnv/encoder/encoder.hpp"

#include <map>

namespace qnnv::qbf {

namespace {

struct Row {
  IntVector weights;
  std::vector<unsigned> shifts;
  Integer bias = 0;
  unsigned bit_shift = 0;
};

class GadgetBuilder {
public:
  explicit GadgetBuilder(const WordLayout& layout) : layout_(layout) {}

  void layer(std::vector<Row> rows, ShiftDirection dir = ShiftDirection::right) {
    FixedPointLayer l;
    bool shifted = false;
    EdgeShift es;
    es.direction = dir;
    for (auto& r : rows) {
      l.weights.push_back(std::move(r.weights));
      l.bias.push_back(r.bias);
      l.bit_shift.push_back(r.bit_shift);
      l.clamp_bits.push_back(layout_.width());
      for (unsigned s : r.shifts) shifted |= s != 0;
      es.amounts.push_back(std::move(r.shifts));
    }
    if (shifted) l.edge_shift = std::move(es);
    net_.layers.push_back(std::move(l));
  }

  // y | (y >> s) over two layers.
  void double_right(unsigned s) {
    layer({{{1}, {0}}, {{1}, {s}}});
    layer({{{1, 1}, {0, 0}}});
  }

  // Constant all-ones word, whatever the input.
  void all_ones() {
    const unsigned W = layout_.width();
    layer({{{0}, {0}, 1}});
    layer({{{1}, {W - 1}}}, ShiftDirection::left);
    for (unsigned j = 1; j <= layout_.k; ++j) double_right(1u << (j - 1));
  }

  QuantizedNetwork finish(const std::string& role) {
    net_.input_bits = layout_.width();
    net_.weight_bits = 1;
    net_.metadata["gadget"] = role;
    net_.metadata["word_width"] = std::to_string(layout_.width());
    validate(net_);
    return std::move(net_);
  }

private:
  WordLayout layout_;
  QuantizedNetwork net_;
};

std::map<int, std::size_t> gadget_index(const ReductionInstance& inst) {
  std::map<int, std::size_t> idx;
  for (std::size_t i = 0; i < inst.gadgets.size(); ++i) idx[inst.gadgets[i].var] = i;
  return idx;
}

} // namespace

QuantizedNetwork build_all_ones_gadget(const WordLayout& layout) {
  GadgetBuilder b(layout);
  b.all_ones();
  return b.finish("g");
}

QuantizedNetwork build_universal_gadget(const WordLayout& layout, unsigned u) {
  if (u >= layout.k) throw Error(Errc::invalid_input, "universal gadget index out of range");
  GadgetBuilder b(layout);
  b.all_ones();
  b.layer({{{1}, {1u << u}}, {{1}, {1u << (u + 1)}}});
  b.layer({{{1, -1}, {0, 0}}});
  for (unsigned j = 1; j + u + 1 <= layout.k; ++j) b.double_right(1u << (u + j));
  return b.finish("forall");
}

QuantizedNetwork build_existential_gadget(const WordLayout& layout, unsigned u) {
  if (u > layout.k) throw Error(Errc::invalid_input, "existential gadget index out of range");
  const unsigned W = layout.width();
  const unsigned block = 1u << u;
  GadgetBuilder b(layout);
  b.layer({{{1}, {0}, 0, W - block}});
  b.layer({{{1}, {W - block}}}, ShiftDirection::left);
  for (unsigned j = 1; j + u <= layout.k; ++j) b.double_right(1u << (u + j - 1));
  return b.finish("exists");
}

ReductionInstance build_reduction(const QbfFormula& f, unsigned max_universals) {
  const std::size_t k = f.universal_count();
  if (k > max_universals || k > 6)
    throw Error(Errc::width_budget, "formula has " + std::to_string(k) + " universals; word width 2^" +
                                        std::to_string(k) + " exceeds the budget of 2^" +
                                        std::to_string(std::min(max_universals, 6u)) + " bits");
  ReductionInstance inst;
  inst.layout.k = static_cast<unsigned>(k);
  inst.clauses = f.clauses;
  inst.all_ones = build_all_ones_gadget(inst.layout);
  unsigned u = 0;
  for (const auto& q : f.prefix) {
    VariableGadget g{q.var, q.quantifier, u, {}};
    if (q.quantifier == Quantifier::forall) {
      g.net = build_universal_gadget(inst.layout, u);
      ++u;
    } else {
      g.net = build_existential_gadget(inst.layout, u);
    }
    inst.gadgets.push_back(std::move(g));
  }
  return inst;
}

Integer universal_constant(const WordLayout& layout, unsigned u) {
  Integer c = 0;
  for (unsigned j = 1; j <= layout.width(); ++j)
    if (((j - 1) >> u) & 1u) bit_set(c, layout.bit_of(j));
  return c;
}

Integer tiled_block(const WordLayout& layout, unsigned u, const Integer& x) {
  const unsigned W = layout.width();
  const unsigned block = 1u << u;
  const Integer t = (x >> (W - block)) & (pow2(block) - 1);
  Integer out = 0;
  for (unsigned m = 1; m * block <= W; ++m) out |= t << (W - m * block);
  return out;
}

Integer block_input(const WordLayout& layout, unsigned u, const Integer& t) {
  return t << (layout.width() - (1u << u));
}

Integer evaluate_matrix(const ReductionInstance& inst, const std::vector<Integer>& words) {
  const auto idx = gadget_index(inst);
  const Integer mask = pow2(inst.layout.width()) - 1;
  Integer result = mask;
  for (const auto& clause : inst.clauses) {
    Integer c = 0;
    for (int lit : clause) {
      const Integer& w = words.at(idx.at(lit < 0 ? -lit : lit));
      c |= lit > 0 ? w : (mask ^ w);
    }
    result &= c;
  }
  return result;
}

bool brute_force_instance(const ReductionInstance& inst, unsigned max_free_bits) {
  const WordLayout& L = inst.layout;
  unsigned free_bits = 0;
  for (const auto& g : inst.gadgets)
    if (g.quantifier == Quantifier::exists) free_bits += 1u << g.preceding_universals;
  if (free_bits > max_free_bits)
    throw Error(Errc::size_guard, "instance has " + std::to_string(free_bits) + " free block bits, limit " +
                                      std::to_string(max_free_bits));
  if (L.width() > 64) throw Error(Errc::size_guard, "word width above 64 bits");

  const Integer zero = 0;
  auto word_of = [](const IntVector& out) { return out.at(0).convert_to<std::uint64_t>(); };
  const std::uint64_t target = word_of(eval_network(inst.all_ones, std::span(&zero, 1)));
  const std::uint64_t mask = L.width() == 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << L.width()) - 1;

  // Outputs of every gadget for each of its admissible inputs.
  std::vector<std::vector<std::uint64_t>> choices(inst.gadgets.size());
  for (std::size_t i = 0; i < inst.gadgets.size(); ++i) {
    const auto& g = inst.gadgets[i];
    if (g.quantifier == Quantifier::forall) {
      choices[i].push_back(word_of(eval_network(g.net, std::span(&zero, 1))));
      continue;
    }
    const std::uint64_t blocks = std::uint64_t{1} << (1u << g.preceding_universals);
    for (std::uint64_t t = 0; t < blocks; ++t) {
      const Integer x = block_input(L, g.preceding_universals, Integer(t));
      choices[i].push_back(word_of(eval_network(g.net, std::span(&x, 1))));
    }
  }

  const auto idx = gadget_index(inst);
  std::vector<std::vector<std::pair<std::size_t, bool>>> clauses;
  for (const auto& c : inst.clauses) {
    auto& out = clauses.emplace_back();
    for (int lit : c) out.emplace_back(idx.at(lit < 0 ? -lit : lit), lit > 0);
  }

  std::vector<std::size_t> pick(inst.gadgets.size(), 0);
  std::vector<std::uint64_t> word(inst.gadgets.size());
  for (;;) {
    for (std::size_t i = 0; i < word.size(); ++i) word[i] = choices[i][pick[i]];
    std::uint64_t value = mask;
    for (const auto& c : clauses) {
      std::uint64_t acc = 0;
      for (auto [i, positive] : c) acc |= positive ? word[i] : (~word[i] & mask);
      value &= acc;
    }
    if (value == target) return true;
    std::size_t i = 0;
    for (; i < pick.size(); ++i) {
      if (++pick[i] < choices[i].size()) break;
      pick[i] = 0;
    }
    if (i == pick.size()) return false;
  }
}

std::string gadget_prefix(std::size_t i) { return "f" + std::to_string(i + 1) + "_"; }

smt::SmtScript encode_instance(const ReductionInstance& inst, const smt::EncodeOptions& opts) {
  smt::SmtScript script;
  script.options = opts;
  const unsigned W = inst.layout.width();
  const std::vector<Interval> domain{Interval(0, pow2(W) - 1)};
  auto& T = script.terms;

  std::vector<smt::TermRef> words;
  for (std::size_t i = 0; i < inst.gadgets.size(); ++i) {
    auto enc = smt::encode_network_into(script, inst.gadgets[i].net, domain, opts, gadget_prefix(i));
    words.push_back(smt::resize(T, enc.outputs.at(0), W).term);
  }
  auto g = smt::encode_network_into(script, inst.all_ones, domain, opts, kAllOnesPrefix);
  const smt::TermRef target = smt::resize(T, g.outputs.at(0), W).term;

  const auto idx = gadget_index(inst);
  std::vector<smt::TermRef> conj;
  for (const auto& clause : inst.clauses) {
    std::optional<smt::TermRef> acc;
    for (int lit : clause) {
      smt::TermRef w = words.at(idx.at(lit < 0 ? -lit : lit));
      if (lit < 0) w = T.bvnot(w);
      acc = acc ? T.bvor(*acc, w) : w;
    }
    conj.push_back(acc ? *acc : T.constant(0, W));
  }
  smt::TermRef matrix = conj.empty() ? T.constant(pow2(W) - 1, W) : conj.front();
  for (std::size_t i = 1; i < conj.size(); ++i) matrix = T.bvand(matrix, conj[i]);
  script.define("psi", matrix);
  script.assertions.push_back(T.eq(matrix, target));
  return script;
}

nlohmann::json instance_to_json(const ReductionInstance& inst) {
  nlohmann::json doc;
  doc["word_width"] = inst.layout.width();
  doc["universals"] = inst.layout.k;
  doc["component_order"] = "component j is bit word_width - j";
  doc["valuation_rank"] = "sum_i y_i * 2^(i-1)";
  auto& gadgets = doc["gadgets"] = nlohmann::json::array();
  for (const auto& g : inst.gadgets)
    gadgets.push_back({{"var", g.var},
                       {"quantifier", g.quantifier == Quantifier::forall ? "forall" : "exists"},
                       {"preceding_universals", g.preceding_universals},
                       {"network", model_to_json(g.net)}});
  doc["g"] = model_to_json(inst.all_ones);
  doc["predicate"] = {{"matrix", inst.clauses}, {"equals", "g"}};
  return doc;
}

} // namespace qnnv::qbf
