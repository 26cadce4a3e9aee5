#pragma once

#include "qnnv/core/network.hpp"
#include "qnnv/encoder/smt_script.hpp"
#include "qnnv/reduction/qbf.hpp"

#include "json.hpp"

namespace qnnv::qbf {

/// Word layout shared by every gadget: a word has W = 2^k bits and its
/// component j (1-based) is bit W - j, so component 1 is the most
/// significant bit.
struct WordLayout {
  unsigned k = 0;
  unsigned width() const { return 1u << k; }
  unsigned bit_of(unsigned component) const { return width() - component; }
};

struct VariableGadget {
  int var;
  Quantifier quantifier;
  unsigned preceding_universals; // u(i)
  QuantizedNetwork net;
};

/// Gadget networks f_1..f_n and g, each with a single W-bit input neuron and
/// a single W-bit output neuron, plus the CNF matrix that the predicate
/// evaluates bit-wise.
struct ReductionInstance {
  WordLayout layout;
  std::vector<VariableGadget> gadgets; // prefix order
  QuantizedNetwork all_ones;           // g
  std::vector<std::vector<int>> clauses;
};

/// Largest universal count accepted by default (word width 16).
inline constexpr unsigned kDefaultMaxUniversals = 4;

QuantizedNetwork build_all_ones_gadget(const WordLayout& layout);
QuantizedNetwork build_universal_gadget(const WordLayout& layout, unsigned u);
QuantizedNetwork build_existential_gadget(const WordLayout& layout, unsigned u);

/// Throws Error(width_budget) when the universal count exceeds
/// `max_universals`.
ReductionInstance build_reduction(const QbfFormula& f, unsigned max_universals = kDefaultMaxUniversals);

/// The constant a universal gadget must produce: component j is the value of
/// the (u+1)-th universal in valuation j-1.
Integer universal_constant(const WordLayout& layout, unsigned u);

/// Word obtained by repeating the first 2^u components of `x`.
Integer tiled_block(const WordLayout& layout, unsigned u, const Integer& x);

/// Bit-wise CNF over gadget output words.  Words are indexed like
/// inst.gadgets.
Integer evaluate_matrix(const ReductionInstance& inst, const std::vector<Integer>& words);

/// Satisfiability of the instance by enumerating every existential truth
/// table block.  Throws Error(size_guard) above `max_free_bits` block bits.
bool brute_force_instance(const ReductionInstance& inst, unsigned max_free_bits = 24);

/// Input word that places truth table block `t` in the first 2^u components.
Integer block_input(const WordLayout& layout, unsigned u, const Integer& t);

/// Variable names used for gadget i's input and g's input in encode_instance.
std::string gadget_prefix(std::size_t i);
inline const std::string kAllOnesPrefix = "g_";

/// Encodes every gadget with the network encoder over its full input domain
/// and asserts that the bit-wise matrix equals g's output.
smt::SmtScript encode_instance(const ReductionInstance& inst,
                               const smt::EncodeOptions& opts = smt::EncodeOptions::all_on());

nlohmann::json instance_to_json(const ReductionInstance& inst);

} // namespace qnnv::qbf
