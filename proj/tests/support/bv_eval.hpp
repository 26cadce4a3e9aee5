#pragma once

#include "qnnv/encoder/bv_term.hpp"

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace qnnv::test {

/// Evaluates terms of a TermStore under a variable assignment.  Bit-vector
/// results are unsigned values in [0, 2^width); booleans are 0 or 1.
class BvEvaluator {
public:
  explicit BvEvaluator(const smt::TermStore& terms) : terms_(terms) {}

  void set(const std::string& name, const Integer& value) {
    env_[name] = value;
    memo_.clear();
  }

  Integer value(smt::TermRef t) {
    if (memo_.size() < terms_.size()) memo_.resize(terms_.size());
    if (auto& m = memo_[t.index]) return *m;
    Integer v = compute(terms_.node(t));
    memo_[t.index] = v;
    return v;
  }

  bool holds(smt::TermRef t) { return value(t) != 0; }

  /// Two's-complement reading of a bit-vector term.
  Integer signed_value(smt::TermRef t) { return to_signed(value(t), terms_.width(t)); }

  static Integer to_signed(const Integer& v, unsigned w) { return v >= pow2(w - 1) ? v - pow2(w) : v; }

private:
  static Integer wrap(const Integer& v, unsigned w) {
    const Integer m = pow2(w);
    Integer r = v % m;
    if (r < 0) r += m;
    return r;
  }

  Integer compute(const smt::TermNode& n) {
    using smt::Kind;
    auto arg = [&](std::size_t i) { return value(n.args[i]); };
    auto sarg = [&](std::size_t i) { return signed_value(n.args[i]); };
    const unsigned w = n.width;
    switch (n.kind) {
    case Kind::constant: return n.value;
    case Kind::bool_const: return n.value;
    case Kind::variable: {
      auto it = env_.find(n.name);
      if (it == env_.end()) throw std::runtime_error("unbound variable " + n.name);
      return wrap(it->second, w);
    }
    case Kind::add: return wrap(arg(0) + arg(1), w);
    case Kind::mul: return wrap(arg(0) * arg(1), w);
    case Kind::neg: return wrap(-arg(0), w);
    case Kind::shl: return wrap(arg(0) * pow2(n.param0), w);
    case Kind::lshr: return arg(0) >> n.param0;
    case Kind::ashr: return wrap(floor_div_pow2(sarg(0), n.param0), w);
    case Kind::sign_extend: return wrap(sarg(0), w);
    case Kind::zero_extend: return arg(0);
    case Kind::extract: return wrap(arg(0) >> n.param1, w);
    case Kind::ite: return holds(n.args[0]) ? arg(1) : arg(2);
    case Kind::eq: return arg(0) == arg(1) ? 1 : 0;
    case Kind::slt: return sarg(0) < sarg(1) ? 1 : 0;
    case Kind::sle: return sarg(0) <= sarg(1) ? 1 : 0;
    case Kind::ult: return arg(0) < arg(1) ? 1 : 0;
    case Kind::ule: return arg(0) <= arg(1) ? 1 : 0;
    case Kind::bool_and:
      for (std::size_t i = 0; i < n.args.size(); ++i)
        if (!holds(n.args[i])) return 0;
      return 1;
    case Kind::bool_or:
      for (std::size_t i = 0; i < n.args.size(); ++i)
        if (holds(n.args[i])) return 1;
      return 0;
    case Kind::bool_not: return holds(n.args[0]) ? 0 : 1;
    case Kind::bv_and: return arg(0) & arg(1);
    case Kind::bv_or: return arg(0) | arg(1);
    case Kind::bv_not: return pow2(w) - 1 - arg(0);
    }
    throw std::runtime_error("unknown term kind");
  }

  const smt::TermStore& terms_;
  std::map<std::string, Integer> env_;
  std::vector<std::optional<Integer>> memo_;
};

} // namespace qnnv::test
