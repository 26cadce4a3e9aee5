#pragma once

#include "qnnv/core/integer.hpp"

#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

namespace qnnv::smt {

enum class Kind : std::uint8_t {
  constant,
  variable,
  add,
  mul,
  neg,
  shl,  // shift amount stored in `param0`
  lshr, // "
  ashr, // "
  sign_extend,
  zero_extend,
  extract, // bits [param0 .. param1], param0 >= param1
  ite,
  eq,
  slt,
  sle,
  ult,
  ule,
  bool_and,
  bool_or,
  bool_not,
  bool_const,
  bv_and,
  bv_or,
  bv_not,
};

struct TermRef {
  std::uint32_t index = 0;
  friend auto operator<=>(TermRef, TermRef) = default;
};

struct TermNode {
  Kind kind;
  unsigned width; // 0 for boolean terms
  std::vector<TermRef> args;
  unsigned param0 = 0;
  unsigned param1 = 0;
  Integer value; // constants: value in [0, 2^width); bool_const: 0 or 1
  std::string name;

  bool is_bool() const { return width == 0; }
};

/// Hash-consed store of bit-vector terms.  Structurally identical terms share
/// one node, so the store is a DAG by construction: a node can only refer to
/// nodes created before it.  Operations on constants fold to constants.
/// Builders check operand widths and throw on a mismatch.
class TermStore {
public:
  TermRef constant(const Integer& value, unsigned width); // value taken mod 2^width
  TermRef variable(const std::string& name, unsigned width);
  TermRef boolean(bool value);

  TermRef add(TermRef a, TermRef b);
  TermRef mul(TermRef a, TermRef b);
  TermRef neg(TermRef a);

  // Constant shift amounts.  Amounts at or past the width fold to the
  // mathematically equivalent term so no unrepresentable constant is emitted.
  TermRef shl(TermRef a, unsigned amount);
  TermRef lshr(TermRef a, unsigned amount);
  TermRef ashr(TermRef a, unsigned amount);

  TermRef sign_extend(TermRef a, unsigned extra);
  TermRef zero_extend(TermRef a, unsigned extra);
  TermRef extract(TermRef a, unsigned high, unsigned low);

  TermRef ite(TermRef cond, TermRef then_term, TermRef else_term);
  TermRef eq(TermRef a, TermRef b);
  TermRef slt(TermRef a, TermRef b);
  TermRef sle(TermRef a, TermRef b);
  TermRef ult(TermRef a, TermRef b);
  TermRef ule(TermRef a, TermRef b);

  TermRef land(const std::vector<TermRef>& args); // empty -> true
  TermRef lor(const std::vector<TermRef>& args);  // empty -> false
  TermRef lnot(TermRef a);

  TermRef bvand(TermRef a, TermRef b);
  TermRef bvor(TermRef a, TermRef b);
  TermRef bvnot(TermRef a);

  const TermNode& node(TermRef ref) const { return nodes_[ref.index]; }
  unsigned width(TermRef ref) const { return nodes_[ref.index].width; }
  std::size_t size() const { return nodes_.size(); }

private:
  TermRef intern(TermNode node);
  std::optional<TermRef> fold(const TermNode& node);
  void require_bv(TermRef a, const char* op) const;
  void require_bool(TermRef a, const char* op) const;
  void require_same_width(TermRef a, TermRef b, const char* op) const;

  std::vector<TermNode> nodes_;
  std::unordered_map<std::string, TermRef> index_;
};

} // namespace qnnv::smt
