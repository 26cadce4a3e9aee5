#include "qnnv/encoder/bv_term.hpp"
#include "qnnv/core/error.hpp"

namespace qnnv::smt {

namespace {

std::string key_of(const TermNode& n) {
  std::string key;
  key.reserve(32 + n.name.size());
  key += std::to_string(static_cast<int>(n.kind));
  key += ':';
  key += std::to_string(n.width);
  for (TermRef a : n.args) {
    key += ',';
    key += std::to_string(a.index);
  }
  key += '|';
  key += std::to_string(n.param0);
  key += '|';
  key += std::to_string(n.param1);
  if (n.kind == Kind::constant || n.kind == Kind::bool_const) {
    key += '#';
    key += n.value.str();
  }
  if (n.kind == Kind::variable) {
    key += '$';
    key += n.name;
  }
  return key;
}

[[noreturn]] void width_error(const std::string& msg) { throw Error(Errc::invalid_input, "bit-vector term: " + msg); }

TermNode op(Kind kind, unsigned width, std::vector<TermRef> args, unsigned p0 = 0, unsigned p1 = 0) {
  return TermNode{kind, width, std::move(args), p0, p1, 0, {}};
}

Integer as_signed(const Integer& v, unsigned w) { return v >= pow2(w - 1) ? v - pow2(w) : v; }

} // namespace

std::optional<TermRef> TermStore::fold(const TermNode& n) {
  if (n.args.empty()) return std::nullopt;
  for (TermRef a : n.args) {
    const Kind k = node(a).kind;
    if (k != Kind::constant && k != Kind::bool_const) return std::nullopt;
  }
  auto v = [&](std::size_t i) -> const Integer& { return node(n.args[i]).value; };
  auto sv = [&](std::size_t i) { return as_signed(v(i), width(n.args[i])); };
  auto truth = [&](bool b) { return std::optional<TermRef>(boolean(b)); };
  auto bits = [&](const Integer& x) { return std::optional<TermRef>(constant(x, n.width)); };
  switch (n.kind) {
  case Kind::add: return bits(v(0) + v(1));
  case Kind::mul: return bits(v(0) * v(1));
  case Kind::neg: return bits(-v(0));
  case Kind::shl: return bits(v(0) * pow2(n.param0));
  case Kind::lshr: return bits(v(0) >> n.param0);
  case Kind::ashr: return bits(floor_div_pow2(sv(0), n.param0));
  case Kind::sign_extend: return bits(sv(0));
  case Kind::zero_extend: return bits(v(0));
  case Kind::extract: return bits(v(0) >> n.param1);
  case Kind::ite: return v(0) != 0 ? n.args[1] : n.args[2];
  case Kind::eq: return truth(v(0) == v(1));
  case Kind::slt: return truth(sv(0) < sv(1));
  case Kind::sle: return truth(sv(0) <= sv(1));
  case Kind::ult: return truth(v(0) < v(1));
  case Kind::ule: return truth(v(0) <= v(1));
  case Kind::bool_and:
    for (std::size_t i = 0; i < n.args.size(); ++i)
      if (v(i) == 0) return truth(false);
    return truth(true);
  case Kind::bool_or:
    for (std::size_t i = 0; i < n.args.size(); ++i)
      if (v(i) != 0) return truth(true);
    return truth(false);
  case Kind::bool_not: return truth(v(0) == 0);
  case Kind::bv_and: return bits(v(0) & v(1));
  case Kind::bv_or: return bits(v(0) | v(1));
  case Kind::bv_not: return bits(pow2(n.width) - 1 - v(0));
  default: return std::nullopt;
  }
}

namespace {

} // namespace

TermRef TermStore::intern(TermNode node) {
  if (auto folded = fold(node)) return *folded;
  std::string key = key_of(node);
  if (auto it = index_.find(key); it != index_.end()) return it->second;
  const TermRef ref{static_cast<std::uint32_t>(nodes_.size())};
  nodes_.push_back(std::move(node));
  index_.emplace(std::move(key), ref);
  return ref;
}

void TermStore::require_bv(TermRef a, const char* op) const {
  if (node(a).is_bool()) width_error(std::string(op) + " expects a bit-vector operand");
}

void TermStore::require_bool(TermRef a, const char* op) const {
  if (!node(a).is_bool()) width_error(std::string(op) + " expects a boolean operand");
}

void TermStore::require_same_width(TermRef a, TermRef b, const char* op) const {
  require_bv(a, op);
  require_bv(b, op);
  if (width(a) != width(b))
    width_error(std::string(op) + " operands differ in width (" + std::to_string(width(a)) + " vs " +
                std::to_string(width(b)) + ")");
}

TermRef TermStore::constant(const Integer& value, unsigned width) {
  if (width == 0) width_error("constant of width 0");
  const Integer modulus = pow2(width);
  Integer v = value % modulus;
  if (v < 0) v += modulus;
  return intern({Kind::constant, width, {}, 0, 0, std::move(v), {}});
}

TermRef TermStore::variable(const std::string& name, unsigned width) {
  if (width == 0) width_error("variable of width 0");
  return intern({Kind::variable, width, {}, 0, 0, 0, name});
}

TermRef TermStore::boolean(bool value) { return intern({Kind::bool_const, 0, {}, 0, 0, value ? 1 : 0, {}}); }

TermRef TermStore::add(TermRef a, TermRef b) {
  require_same_width(a, b, "bvadd");
  return intern(op(Kind::add, width(a), {a, b}));
}

TermRef TermStore::mul(TermRef a, TermRef b) {
  require_same_width(a, b, "bvmul");
  return intern(op(Kind::mul, width(a), {a, b}));
}

TermRef TermStore::neg(TermRef a) {
  require_bv(a, "bvneg");
  return intern(op(Kind::neg, width(a), {a}));
}

TermRef TermStore::shl(TermRef a, unsigned amount) {
  require_bv(a, "bvshl");
  if (amount == 0) return a;
  if (amount >= width(a)) return constant(0, width(a));
  return intern(op(Kind::shl, width(a), {a}, amount));
}

TermRef TermStore::lshr(TermRef a, unsigned amount) {
  require_bv(a, "bvlshr");
  if (amount == 0) return a;
  if (amount >= width(a)) return constant(0, width(a));
  return intern(op(Kind::lshr, width(a), {a}, amount));
}

TermRef TermStore::ashr(TermRef a, unsigned amount) {
  require_bv(a, "bvashr");
  if (amount == 0) return a;
  // Shifting by width-1 already replicates the sign bit everywhere.
  if (amount >= width(a)) amount = width(a) - 1;
  if (amount == 0) return a;
  return intern(op(Kind::ashr, width(a), {a}, amount));
}

TermRef TermStore::sign_extend(TermRef a, unsigned extra) {
  require_bv(a, "sign_extend");
  if (extra == 0) return a;
  return intern(op(Kind::sign_extend, width(a) + extra, {a}, extra));
}

TermRef TermStore::zero_extend(TermRef a, unsigned extra) {
  require_bv(a, "zero_extend");
  if (extra == 0) return a;
  return intern(op(Kind::zero_extend, width(a) + extra, {a}, extra));
}

TermRef TermStore::extract(TermRef a, unsigned high, unsigned low) {
  require_bv(a, "extract");
  if (high < low || high >= width(a)) width_error("extract range out of bounds");
  if (low == 0 && high + 1 == width(a)) return a;
  return intern(op(Kind::extract, high - low + 1, {a}, high, low));
}

TermRef TermStore::ite(TermRef cond, TermRef then_term, TermRef else_term) {
  require_bool(cond, "ite");
  if (node(then_term).is_bool() != node(else_term).is_bool() || width(then_term) != width(else_term))
    width_error("ite branches differ in sort");
  if (then_term == else_term) return then_term;
  if (node(cond).kind == Kind::bool_const) return node(cond).value != 0 ? then_term : else_term;
  return intern(op(Kind::ite, width(then_term), {cond, then_term, else_term}));
}

TermRef TermStore::eq(TermRef a, TermRef b) {
  require_same_width(a, b, "=");
  return intern(op(Kind::eq, 0, {a, b}));
}

TermRef TermStore::slt(TermRef a, TermRef b) {
  require_same_width(a, b, "bvslt");
  return intern(op(Kind::slt, 0, {a, b}));
}

TermRef TermStore::sle(TermRef a, TermRef b) {
  require_same_width(a, b, "bvsle");
  return intern(op(Kind::sle, 0, {a, b}));
}

TermRef TermStore::ult(TermRef a, TermRef b) {
  require_same_width(a, b, "bvult");
  return intern(op(Kind::ult, 0, {a, b}));
}

TermRef TermStore::ule(TermRef a, TermRef b) {
  require_same_width(a, b, "bvule");
  return intern(op(Kind::ule, 0, {a, b}));
}

TermRef TermStore::land(const std::vector<TermRef>& args) {
  if (args.empty()) return boolean(true);
  for (TermRef a : args) require_bool(a, "and");
  if (args.size() == 1) return args.front();
  return intern(op(Kind::bool_and, 0, args));
}

TermRef TermStore::lor(const std::vector<TermRef>& args) {
  if (args.empty()) return boolean(false);
  for (TermRef a : args) require_bool(a, "or");
  if (args.size() == 1) return args.front();
  return intern(op(Kind::bool_or, 0, args));
}

TermRef TermStore::lnot(TermRef a) {
  require_bool(a, "not");
  return intern(op(Kind::bool_not, 0, {a}));
}

TermRef TermStore::bvand(TermRef a, TermRef b) {
  require_same_width(a, b, "bvand");
  return intern(op(Kind::bv_and, width(a), {a, b}));
}

TermRef TermStore::bvor(TermRef a, TermRef b) {
  require_same_width(a, b, "bvor");
  return intern(op(Kind::bv_or, width(a), {a, b}));
}

TermRef TermStore::bvnot(TermRef a) {
  require_bv(a, "bvnot");
  return intern(op(Kind::bv_not, width(a), {a}));
}

} // namespace qnnv::smt
