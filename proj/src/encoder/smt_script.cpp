#include "qnnv/encoder/smt_script.hpp"

#include <sstream>
#include <unordered_map>

namespace qnnv::smt {

std::string EncodeOptions::footprint() const {
  std::string out;
  auto add = [&out](bool on, const char* tag) {
    if (!on) return;
    if (!out.empty()) out += '+';
    out += tag;
  };
  add(dead_branch_removal, "dbr");
  add(minimal_bits, "mb");
  add(redundancy_elimination, "re");
  return out.empty() ? "baseline" : out;
}

void SmtScript::declare(const std::string& name, unsigned width) {
  declarations.push_back({name, width});
  inputs.push_back(name);
}

TermRef SmtScript::define(const std::string& name, TermRef term) {
  definitions.emplace_back(name, term);
  return term;
}

namespace {

std::string sort_of(const TermNode& n) {
  if (n.is_bool()) return "Bool";
  return "(_ BitVec " + std::to_string(n.width) + ")";
}

const char* op_name(Kind k) {
  switch (k) {
  case Kind::add: return "bvadd";
  case Kind::mul: return "bvmul";
  case Kind::neg: return "bvneg";
  case Kind::shl: return "bvshl";
  case Kind::lshr: return "bvlshr";
  case Kind::ashr: return "bvashr";
  case Kind::ite: return "ite";
  case Kind::eq: return "=";
  case Kind::slt: return "bvslt";
  case Kind::sle: return "bvsle";
  case Kind::ult: return "bvult";
  case Kind::ule: return "bvule";
  case Kind::bool_and: return "and";
  case Kind::bool_or: return "or";
  case Kind::bool_not: return "not";
  case Kind::bv_and: return "bvand";
  case Kind::bv_or: return "bvor";
  case Kind::bv_not: return "bvnot";
  default: return "?";
  }
}

bool is_leaf(const TermNode& n) {
  return n.kind == Kind::constant || n.kind == Kind::variable || n.kind == Kind::bool_const;
}

std::string constant_text(const Integer& value, unsigned width) {
  return "(_ bv" + value.str() + " " + std::to_string(width) + ")";
}

class Emitter {
public:
  explicit Emitter(const SmtScript& script) : script_(script), terms_(script.terms) {}

  std::string run() {
    count_parents();
    for (const auto& [name, term] : script_.definitions)
      if (!names_.count(term.index)) names_[term.index] = name;
    for (const auto& [index, count] : parents_) {
      if (count < 2 || names_.count(index)) continue;
      if (is_leaf(terms_.node(TermRef{index}))) continue;
      names_[index] = "t" + std::to_string(index);
    }

    out_ << "(set-option :produce-models true)\n(set-logic QF_BV)\n";
    for (const auto& d : script_.declarations)
      out_ << "(declare-fun " << d.name << " () (_ BitVec " << d.width << "))\n";
    for (const auto& [name, term] : script_.definitions) {
      emit_definitions_below(term);
      // A term may be registered under several names; alias the extras.
      if (names_.at(term.index) != name)
        out_ << "(define-fun " << name << " () " << sort_of(terms_.node(term)) << ' ' << names_.at(term.index)
             << ")\n";
    }
    for (TermRef a : script_.assertions) emit_definitions_below(a);
    for (TermRef a : script_.assertions) out_ << "(assert " << expr(a) << ")\n";
    out_ << "(check-sat)\n";
    if (!script_.inputs.empty()) {
      out_ << "(get-value (";
      for (std::size_t i = 0; i < script_.inputs.size(); ++i) out_ << (i ? " " : "") << script_.inputs[i];
      out_ << "))\n";
    }
    out_ << "(exit)\n";
    return out_.str();
  }

private:
  void count_parents() {
    std::vector<TermRef> stack;
    std::vector<bool> seen(terms_.size(), false);
    auto visit_root = [&](TermRef r) {
      parents_[r.index] += 0;
      if (seen[r.index]) return;
      seen[r.index] = true;
      stack.push_back(r);
      while (!stack.empty()) {
        TermRef t = stack.back();
        stack.pop_back();
        for (TermRef a : terms_.node(t).args) {
          ++parents_[a.index];
          if (!seen[a.index]) {
            seen[a.index] = true;
            stack.push_back(a);
          }
        }
      }
    };
    for (const auto& def : script_.definitions) visit_root(def.second);
    for (TermRef a : script_.assertions) visit_root(a);
  }

  // Post-order walk that prints a define-fun for every named term not yet
  // emitted, so each definition only mentions names printed before it.
  void emit_definitions_below(TermRef root) {
    struct Frame {
      TermRef term;
      std::size_t next_arg;
    };
    if (emitted_.count(root.index)) return;
    std::vector<Frame> stack{{root, 0}};
    std::unordered_map<std::uint32_t, bool> on_stack{{root.index, true}};
    while (!stack.empty()) {
      Frame& f = stack.back();
      const TermNode& n = terms_.node(f.term);
      if (f.next_arg < n.args.size()) {
        TermRef child = n.args[f.next_arg++];
        if (!emitted_.count(child.index) && !visited_.count(child.index)) stack.push_back({child, 0});
        continue;
      }
      const TermRef t = f.term;
      stack.pop_back();
      visited_.insert({t.index, true});
      if (auto it = names_.find(t.index); it != names_.end() && !emitted_.count(t.index)) {
        const std::string body = inline_expr(t);
        out_ << "(define-fun " << it->second << " () " << sort_of(n) << ' ' << body << ")\n";
        emitted_.insert({t.index, true});
      }
    }
  }

  std::string expr(TermRef t) const {
    if (auto it = names_.find(t.index); it != names_.end() && emitted_.count(t.index)) return it->second;
    return inline_expr(t);
  }

  std::string inline_expr(TermRef t) const {
    const TermNode& n = terms_.node(t);
    switch (n.kind) {
    case Kind::constant: return constant_text(n.value, n.width);
    case Kind::variable: return n.name;
    case Kind::bool_const: return n.value != 0 ? "true" : "false";
    case Kind::shl:
    case Kind::lshr:
    case Kind::ashr:
      return std::string("(") + op_name(n.kind) + ' ' + expr(n.args[0]) + ' ' + constant_text(n.param0, n.width) +
             ')';
    case Kind::sign_extend: return "((_ sign_extend " + std::to_string(n.param0) + ") " + expr(n.args[0]) + ')';
    case Kind::zero_extend: return "((_ zero_extend " + std::to_string(n.param0) + ") " + expr(n.args[0]) + ')';
    case Kind::extract:
      return "((_ extract " + std::to_string(n.param0) + ' ' + std::to_string(n.param1) + ") " + expr(n.args[0]) +
             ')';
    default: {
      std::string s = std::string("(") + op_name(n.kind);
      for (TermRef a : n.args) s += ' ' + expr(a);
      return s + ')';
    }
    }
  }

  const SmtScript& script_;
  const TermStore& terms_;
  std::ostringstream out_;
  std::unordered_map<std::uint32_t, std::size_t> parents_;
  std::unordered_map<std::uint32_t, std::string> names_;
  std::unordered_map<std::uint32_t, bool> emitted_;
  std::unordered_map<std::uint32_t, bool> visited_;
};

} // namespace

std::string emit_smtlib(const SmtScript& script) { return Emitter(script).run(); }

} // namespace qnnv::smt
