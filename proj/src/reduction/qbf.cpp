#include "qnnv/reduction/qbf.hpp"
#include "qnnv/core/error.hpp"

#include <fstream>
#include <set>
#include <sstream>

namespace qnnv::qbf {

std::size_t QbfFormula::universal_count() const {
  std::size_t n = 0;
  for (const auto& q : prefix) n += q.quantifier == Quantifier::forall;
  return n;
}

std::size_t QbfFormula::existential_count() const { return prefix.size() - universal_count(); }

namespace {

[[noreturn]] void syntax(std::size_t line, const std::string& msg) {
  throw Error(Errc::parse_error, "qdimacs line " + std::to_string(line) + ": " + msg);
}

std::vector<long long> read_numbers(std::istringstream& in, std::size_t line) {
  std::vector<long long> out;
  std::string tok;
  while (in >> tok) {
    try {
      std::size_t used = 0;
      const long long v = std::stoll(tok, &used);
      if (used != tok.size()) syntax(line, "bad token '" + tok + "'");
      out.push_back(v);
    } catch (const std::logic_error&) {
      syntax(line, "bad token '" + tok + "'");
    }
  }
  if (out.empty() || out.back() != 0) syntax(line, "missing terminating 0");
  out.pop_back();
  for (long long v : out)
    if (v == 0) syntax(line, "0 before end of line");
  return out;
}

} // namespace

QbfFormula parse_qdimacs(std::string_view text) {
  QbfFormula f;
  std::istringstream all{std::string(text)};
  std::string raw;
  std::size_t line_no = 0;
  bool header = false;
  bool in_matrix = false;
  long long declared_clauses = 0;
  std::set<int> quantified;

  auto check_var = [&](long long v, std::size_t line) {
    const long long a = v < 0 ? -v : v;
    if (a > f.declared_vars)
      syntax(line, "variable " + std::to_string(a) + " exceeds declared count " + std::to_string(f.declared_vars));
    return static_cast<int>(a);
  };

  while (std::getline(all, raw)) {
    ++line_no;
    std::istringstream in(raw);
    std::string head;
    if (!(in >> head)) continue;
    if (head == "c") continue;
    if (head == "p") {
      if (header) syntax(line_no, "duplicate header");
      std::string fmt;
      long long vars = -1, clauses = -1;
      if (!(in >> fmt >> vars >> clauses) || fmt != "cnf" || vars < 0 || clauses < 0)
        syntax(line_no, "expected 'p cnf <vars> <clauses>'");
      std::string extra;
      if (in >> extra) syntax(line_no, "trailing text after header");
      f.declared_vars = static_cast<int>(vars);
      declared_clauses = clauses;
      header = true;
      continue;
    }
    if (!header) syntax(line_no, "content before 'p cnf' header");
    if (head == "a" || head == "e") {
      if (in_matrix) syntax(line_no, "quantifier after the first clause");
      const Quantifier q = head == "a" ? Quantifier::forall : Quantifier::exists;
      for (long long v : read_numbers(in, line_no)) {
        if (v < 0) syntax(line_no, "negative variable in quantifier block");
        const int var = check_var(v, line_no);
        if (!quantified.insert(var).second) syntax(line_no, "variable " + std::to_string(var) + " quantified twice");
        f.prefix.push_back({var, q});
      }
      continue;
    }
    in_matrix = true;
    std::istringstream clause_in(raw);
    std::vector<int> clause;
    for (long long v : read_numbers(clause_in, line_no)) {
      const int var = check_var(v, line_no);
      if (!quantified.count(var)) syntax(line_no, "free variable " + std::to_string(var));
      clause.push_back(v < 0 ? -var : var);
    }
    f.clauses.push_back(std::move(clause));
  }
  if (!header) throw Error(Errc::parse_error, "qdimacs: missing 'p cnf' header");
  if (f.declared_vars > 0 && f.prefix.empty()) throw Error(Errc::parse_error, "qdimacs: empty quantifier prefix");
  if (static_cast<long long>(f.clauses.size()) != declared_clauses)
    throw Error(Errc::parse_error, "qdimacs: header declares " + std::to_string(declared_clauses) + " clauses, found " +
                                       std::to_string(f.clauses.size()));
  return f;
}

QbfFormula load_qdimacs(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::io_error, "cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_qdimacs(ss.str());
}

std::string to_qdimacs(const QbfFormula& f) {
  std::ostringstream out;
  out << "p cnf " << f.declared_vars << ' ' << f.clauses.size() << '\n';
  for (std::size_t i = 0; i < f.prefix.size();) {
    const Quantifier q = f.prefix[i].quantifier;
    out << (q == Quantifier::forall ? 'a' : 'e');
    for (; i < f.prefix.size() && f.prefix[i].quantifier == q; ++i) out << ' ' << f.prefix[i].var;
    out << " 0\n";
  }
  for (const auto& c : f.clauses) {
    for (int lit : c) out << lit << ' ';
    out << "0\n";
  }
  return out.str();
}

namespace {

bool matrix_holds(const QbfFormula& f, const std::vector<signed char>& value) {
  for (const auto& clause : f.clauses) {
    bool sat = false;
    for (int lit : clause) {
      const bool v = value[static_cast<std::size_t>(lit < 0 ? -lit : lit)] != 0;
      if (v == (lit > 0)) {
        sat = true;
        break;
      }
    }
    if (!sat) return false;
  }
  return true;
}

bool expand(const QbfFormula& f, std::size_t depth, std::vector<signed char>& value) {
  if (depth == f.prefix.size()) return matrix_holds(f, value);
  const auto& q = f.prefix[depth];
  const auto var = static_cast<std::size_t>(q.var);
  const bool want = q.quantifier == Quantifier::exists;
  for (signed char b : {0, 1}) {
    value[var] = b;
    if (expand(f, depth + 1, value) == want) return want;
  }
  return !want;
}

} // namespace

bool brute_force_qbf(const QbfFormula& f, std::size_t max_vars) {
  if (f.prefix.size() > max_vars)
    throw Error(Errc::size_guard, "brute force limited to " + std::to_string(max_vars) + " variables, formula has " +
                                      std::to_string(f.prefix.size()));
  std::vector<signed char> value(static_cast<std::size_t>(f.declared_vars) + 1, 0);
  return expand(f, 0, value);
}

std::vector<std::vector<bool>> valuation_order(unsigned k) {
  if (k > 20) throw Error(Errc::size_guard, "valuation order limited to 20 universals");
  std::vector<std::vector<bool>> out(std::size_t{1} << k, std::vector<bool>(k));
  for (std::size_t r = 0; r < out.size(); ++r)
    for (unsigned i = 0; i < k; ++i) out[r][i] = (r >> i) & 1u;
  return out;
}

} // namespace qnnv::qbf
