#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace qnnv::qbf {

enum class Quantifier { forall, exists };

struct QuantifiedVar {
  int var; // QDIMACS variable number, >= 1
  Quantifier quantifier;
};

/// Prenex CNF.  Literals use QDIMACS numbering (negative = negated).  An
/// empty clause list is the constant true matrix.
struct QbfFormula {
  int declared_vars = 0;
  std::vector<QuantifiedVar> prefix; // outermost first
  std::vector<std::vector<int>> clauses;

  std::size_t universal_count() const;
  std::size_t existential_count() const;
};

/// Parses QDIMACS text.  Throws Error(parse_error) on syntax errors,
/// out-of-range or unquantified variables, variables quantified twice and an
/// empty prefix when the header declares variables.
QbfFormula parse_qdimacs(std::string_view text);
QbfFormula load_qdimacs(const std::string& path);
std::string to_qdimacs(const QbfFormula& f);

/// Truth of the formula by recursive quantifier expansion.  Throws
/// Error(size_guard) above `max_vars` quantified variables.
bool brute_force_qbf(const QbfFormula& f, std::size_t max_vars = 20);

/// All valuations of k universals, ranked by sum y_i 2^(i-1).  Entry r holds
/// (y_1, ..., y_k) with y_i = bit i-1 of r.
std::vector<std::vector<bool>> valuation_order(unsigned k);

} // namespace qnnv::qbf
