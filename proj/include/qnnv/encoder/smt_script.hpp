#pragma once

#include "qnnv/encoder/bv_term.hpp"

#include <map>
#include <string>
#include <vector>

namespace qnnv::smt {

/// Which optimization passes the encoder applies.  All off reproduces the
/// monolithic balanced encoding used as the baseline.
struct EncodeOptions {
  bool dead_branch_removal = true;
  bool minimal_bits = true;
  bool redundancy_elimination = true;

  static EncodeOptions all_on() { return {}; }
  static EncodeOptions baseline() { return {false, false, false}; }

  /// Compact tag such as "dbr+mb+re" or "baseline".
  std::string footprint() const;
  friend bool operator==(const EncodeOptions&, const EncodeOptions&) = default;
};

/// Size counters collected while encoding.
struct EncodeStats {
  std::size_t multiplications = 0;
  std::size_t shifts = 0;
  std::size_t negations = 0;
  std::size_t decision_points = 0; // if-then-else nodes in activations
  std::size_t accumulators = 0;
  std::size_t accumulator_bits = 0; // sum of root accumulator widths
  unsigned max_width = 0;
};

struct Declaration {
  std::string name;
  unsigned width;
};

struct SmtScript {
  TermStore terms;
  std::vector<Declaration> declarations;
  std::vector<std::pair<std::string, TermRef>> definitions;
  std::vector<TermRef> assertions;
  std::vector<std::string> inputs;  // network input variables, in order
  std::vector<std::string> outputs; // named output definitions, in order
  EncodeOptions options;
  EncodeStats stats;

  void declare(const std::string& name, unsigned width);
  TermRef define(const std::string& name, TermRef term);
};

/// SMT-LIB v2 text for the script: QF_BV logic, declarations, named
/// definitions (plus one define-fun per subterm shared by several parents),
/// assertions, check-sat and a get-value over the input variables.
/// The output is a pure function of the script.
std::string emit_smtlib(const SmtScript& script);

} // namespace qnnv::smt
