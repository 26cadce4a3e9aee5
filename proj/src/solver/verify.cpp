#include "qnnv/solver/verify.hpp"
#include "qnnv/core/error.hpp"
#include "qnnv/core/interpreter.hpp"

#include <chrono>

namespace qnnv {

bool validate_counterexample(const QuantizedNetwork& net, std::span<const Integer> assignment,
                             const RobustnessQuery& query) {
  if (assignment.size() != query.sample.size() || assignment.size() != net.input_size()) return false;
  const Integer top = net.input_max();
  for (std::size_t j = 0; j < assignment.size(); ++j) {
    const Integer& x = assignment[j];
    if (x < 0 || x > top) return false;
    if (abs(x - query.sample[j]) > query.epsilon) return false;
  }
  return classify(net, assignment) != query.label;
}

VerifyReport verify_robustness(const QuantizedNetwork& net, const RobustnessQuery& query,
                               const smt::EncodeOptions& opts, const SolverConfig& config) {
  VerifyReport report;
  const auto t0 = std::chrono::steady_clock::now();
  const smt::SmtScript script = smt::encode_robustness_query(net, query.sample, query.label, query.epsilon, opts);
  const std::string text = smt::emit_smtlib(script);
  report.encode_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  report.stats = script.stats;

  const RawOutcome raw = run_solver(text, config);
  Verdict& v = report.verdict;
  v.outcome = raw.outcome;
  v.wall_seconds = raw.wall_seconds;
  if (raw.outcome == Outcome::solver_error) {
    v.diagnostic = raw.stderr_text;
    return report;
  }
  if (raw.outcome != Outcome::sat) return report;

  const Assignment assignment = parse_model(raw.stdout_text, script.inputs, net.input_bits);
  IntVector x;
  x.reserve(script.inputs.size());
  for (const auto& name : script.inputs) x.push_back(assignment.at(name));
  const bool ok = validate_counterexample(net, x, query);
  if (!ok) {
    std::string values;
    for (const auto& xi : x) values += (values.empty() ? "" : ",") + xi.str();
    throw Error(Errc::encoder_mismatch, "encoder/interpreter mismatch: solver model [" + values +
                                            "] is not a counterexample (label " + std::to_string(query.label) +
                                            ", options " + opts.footprint() + ")");
  }
  v.model = std::move(x);
  v.validated = true;
  return report;
}

} // namespace qnnv
