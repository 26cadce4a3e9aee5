#pragma once

#include "qnnv/core/integer.hpp"

#include <span>
#include <string>
#include <vector>

namespace qnnv::smt {

enum class MulAction { zero, identity, reuse, neg_reuse, shift_reuse, fresh_mul };

/// How to obtain w_i * x for one outgoing weight of a source neuron.
/// `source` indexes the weight vector the plan was built from and always
/// names a fresh_mul position; `shift` is only meaningful for shift_reuse.
struct PlanStep {
  MulAction action = MulAction::fresh_mul;
  std::size_t source = 0;
  unsigned shift = 0;

  friend bool operator==(const PlanStep&, const PlanStep&) = default;
};

using MultiplicationPlan = std::vector<PlanStep>;

/// Multiplication redundancy elimination for the outgoing weights of one
/// neuron.  Weights are visited by ascending magnitude (a negative weight
/// after a positive one of equal magnitude) and matched against the products
/// materialized so far, trying in order: w = 0, w = 1, w = v, w = -v,
/// w = v * 2^m.  Unmatched weights become fresh multiplications.
MultiplicationPlan plan_redundancy_elimination(std::span<const Integer> weights);

/// Evaluates a plan on a concrete x, returning w_i * x per position.
std::vector<Integer> replay_plan(const MultiplicationPlan& plan, std::span<const Integer> weights, const Integer& x);

std::string to_string(MulAction action);

} // namespace qnnv::smt
