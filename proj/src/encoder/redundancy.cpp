#include "qnnv/encoder/redundancy.hpp"
#include "qnnv/core/error.hpp"

#include <algorithm>
#include <numeric>
#include <optional>

namespace qnnv::smt {

namespace {

// m >= 1 with w == v * 2^m, if any.
std::optional<unsigned> power_of_two_multiple(const Integer& w, const Integer& v) {
  if (v == 0 || w == 0) return std::nullopt;
  if ((w < 0) != (v < 0)) return std::nullopt;
  const Integer a = abs(w);
  const Integer b = abs(v);
  if (a <= b || a % b != 0) return std::nullopt;
  const Integer q = a / b;
  if ((q & (q - 1)) != 0) return std::nullopt;
  return static_cast<unsigned>(boost::multiprecision::msb(q));
}

} // namespace

MultiplicationPlan plan_redundancy_elimination(std::span<const Integer> weights) {
  std::vector<std::size_t> order(weights.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    const Integer ma = abs(weights[a]);
    const Integer mb = abs(weights[b]);
    if (ma != mb) return ma < mb;
    return weights[a] > weights[b]; // positive before negative
  });

  MultiplicationPlan plan(weights.size());
  std::vector<std::size_t> materialized; // positions of fresh multiplications, in insertion order
  for (std::size_t pos : order) {
    const Integer& w = weights[pos];
    PlanStep& step = plan[pos];
    if (w == 0) {
      step.action = MulAction::zero;
      continue;
    }
    if (w == 1) {
      step.action = MulAction::identity;
      continue;
    }
    auto find = [&](auto&& pred) -> std::optional<std::size_t> {
      for (std::size_t src : materialized)
        if (pred(weights[src])) return src;
      return std::nullopt;
    };
    if (auto src = find([&](const Integer& v) { return v == w; })) {
      step = {MulAction::reuse, *src, 0};
      continue;
    }
    if (auto src = find([&](const Integer& v) { return v == -w; })) {
      step = {MulAction::neg_reuse, *src, 0};
      continue;
    }
    std::optional<unsigned> shift;
    if (auto src = find([&](const Integer& v) { return (shift = power_of_two_multiple(w, v)).has_value(); })) {
      step = {MulAction::shift_reuse, *src, *shift};
      continue;
    }
    step = {MulAction::fresh_mul, pos, 0};
    materialized.push_back(pos);
  }
  return plan;
}

std::vector<Integer> replay_plan(const MultiplicationPlan& plan, std::span<const Integer> weights, const Integer& x) {
  if (plan.size() != weights.size()) throw Error(Errc::shape_mismatch, "plan and weight vector differ in length");
  std::vector<Integer> out(plan.size());
  // Fresh products first; every other action refers back to one of them.
  for (std::size_t i = 0; i < plan.size(); ++i)
    if (plan[i].action == MulAction::fresh_mul) out[i] = weights[i] * x;
  for (std::size_t i = 0; i < plan.size(); ++i) {
    const PlanStep& s = plan[i];
    switch (s.action) {
    case MulAction::zero: out[i] = 0; break;
    case MulAction::identity: out[i] = x; break;
    case MulAction::reuse: out[i] = out[s.source]; break;
    case MulAction::neg_reuse: out[i] = -out[s.source]; break;
    case MulAction::shift_reuse: out[i] = out[s.source] * pow2(s.shift); break;
    case MulAction::fresh_mul: break;
    }
  }
  return out;
}

std::string to_string(MulAction action) {
  switch (action) {
  case MulAction::zero: return "Zero";
  case MulAction::identity: return "Identity";
  case MulAction::reuse: return "Reuse";
  case MulAction::neg_reuse: return "NegReuse";
  case MulAction::shift_reuse: return "ShiftReuse";
  case MulAction::fresh_mul: return "FreshMul";
  }
  return "?";
}

} // namespace qnnv::smt
