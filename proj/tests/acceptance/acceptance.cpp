// Acceptance checks: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include "qnnv/absint/propagate.hpp"
#include "qnnv/core/error.hpp"
#include "qnnv/core/interpreter.hpp"
#include "qnnv/core/model_io.hpp"
#include "qnnv/encoder/redundancy.hpp"
#include "qnnv/encoder/widths.hpp"
#include "qnnv/harness/brute_force.hpp"
#include "qnnv/harness/campaign.hpp"
#include "qnnv/reduction/gadgets.hpp"
#include "qnnv/solver/verify.hpp"

#include "../support/random_nets.hpp"
#include "../support/random_qbf.hpp"
#include "../support/reference.hpp"

#include "CLI11.hpp"

#include <chrono>
#include <fstream>
#include <iostream>
#include <set>
#include <sstream>

using namespace qnnv;

namespace {

// Pinned tolerances and budgets.
constexpr std::size_t kMinTraceModels = 3;
constexpr std::size_t kMinTracesPerModel = 50;
constexpr double kTraceBudgetSecs = 1.0;
constexpr int kSoundnessNets = 20;
constexpr double kSoundnessBudgetSecs = 30.0;
constexpr int kEncodingNets = 50;
constexpr double kEncodingBudgetSecs = 600.0;
constexpr double kStrictWidthFraction = 0.90;
constexpr double kWidthBudgetSecs = 5.0;
constexpr int kPlanVectors = 1000;
constexpr unsigned kPlanMaxBits = 6;
constexpr int kRandomQbfs = 200;
constexpr double kReductionBudgetSecs = 300.0;
constexpr std::size_t kAblationSamples = 20;
constexpr long kAblationEpsilon = 1;
constexpr double kAblationTimeoutSecs = 60.0;

using Clock = std::chrono::steady_clock;

double since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

struct Tally {
  int failed = 0;
  std::size_t mismatches = 0;   // Sat models that failed validation
  std::size_t sat_verdicts = 0; // Sat models inspected
  std::vector<QuantizedNetwork> nets; // every net exercised, for the width check
};

void report(Tally& tally, const std::string& id, const std::string& name, bool pass, const std::string& detail) {
  std::cout << (pass ? "PASS" : "FAIL") << "  " << id << " " << name << ": " << detail << std::endl;
  if (!pass) ++tally.failed;
}

std::string fmt(double v, int precision = 2) {
  std::ostringstream s;
  s.setf(std::ios::fixed);
  s.precision(precision);
  s << v;
  return s.str();
}

IntVector ints(const nlohmann::json& a) {
  IntVector v;
  for (const auto& x : a) v.push_back(integer_from_json(x, "trace"));
  return v;
}

IntervalVector box_of(const std::vector<std::pair<Integer, Integer>>& box) {
  IntervalVector out;
  for (const auto& [lo, hi] : box) out.emplace_back(lo, hi);
  return out;
}

void trace_replay(Tally& tally) {
  const auto t0 = Clock::now();
  std::size_t models = 0, traces = 0, diffs = 0;
  bool enough = true;
  for (const char* name : {"mnist_784_16_10_w4", "mnist_784_32_10_w5", "mnist_784_64_32_10_w6", "edge_cases"}) {
    std::ifstream in(test::data_dir() / (std::string(name) + ".traces.json"));
    const auto doc = nlohmann::json::parse(in);
    const auto net = load_model(test::data_dir() / doc.at("model").get<std::string>());
    const auto& bundle = doc.at("traces");
    enough &= bundle.size() >= kMinTracesPerModel;
    for (const auto& t : bundle) {
      const auto got = trace_network(net, ints(t.at("input")));
      if (got.size() != t.at("layers").size()) {
        ++diffs;
        continue;
      }
      for (std::size_t l = 0; l < got.size(); ++l) {
        const auto& want = t.at("layers")[l];
        diffs += got[l].pre_round != ints(want.at("pre_round"));
        diffs += got[l].post_round != ints(want.at("post_round"));
        diffs += got[l].output != ints(want.at("output"));
      }
      ++traces;
    }
    ++models;
  }
  const double secs = since(t0);
  report(tally, "A1", "interpreter replays trace bundles",
         enough && models >= kMinTraceModels && diffs == 0 && secs < kTraceBudgetSecs,
         std::to_string(models) + " bundles, " + std::to_string(traces) + " traces, " + std::to_string(diffs) +
             " differing layers, " + fmt(secs) + " s (budget " + fmt(kTraceBudgetSecs) + " s)");
}

void interval_soundness(Tally& tally) {
  const auto t0 = Clock::now();
  test::NetGenerator gen(2001);
  test::NetShape shape;
  shape.max_layers = 2;
  shape.max_width = 4;
  shape.input_bits = 3;
  shape.max_clamp_bits = 3;
  std::size_t points = 0, checks = 0, violations = 0;
  for (int n = 0; n < kSoundnessNets; ++n) {
    const auto net = gen.network(shape);
    tally.nets.push_back(net);
    const auto box = test::full_domain(net);
    const auto map = propagate_network(net, box_of(box));
    test::for_each_point(box, [&](const IntVector& x) {
      ++points;
      const auto ref = test::ref_network(net, x);
      for (std::size_t t = 0; t < ref.size(); ++t) {
        const auto& b = map.layers[t];
        for (std::size_t i = 0; i < ref[t].out.size(); ++i) {
          violations += !b.pre_round[i].contains(ref[t].pre[i]);
          violations += !b.post_round[i].contains(ref[t].post[i]);
          violations += !b.post_clamp[i].contains(ref[t].out[i]);
          checks += 3;
          for (std::size_t k = 0; k < ref[t].tree[i].size(); ++k, ++checks)
            violations += !b.tree[i][k].contains(ref[t].tree[i][k]);
        }
      }
    });
  }
  const double secs = since(t0);
  report(tally, "A2", "interval soundness", violations == 0 && secs < kSoundnessBudgetSecs,
         std::to_string(kSoundnessNets) + " nets, " + std::to_string(points) + " inputs, " + std::to_string(checks) +
             " containments, " + std::to_string(violations) + " violations, " + fmt(secs) + " s (budget " +
             fmt(kSoundnessBudgetSecs) + " s)");
}

std::vector<smt::EncodeOptions> all_option_sets() {
  std::vector<smt::EncodeOptions> out;
  for (int m = 0; m < 8; ++m) out.push_back({(m & 1) != 0, (m & 2) != 0, (m & 4) != 0});
  return out;
}

void encoding_preservation(Tally& tally, const std::string& solver) {
  if (solver.empty()) {
    report(tally, "A3", "encoding preserves semantics", false, "no SMT solver available");
    return;
  }
  const auto t0 = Clock::now();
  test::NetGenerator gen(3003);
  test::NetShape shape;
  shape.edge_shifts = true;
  SolverConfig config;
  config.executable = solver;
  std::size_t queries = 0, disagreements = 0, sats = 0, other = 0;
  for (int n = 0; n < kEncodingNets; ++n) {
    const auto net = gen.network(shape);
    tally.nets.push_back(net);
    const IntVector sample = gen.input(net);
    const std::size_t label = classify(net, sample);
    const Integer eps = gen.uniform(0, 2);
    const auto oracle = brute_force_verify(net, sample, label, eps);
    for (const auto& opts : all_option_sets()) {
      ++queries;
      try {
        const auto rep = verify_robustness(net, {sample, label, eps}, opts, config);
        const auto& v = rep.verdict;
        if (v.outcome == Outcome::sat) {
          ++sats;
          ++tally.sat_verdicts;
          disagreements += oracle.robust || !v.validated.value_or(false);
        } else if (v.outcome == Outcome::unsat) {
          disagreements += !oracle.robust;
        } else {
          ++other;
        }
      } catch (const Error& e) {
        if (e.code() != Errc::encoder_mismatch) throw;
        ++tally.mismatches;
        ++tally.sat_verdicts;
        ++disagreements;
      }
    }
  }
  const double secs = since(t0);
  report(tally, "A3", "encoding preserves semantics", disagreements == 0 && other == 0 && secs < kEncodingBudgetSecs,
         std::to_string(kEncodingNets) + " nets x 8 option sets, " + std::to_string(queries) + " queries (" +
             std::to_string(sats) + " sat), " + std::to_string(disagreements) + " disagreements with brute force, " +
             std::to_string(other) + " undecided, " + fmt(secs) + " s (budget " + fmt(kEncodingBudgetSecs) + " s)");
}

struct WidthCount {
  std::size_t accumulators = 0, violations = 0, strict = 0;
};

WidthCount width_comparison(const QuantizedNetwork& net) {
  WidthCount c;
  const auto map = propagate_network(net, box_of(test::full_domain(net)));
  unsigned source_bits = net.input_bits;
  for (std::size_t t = 0; t < net.layers.size(); ++t) {
    const auto& l = net.layers[t];
    unsigned max_left = 0;
    if (l.edge_shift && l.edge_shift->direction == ShiftDirection::left)
      for (const auto& row : l.edge_shift->amounts)
        for (unsigned e : row) max_left = std::max(max_left, e);
    const unsigned k = std::max(net.weight_bits, source_bits + max_left);
    for (std::size_t i = 0; i < l.outputs(); ++i) {
      const unsigned naive = smt::naive_bits(k, summand_count(l, i));
      const unsigned minimal = smt::minimal_bits(map.layers[t].pre_round[i]);
      ++c.accumulators;
      c.violations += minimal > naive;
      c.strict += minimal < naive;
    }
    source_bits = 0;
    for (unsigned b : l.clamp_bits) source_bits = std::max(source_bits, b);
  }
  return c;
}

void width_formulas(Tally& tally) {
  const auto t0 = Clock::now();
  WidthCount all;
  auto add = [&](const WidthCount& c) {
    all.accumulators += c.accumulators;
    all.violations += c.violations;
    all.strict += c.strict;
  };
  for (const auto& net : tally.nets) add(width_comparison(net));
  for (const char* name : {"mnist_784_32_10_w5.json", "mnist_784_64_32_10_w6.json", "edge_cases.json"})
    add(width_comparison(load_model(test::data_dir() / name)));
  const auto ci = width_comparison(load_model(test::data_dir() / "mnist_784_16_10_w4.json"));
  add(ci);
  const double fraction = static_cast<double>(ci.strict) / static_cast<double>(ci.accumulators);
  const double secs = since(t0);
  report(tally, "A4", "minimal widths never exceed naive widths",
         all.violations == 0 && fraction >= kStrictWidthFraction && secs < kWidthBudgetSecs,
         std::to_string(all.accumulators) + " accumulators, " + std::to_string(all.violations) +
             " above naive; 4-bit CI model strictly narrower on " + std::to_string(ci.strict) + "/" +
             std::to_string(ci.accumulators) + " (" + fmt(100 * fraction, 1) + "%, required " +
             fmt(100 * kStrictWidthFraction, 0) + "%), " + fmt(secs) + " s (budget " + fmt(kWidthBudgetSecs) + " s)");
}

void redundancy_plans(Tally& tally) {
  test::NetGenerator gen(5005);
  std::size_t wrong = 0, replays = 0;
  for (int n = 0; n < kPlanVectors; ++n) {
    const unsigned k = static_cast<unsigned>(gen.uniform(1, kPlanMaxBits));
    const int wmax = (1 << k) - 1;
    IntVector w;
    const int len = gen.uniform(1, 10);
    for (int i = 0; i < len; ++i) w.emplace_back(gen.uniform(-wmax, wmax));
    const auto plan = smt::plan_redundancy_elimination(w);
    for (int x = -(1 << kPlanMaxBits); x < (1 << kPlanMaxBits); ++x) {
      const auto got = smt::replay_plan(plan, w, x);
      for (std::size_t i = 0; i < w.size(); ++i) wrong += got[i] != w[i] * x;
      ++replays;
    }
  }
  const IntVector example{3, 6};
  const auto plan = smt::plan_redundancy_elimination(example);
  const bool example_ok = plan.size() == 2 && plan[0].action == smt::MulAction::fresh_mul &&
                          plan[1] == smt::PlanStep{smt::MulAction::shift_reuse, 0, 1};
  report(tally, "A5", "redundancy plans replay exactly", wrong == 0 && example_ok,
         std::to_string(kPlanVectors) + " weight vectors, " + std::to_string(replays) + " replays, " +
             std::to_string(wrong) + " wrong products; [3,6] -> " + smt::to_string(plan[1].action) + "(" +
             std::to_string(plan[1].source) + "," + std::to_string(plan[1].shift) + ")");
}

void reduction_agreement(Tally& tally, const std::string& solver) {
  if (solver.empty()) {
    report(tally, "A6", "reduction agrees with QBF truth", false, "no SMT solver available");
    return;
  }
  const auto t0 = Clock::now();
  std::vector<std::pair<std::string, qbf::QbfFormula>> corpus;
  std::set<std::filesystem::path> files;
  for (const auto& e : std::filesystem::directory_iterator(test::data_dir() / "qdimacs")) files.insert(e.path());
  for (const auto& p : files) corpus.emplace_back(p.filename().string(), qbf::load_qdimacs(p));
  const std::size_t hand = corpus.size();
  std::mt19937_64 rng(6006);
  for (int n = 0; n < kRandomQbfs; ++n) corpus.emplace_back("random " + std::to_string(n), test::random_qbf(rng, 6, 3));

  SolverConfig config;
  config.executable = solver;
  std::size_t disagreements = 0, trues = 0;
  std::string first_bad;
  for (const auto& [name, f] : corpus) {
    const bool truth = qbf::brute_force_qbf(f);
    const auto inst = qbf::build_reduction(f);
    const bool enumerated = qbf::brute_force_instance(inst);
    const auto raw = run_solver(smt::emit_smtlib(qbf::encode_instance(inst)), config);
    const bool agree = enumerated == truth && raw.outcome == (truth ? Outcome::sat : Outcome::unsat);
    trues += truth;
    if (!agree) {
      ++disagreements;
      if (first_bad.empty()) first_bad = "; first: " + name;
    }
  }
  const double secs = since(t0);
  report(tally, "A6", "reduction agrees with QBF truth", disagreements == 0 && secs < kReductionBudgetSecs,
         std::to_string(corpus.size()) + " formulas (" + std::to_string(hand) + " hand-written, " +
             std::to_string(trues) + " true), " + std::to_string(disagreements) + " disagreements" + first_bad + ", " +
             fmt(secs) + " s (budget " + fmt(kReductionBudgetSecs) + " s)");
}

void ablation_trend(Tally& tally, const std::string& solver) {
  if (solver.empty()) {
    report(tally, "A7", "optimizations beat the baseline", false, "no SMT solver available");
    return;
  }
  CampaignSpec spec = load_campaign_spec(test::data_dir() / "ci_campaign.json");
  spec.schedule = {{kAblationEpsilon, 0, kAblationSamples}};
  spec.solver.executable = solver;
  spec.solver.timeout_secs = kAblationTimeoutSecs;
  spec.parallelism = 1;
  const auto net = load_model(spec.model);
  const auto samples = load_idx_dataset(spec.images, spec.labels);

  auto run = [&](const smt::EncodeOptions& opts) {
    spec.options = opts;
    auto result = run_campaign(net, samples, spec);
    for (const auto& r : result.records) {
      tally.mismatches += r.status == RecordStatus::mismatch || (r.status == RecordStatus::sat && !r.validated);
      tally.sat_verdicts += r.status == RecordStatus::sat || r.status == RecordStatus::mismatch;
    }
    return result.summary.total;
  };
  auto describe = [](const RadiusSummary& s) {
    return std::to_string(s.solved) + "/" + std::to_string(s.attempted) + " solved (" + std::to_string(s.sat) +
           " sat, " + std::to_string(s.unsat) + " unsat, " + std::to_string(s.timeout) + " timeout), " +
           fmt(s.total_seconds, 1) + " s";
  };
  const auto on = run(smt::EncodeOptions::all_on());
  const auto off = run(smt::EncodeOptions::baseline());
  report(tally, "A7", "optimizations beat the baseline",
         on.solved >= off.solved && on.total_seconds < off.total_seconds && on.attempted > 0,
         "w4 CI model, " + std::to_string(kAblationSamples) + " samples, eps " + std::to_string(kAblationEpsilon) +
             ", " + fmt(kAblationTimeoutSecs, 0) + " s/query; all on " + describe(on) + "; baseline " + describe(off));
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"Acceptance checks"};
  std::string solver = test::test_solver();
  std::set<std::string> only;
  app.add_option("--solver", solver, "SMT solver executable");
  app.add_option("--only", only, "run only these criteria (A1..A8)");
  CLI11_PARSE(app, argc, argv);

  auto enabled = [&](const char* id) { return only.empty() || only.count(id); };
  Tally tally;
  try {
    if (enabled("A1")) trace_replay(tally);
    if (enabled("A2")) interval_soundness(tally);
    if (enabled("A3")) encoding_preservation(tally, solver);
    if (enabled("A4")) width_formulas(tally);
    if (enabled("A5")) redundancy_plans(tally);
    if (enabled("A6")) reduction_agreement(tally, solver);
    if (enabled("A7")) ablation_trend(tally, solver);
    if (enabled("A8"))
      report(tally, "A8", "counterexample tripwire", tally.mismatches == 0,
             std::to_string(tally.sat_verdicts) + " sat verdicts across the campaigns above, " +
                 std::to_string(tally.mismatches) + " failed validation");
  } catch (const std::exception& e) {
    std::cout << "FAIL  error: " << e.what() << std::endl;
    return 1;
  }
  return tally.failed == 0 ? 0 : 1;
}
