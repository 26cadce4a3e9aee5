#include "qnnv/core/error.hpp"
#include "qnnv/core/interpreter.hpp"
#include "qnnv/core/model_io.hpp"
#include "qnnv/harness/brute_force.hpp"
#include "qnnv/harness/campaign.hpp"
#include "qnnv/reduction/gadgets.hpp"

#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"

using namespace qnnv;

namespace {

struct PassFlags {
  bool no_dead_branch = false;
  bool no_min_bits = false;
  bool no_redundancy = false;
  bool baseline = false;

  void attach(CLI::App* app) {
    app->add_flag("--no-dead-branch", no_dead_branch, "Disable dead branch removal");
    app->add_flag("--no-min-bits", no_min_bits, "Disable minimum bitwidth reduction");
    app->add_flag("--no-redundancy-elim", no_redundancy, "Disable redundant multiplication elimination");
    app->add_flag("--baseline", baseline, "Disable every optimization");
  }
  bool any() const { return no_dead_branch || no_min_bits || no_redundancy || baseline; }
  smt::EncodeOptions apply(smt::EncodeOptions o) const {
    if (baseline) return smt::EncodeOptions::baseline();
    if (no_dead_branch) o.dead_branch_removal = false;
    if (no_min_bits) o.minimal_bits = false;
    if (no_redundancy) o.redundancy_elimination = false;
    return o;
  }
};

struct SolverFlags {
  std::string executable;
  std::vector<std::string> args;
  double timeout = 0;
  bool keep = false;

  void attach(CLI::App* app) {
    app->add_option("--solver", executable, "QF_BV solver executable (default: $QNNV_SOLVER or z3)");
    app->add_option("--solver-arg", args, "Extra solver argument, repeatable");
    app->add_option("--timeout-secs", timeout, "Per query time limit");
    app->add_flag("--keep-scripts", keep, "Keep the generated SMT-LIB files");
  }
  SolverConfig apply(SolverConfig c) const {
    if (!executable.empty()) c.executable = executable;
    if (!args.empty()) c.args = args;
    if (timeout > 0) c.timeout_secs = timeout;
    if (keep) c.keep_scripts = true;
    return c;
  }
};

struct SampleFlags {
  std::string pixels;
  std::string images, labels;
  std::size_t index = 0;
  long long label = -1;

  void attach(CLI::App* app) {
    app->add_option("--input", pixels, "Comma separated quantized input values");
    app->add_option("--images", images, "IDX image file");
    app->add_option("--labels", labels, "IDX label file");
    app->add_option("--index", index, "Sample index in the IDX files");
    app->add_option("--label", label, "Expected class (default: dataset label or the network's prediction)");
  }

  bool given() const { return !pixels.empty() || !images.empty(); }

  std::pair<IntVector, std::size_t> load(const QuantizedNetwork& net) const {
    IntVector x;
    std::size_t lab = 0;
    if (!pixels.empty()) {
      std::stringstream ss(pixels);
      for (std::string tok; std::getline(ss, tok, ',');) x.emplace_back(tok);
      lab = label >= 0 ? static_cast<std::size_t>(label) : classify(net, x);
    } else if (!images.empty()) {
      if (labels.empty()) throw Error(Errc::invalid_input, "--images needs --labels");
      const auto samples = load_idx_dataset(images, labels);
      if (index >= samples.size()) throw Error(Errc::invalid_input, "--index out of range");
      x = quantize_pixels(samples[index].pixels, net.input_bits);
      lab = label >= 0 ? static_cast<std::size_t>(label) : samples[index].label;
    } else {
      throw Error(Errc::invalid_input, "give --input or --images/--labels");
    }
    if (x.size() != net.input_size())
      throw Error(Errc::shape_mismatch, "input has " + std::to_string(x.size()) + " values, network expects " +
                                            std::to_string(net.input_size()));
    return {x, lab};
  }
};

std::string join(const IntVector& v) {
  std::string s;
  for (const auto& x : v) s += (s.empty() ? "" : ",") + x.str();
  return s;
}

int report_campaign(const CampaignResult& result, const std::filesystem::path& stem) {
  write_campaign_outputs(stem, result);
  std::cout << summary_to_json(result.summary).dump(2) << '\n';
  std::cerr << "wrote " << stem.string() << ".csv and " << stem.string() << ".json\n";
  return result.summary.total.mismatches > 0 ? 3 : 0;
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"Verification of quantized neural networks with bit-vector SMT"};
  app.require_subcommand(1);

  // verify
  auto* verify = app.add_subcommand("verify", "Check local robustness of one sample");
  std::string model_path;
  std::string epsilon = "1";
  bool oracle = false;
  PassFlags vpass;
  SolverFlags vsolver;
  SampleFlags vsample;
  verify->add_option("--model", model_path, "Model JSON")->required();
  verify->add_option("--epsilon", epsilon, "L-infinity radius in quantized units");
  verify->add_flag("--oracle", oracle, "Enumerate the ball instead of calling the solver");
  vpass.attach(verify);
  vsolver.attach(verify);
  vsample.attach(verify);

  // inspect
  auto* inspect = app.add_subcommand("inspect", "Print interval bounds of every neuron as JSON");
  std::string inspect_model;
  std::string inspect_eps = "0";
  SampleFlags isample;
  inspect->add_option("--model", inspect_model, "Model JSON")->required();
  inspect->add_option("--epsilon", inspect_eps, "Radius around the sample");
  isample.attach(inspect);

  // campaign / ablate
  auto* campaign = app.add_subcommand("campaign", "Run a robustness campaign from a JSON spec");
  auto* ablate = app.add_subcommand("ablate", "Run a campaign once per optimization configuration");
  std::string spec_path;
  unsigned parallel = 0;
  PassFlags cpass;
  SolverFlags csolver;
  for (auto* sub : {campaign, ablate}) {
    sub->add_option("spec", spec_path, "Campaign spec JSON")->required();
    sub->add_option("--parallel", parallel, "Worker count");
    csolver.attach(sub);
  }
  cpass.attach(campaign);

  // reduce
  auto* reduce = app.add_subcommand("reduce", "Build the QBF to network verification reduction");
  std::string qdimacs_path, dump_path;
  bool reduce_oracle = false, reduce_solve = false;
  unsigned max_universals = qbf::kDefaultMaxUniversals;
  PassFlags rpass;
  SolverFlags rsolver;
  reduce->add_option("qdimacs", qdimacs_path, "Prenex CNF in QDIMACS format")->required();
  reduce->add_flag("--oracle", reduce_oracle, "Decide the formula and the instance by enumeration");
  reduce->add_flag("--solve", reduce_solve, "Decide the instance with the SMT solver");
  reduce->add_option("--dump-instance", dump_path, "Write gadget networks and predicate as JSON ('-' for stdout)");
  reduce->add_option("--max-universals", max_universals, "Word width budget as a universal count");
  rpass.attach(reduce);
  rsolver.attach(reduce);

  CLI11_PARSE(app, argc, argv);

  try {
    if (*verify) {
      const QuantizedNetwork net = load_model(model_path);
      const auto [x, label] = vsample.load(net);
      const Integer eps(epsilon);
      if (oracle) {
        const auto r = brute_force_verify(net, x, label, eps);
        std::cout << (r.robust ? "unsat" : "sat") << '\n';
        if (r.counterexample) std::cout << "counterexample " << join(*r.counterexample) << '\n';
        return 0;
      }
      RobustnessQuery q{x, label, eps};
      const auto report = verify_robustness(net, q, vpass.apply({}), vsolver.apply({}));
      std::cout << to_string(report.verdict.outcome) << '\n';
      if (report.verdict.model) std::cout << "counterexample " << join(*report.verdict.model) << '\n';
      if (!report.verdict.diagnostic.empty()) std::cerr << report.verdict.diagnostic << '\n';
      std::cerr << "encode " << report.encode_seconds << " s, solve " << report.verdict.wall_seconds << " s\n";
      return report.verdict.outcome == Outcome::solver_error ? 2 : 0;
    }
    if (*inspect) {
      const QuantizedNetwork net = load_model(inspect_model);
      IntervalVector ins;
      if (isample.given()) {
        ins = input_intervals_for_ball(isample.load(net).first, Integer(inspect_eps), net.input_bits);
      } else {
        ins.assign(net.input_size(), Interval(0, net.input_max()));
      }
      std::cout << to_json(propagate_network(net, ins)).dump(2) << '\n';
      return 0;
    }
    if (*campaign || *ablate) {
      CampaignSpec spec = load_campaign_spec(spec_path);
      spec.solver = csolver.apply(spec.solver);
      if (parallel > 0) spec.parallelism = parallel;
      if (*campaign) {
        if (cpass.any()) spec.options = cpass.apply(spec.options);
        return report_campaign(run_campaign(spec), spec.output);
      }
      const auto rows = run_ablation(spec);
      write_ablation_table(std::cout, rows);
      std::filesystem::path out = spec.output;
      out += "-ablation.json";
      std::ofstream(out) << ablation_to_json(rows).dump(2) << '\n';
      std::cerr << "wrote " << out.string() << '\n';
      for (const auto& r : rows)
        if (r.result.summary.total.mismatches > 0) return 3;
      return 0;
    }
    if (*reduce) {
      const auto f = qbf::load_qdimacs(qdimacs_path);
      const auto inst = qbf::build_reduction(f, max_universals);
      std::cout << "universals " << f.universal_count() << ", existentials " << f.existential_count()
                << ", word width " << inst.layout.width() << '\n';
      if (!dump_path.empty()) {
        const std::string text = qbf::instance_to_json(inst).dump(1);
        if (dump_path == "-")
          std::cout << text << '\n';
        else
          std::ofstream(dump_path) << text << '\n';
      }
      if (reduce_oracle) {
        std::cout << "qbf " << (qbf::brute_force_qbf(f) ? "true" : "false") << '\n';
        std::cout << "instance " << (qbf::brute_force_instance(inst) ? "sat" : "unsat") << '\n';
      }
      if (reduce_solve) {
        const auto script = qbf::encode_instance(inst, rpass.apply({}));
        const auto raw = run_solver(smt::emit_smtlib(script), rsolver.apply({}));
        std::cout << "solver " << to_string(raw.outcome) << '\n';
        if (raw.outcome == Outcome::solver_error) {
          std::cerr << raw.stderr_text << '\n';
          return 2;
        }
      }
      return 0;
    }
  } catch (const Error& e) {
    std::cerr << "error (" << to_string(e.code()) << "): " << e.what() << '\n';
    return e.code() == Errc::encoder_mismatch ? 3 : 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
