#include "qnnv/harness/campaign.hpp"
#include "qnnv/core/error.hpp"
#include "qnnv/core/interpreter.hpp"
#include "qnnv/core/model_io.hpp"

#include <algorithm>
#include <atomic>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <thread>

namespace qnnv {

std::string to_string(RecordStatus status) {
  switch (status) {
  case RecordStatus::sat: return "sat";
  case RecordStatus::unsat: return "unsat";
  case RecordStatus::unknown: return "unknown";
  case RecordStatus::timeout: return "timeout";
  case RecordStatus::solver_error: return "error";
  case RecordStatus::skipped: return "skipped";
  case RecordStatus::mismatch: return "mismatch";
  }
  return "?";
}

namespace {

std::filesystem::path resolve(const std::filesystem::path& base, const std::string& p) {
  const std::filesystem::path path(p);
  return path.is_absolute() || base.empty() ? path : base / path;
}

template <class T>
T get_or(const nlohmann::json& doc, const char* key, T fallback) {
  return doc.contains(key) ? doc.at(key).get<T>() : fallback;
}

RecordStatus status_of(Outcome o) {
  switch (o) {
  case Outcome::sat: return RecordStatus::sat;
  case Outcome::unsat: return RecordStatus::unsat;
  case Outcome::unknown: return RecordStatus::unknown;
  case Outcome::timeout: return RecordStatus::timeout;
  case Outcome::solver_error: return RecordStatus::solver_error;
  }
  return RecordStatus::solver_error;
}

void check_schedule(const std::vector<ScheduleEntry>& schedule, std::size_t sample_count) {
  for (std::size_t a = 0; a < schedule.size(); ++a) {
    const auto& e = schedule[a];
    if (e.epsilon < 0) throw Error(Errc::invalid_input, "schedule epsilon must be non-negative");
    if (e.begin > e.end) throw Error(Errc::invalid_input, "schedule range has begin > end");
    if (e.end > sample_count)
      throw Error(Errc::invalid_input, "schedule range ends at " + std::to_string(e.end) + " but the dataset has " +
                                           std::to_string(sample_count) + " samples");
    for (std::size_t b = 0; b < a; ++b) {
      const auto& o = schedule[b];
      if (e.begin < o.end && o.begin < e.end) throw Error(Errc::invalid_input, "schedule ranges overlap");
    }
  }
}

ResultRecord run_one(const QuantizedNetwork& net, const Sample& sample, std::size_t index, const Integer& epsilon,
                     const CampaignSpec& spec) {
  ResultRecord rec;
  rec.sample_index = index;
  rec.epsilon = epsilon;
  rec.footprint = spec.options.footprint();
  try {
    RobustnessQuery query{quantize_pixels(sample.pixels, net.input_bits), sample.label, epsilon};
    if (query.sample.size() != net.input_size())
      throw Error(Errc::shape_mismatch, "sample has " + std::to_string(query.sample.size()) +
                                            " pixels, network expects " + std::to_string(net.input_size()));
    if (classify(net, query.sample) != sample.label) {
      rec.status = RecordStatus::skipped;
      return rec;
    }
    const VerifyReport report = verify_robustness(net, query, spec.options, spec.solver);
    rec.status = status_of(report.verdict.outcome);
    rec.validated = report.verdict.validated.value_or(false);
    rec.wall_seconds = report.verdict.wall_seconds;
    rec.encode_seconds = report.encode_seconds;
    rec.stats = report.stats;
    rec.diagnostic = report.verdict.diagnostic;
  } catch (const Error& e) {
    rec.status = e.code() == Errc::encoder_mismatch ? RecordStatus::mismatch : RecordStatus::solver_error;
    rec.diagnostic = e.what();
  } catch (const std::exception& e) {
    rec.status = RecordStatus::solver_error;
    rec.diagnostic = e.what();
  }
  return rec;
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : (v[n / 2 - 1] + v[n / 2]) / 2.0;
}

void finish(RadiusSummary& s, std::vector<double>& solved_times) {
  if (solved_times.empty()) return;
  s.median_seconds = median(solved_times);
  double sum = 0;
  for (double t : solved_times) sum += t;
  s.mean_seconds = sum / static_cast<double>(solved_times.size());
}

void add(RadiusSummary& s, const ResultRecord& r, std::vector<double>& solved_times) {
  if (r.status == RecordStatus::skipped) {
    ++s.skipped;
    return;
  }
  ++s.attempted;
  s.total_seconds += r.wall_seconds;
  switch (r.status) {
  case RecordStatus::sat: ++s.sat; break;
  case RecordStatus::unsat: ++s.unsat; break;
  case RecordStatus::unknown: ++s.unknown; break;
  case RecordStatus::timeout: ++s.timeout; break;
  case RecordStatus::solver_error: ++s.errors; break;
  case RecordStatus::mismatch: ++s.mismatches; break;
  case RecordStatus::skipped: break;
  }
  if (r.solved()) {
    ++s.solved;
    solved_times.push_back(r.wall_seconds);
  }
}

nlohmann::json radius_json(const RadiusSummary& s) {
  nlohmann::json j{{"attempted", s.attempted}, {"skipped", s.skipped},   {"sat", s.sat},
                   {"unsat", s.unsat},         {"unknown", s.unknown},   {"timeout", s.timeout},
                   {"errors", s.errors},       {"mismatches", s.mismatches}, {"solved", s.solved},
                   {"total_seconds", s.total_seconds}};
  j["median_seconds"] = s.median_seconds ? nlohmann::json(*s.median_seconds) : nlohmann::json(nullptr);
  j["mean_seconds"] = s.mean_seconds ? nlohmann::json(*s.mean_seconds) : nlohmann::json(nullptr);
  return j;
}

} // namespace

CampaignSpec campaign_spec_from_json(const nlohmann::json& doc, const std::filesystem::path& base_dir) {
  try {
    CampaignSpec spec;
    spec.model = resolve(base_dir, doc.at("model").get<std::string>());
    spec.images = resolve(base_dir, doc.at("images").get<std::string>());
    spec.labels = resolve(base_dir, doc.at("labels").get<std::string>());
    for (const auto& e : doc.value("schedule", nlohmann::json::array()))
      spec.schedule.push_back({integer_from_json(e.at("epsilon"), "epsilon"), e.at("begin").get<std::size_t>(),
                               e.at("end").get<std::size_t>()});
    if (doc.contains("options")) {
      const auto& o = doc.at("options");
      spec.options.dead_branch_removal = get_or(o, "dead_branch_removal", true);
      spec.options.minimal_bits = get_or(o, "minimal_bits", true);
      spec.options.redundancy_elimination = get_or(o, "redundancy_elimination", true);
    }
    if (doc.contains("solver")) {
      const auto& s = doc.at("solver");
      spec.solver.executable = get_or(s, "executable", spec.solver.executable);
      spec.solver.args = get_or(s, "args", std::vector<std::string>{});
      spec.solver.timeout_secs = get_or(s, "timeout_secs", spec.solver.timeout_secs);
    }
    spec.parallelism = std::max(1u, get_or(doc, "parallelism", 1u));
    spec.output = resolve(base_dir, get_or<std::string>(doc, "output", "campaign"));
    for (const auto& e : spec.schedule)
      if (e.epsilon < 0 || e.begin > e.end) throw Error(Errc::invalid_input, "invalid schedule entry");
    return spec;
  } catch (const nlohmann::json::exception& e) {
    throw Error(Errc::parse_error, std::string("campaign spec: ") + e.what());
  }
}

CampaignSpec load_campaign_spec(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::io_error, "cannot open " + path.string());
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::exception& e) {
    throw Error(Errc::parse_error, path.string() + ": " + e.what());
  }
  return campaign_spec_from_json(doc, path.parent_path());
}

CampaignResult run_campaign(const QuantizedNetwork& net, std::span<const Sample> samples, const CampaignSpec& spec) {
  check_schedule(spec.schedule, samples.size());
  struct Task {
    std::size_t index;
    Integer epsilon;
  };
  std::vector<Task> tasks;
  for (const auto& e : spec.schedule)
    for (std::size_t i = e.begin; i < e.end; ++i) tasks.push_back({i, e.epsilon});

  CampaignResult result;
  result.records.resize(tasks.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t t; (t = next.fetch_add(1)) < tasks.size();)
      result.records[t] = run_one(net, samples[tasks[t].index], tasks[t].index, tasks[t].epsilon, spec);
  };
  const unsigned n = std::max(1u, std::min<unsigned>(spec.parallelism, static_cast<unsigned>(tasks.size())));
  std::vector<std::thread> pool;
  for (unsigned i = 1; i < n; ++i) pool.emplace_back(worker);
  worker();
  for (auto& th : pool) th.join();

  result.summary = summarize(result.records);
  return result;
}

CampaignResult run_campaign(const CampaignSpec& spec) {
  const QuantizedNetwork net = load_model(spec.model);
  const auto samples = load_idx_dataset(spec.images, spec.labels);
  return run_campaign(net, samples, spec);
}

CampaignSummary summarize(std::span<const ResultRecord> records) {
  CampaignSummary summary;
  std::map<std::string, std::vector<double>> times;
  std::vector<double> all_times;
  for (const auto& r : records) {
    const std::string key = r.epsilon.str();
    add(summary.by_epsilon[key], r, times[key]);
    add(summary.total, r, all_times);
  }
  for (auto& [key, s] : summary.by_epsilon) finish(s, times[key]);
  finish(summary.total, all_times);
  return summary;
}

void write_records_csv(std::ostream& out, std::span<const ResultRecord> records) {
  out << "sample,epsilon,verdict,validated,wall_seconds,encode_seconds,multiplications,decision_points,"
         "accumulator_bits,max_width,options,diagnostic\n";
  for (const auto& r : records) {
    std::string diag = r.diagnostic;
    std::replace(diag.begin(), diag.end(), '\n', ' ');
    std::string quoted = "\"";
    for (char c : diag) {
      if (c == '"') quoted += '"';
      quoted += c;
    }
    quoted += '"';
    out << r.sample_index << ',' << r.epsilon << ',' << to_string(r.status) << ',' << (r.validated ? 1 : 0) << ','
        << std::fixed << std::setprecision(6) << r.wall_seconds << ',' << r.encode_seconds << std::defaultfloat << ','
        << r.stats.multiplications << ',' << r.stats.decision_points << ',' << r.stats.accumulator_bits << ','
        << r.stats.max_width << ',' << r.footprint << ',' << quoted << '\n';
  }
}

nlohmann::json summary_to_json(const CampaignSummary& summary) {
  nlohmann::json doc;
  doc["by_epsilon"] = nlohmann::json::object();
  for (const auto& [eps, s] : summary.by_epsilon) doc["by_epsilon"][eps] = radius_json(s);
  doc["total"] = radius_json(summary.total);
  return doc;
}

void write_campaign_outputs(const std::filesystem::path& stem, const CampaignResult& result) {
  std::filesystem::path csv = stem, json = stem;
  csv += ".csv";
  json += ".json";
  std::ofstream c(csv);
  if (!c) throw Error(Errc::io_error, "cannot write " + csv.string());
  write_records_csv(c, result.records);
  std::ofstream j(json);
  if (!j) throw Error(Errc::io_error, "cannot write " + json.string());
  j << summary_to_json(result.summary).dump(2) << '\n';
}

std::vector<AblationRow> run_ablation(const QuantizedNetwork& net, std::span<const Sample> samples,
                                      const CampaignSpec& spec) {
  using smt::EncodeOptions;
  const std::vector<std::pair<std::string, EncodeOptions>> configs{
      {"all enabled", EncodeOptions::all_on()},
      {"no redundancy elimination", {true, true, false}},
      {"no minimum bitwidth", {true, false, true}},
      {"no dead branch removal", {false, true, true}},
      {"baseline", EncodeOptions::baseline()},
  };
  std::vector<AblationRow> rows;
  for (const auto& [label, opts] : configs) {
    CampaignSpec s = spec;
    s.options = opts;
    rows.push_back({label, opts, run_campaign(net, samples, s)});
  }
  return rows;
}

std::vector<AblationRow> run_ablation(const CampaignSpec& spec) {
  const QuantizedNetwork net = load_model(spec.model);
  const auto samples = load_idx_dataset(spec.images, spec.labels);
  return run_ablation(net, samples, spec);
}

void write_ablation_table(std::ostream& out, std::span<const AblationRow> rows) {
  out << std::left << std::setw(28) << "configuration" << std::right << std::setw(8) << "solved" << std::setw(10)
      << "timeout" << std::setw(16) << "runtime [s]" << '\n';
  for (const auto& r : rows) {
    const auto& t = r.result.summary.total;
    out << std::left << std::setw(28) << r.label << std::right << std::setw(8) << t.solved << std::setw(10)
        << t.timeout << std::setw(16) << std::fixed << std::setprecision(2) << t.total_seconds << std::defaultfloat
        << '\n';
  }
}

nlohmann::json ablation_to_json(std::span<const AblationRow> rows) {
  nlohmann::json doc = nlohmann::json::array();
  for (const auto& r : rows)
    doc.push_back({{"configuration", r.label},
                   {"options", r.options.footprint()},
                   {"summary", summary_to_json(r.result.summary)}});
  return doc;
}

} // namespace qnnv
