#pragma once

#include "qnnv/harness/dataset.hpp"
#include "qnnv/solver/verify.hpp"

#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>

#include "json.hpp"

namespace qnnv {

/// Radius applied to the samples with indices in [begin, end).
struct ScheduleEntry {
  Integer epsilon = 0;
  std::size_t begin = 0;
  std::size_t end = 0;
};

struct CampaignSpec {
  std::filesystem::path model;
  std::filesystem::path images;
  std::filesystem::path labels;
  std::vector<ScheduleEntry> schedule;
  smt::EncodeOptions options;
  SolverConfig solver;
  unsigned parallelism = 1;
  std::filesystem::path output; // stem: <output>.csv and <output>.json
};

/// Relative paths in the document are resolved against `base_dir`.
CampaignSpec campaign_spec_from_json(const nlohmann::json& doc, const std::filesystem::path& base_dir = {});
CampaignSpec load_campaign_spec(const std::filesystem::path& path);

enum class RecordStatus { sat, unsat, unknown, timeout, solver_error, skipped, mismatch };

std::string to_string(RecordStatus status);

struct ResultRecord {
  std::size_t sample_index = 0;
  Integer epsilon = 0;
  RecordStatus status = RecordStatus::skipped;
  bool validated = false;
  double wall_seconds = 0.0;
  double encode_seconds = 0.0;
  smt::EncodeStats stats;
  std::string footprint;
  std::string diagnostic;

  bool solved() const { return status == RecordStatus::sat || status == RecordStatus::unsat; }
};

struct RadiusSummary {
  std::size_t attempted = 0; // records that were not skipped
  std::size_t skipped = 0;
  std::size_t sat = 0;
  std::size_t unsat = 0;
  std::size_t unknown = 0;
  std::size_t timeout = 0;
  std::size_t errors = 0;
  std::size_t mismatches = 0;
  std::size_t solved = 0;
  std::optional<double> median_seconds; // over solved records
  std::optional<double> mean_seconds;
  double total_seconds = 0.0; // every attempted record
};

struct CampaignSummary {
  std::map<std::string, RadiusSummary> by_epsilon; // keyed by decimal epsilon
  RadiusSummary total;
};

struct CampaignResult {
  std::vector<ResultRecord> records;
  CampaignSummary summary;
};

/// Runs every schedule entry against preloaded data.  Records are ordered
/// by schedule entry, then sample index, independent of parallelism.
/// Samples misclassified at their unperturbed input are Skipped.  Failures of
/// individual queries are recorded, never thrown.
CampaignResult run_campaign(const QuantizedNetwork& net, std::span<const Sample> samples, const CampaignSpec& spec);
CampaignResult run_campaign(const CampaignSpec& spec);

CampaignSummary summarize(std::span<const ResultRecord> records);

void write_records_csv(std::ostream& out, std::span<const ResultRecord> records);
nlohmann::json summary_to_json(const CampaignSummary& summary);
/// Writes <output>.csv and <output>.json.
void write_campaign_outputs(const std::filesystem::path& stem, const CampaignResult& result);

struct AblationRow {
  std::string label;
  smt::EncodeOptions options;
  CampaignResult result;
};

/// The campaign under all passes, each pass disabled in turn, and none.
std::vector<AblationRow> run_ablation(const QuantizedNetwork& net, std::span<const Sample> samples,
                                      const CampaignSpec& spec);
std::vector<AblationRow> run_ablation(const CampaignSpec& spec);
void write_ablation_table(std::ostream& out, std::span<const AblationRow> rows);
nlohmann::json ablation_to_json(std::span<const AblationRow> rows);

} // namespace qnnv
