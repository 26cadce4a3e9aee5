#include "doctest.h"

#include "qnnv/core/error.hpp"
#include "qnnv/core/interpreter.hpp"
#include "qnnv/core/model_io.hpp"
#include "qnnv/harness/brute_force.hpp"
#include "qnnv/harness/campaign.hpp"

#include "../support/reference.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>

#include <unistd.h>

using namespace qnnv;
namespace fs = std::filesystem;

namespace {

IntVector iv(std::initializer_list<long> xs) {
  IntVector v;
  for (long x : xs) v.emplace_back(x);
  return v;
}

// y0 = x, y1 = min(2x, 3) over 2-bit inputs.
QuantizedNetwork micro_network() {
  QuantizedNetwork net;
  net.input_bits = 2;
  net.weight_bits = 2;
  net.layers.push_back({{iv({1}), iv({2})}, iv({0, 0}), {0, 0}, {2, 2}, std::nullopt});
  return net;
}

std::string u32be(std::uint32_t v) {
  return {static_cast<char>(v >> 24), static_cast<char>(v >> 16), static_cast<char>(v >> 8), static_cast<char>(v)};
}

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() / ("qnnv-test-" + std::to_string(::getpid()) + "-" + std::to_string(counter()++));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  static int& counter() {
    static int c = 0;
    return c;
  }
};

// Pixel 64 -> x = 1 (label 1, not robust at radius 1); pixel 0 -> x = 0
// which the network assigns to class 0, so label 1 there is misclassified.
std::vector<Sample> micro_samples() { return {{{64}, 1}, {{0}, 1}, {{128}, 1}}; }

CampaignSpec micro_spec(const fs::path& dir) {
  CampaignSpec spec;
  spec.model = dir / "micro.json";
  spec.images = dir / "images.idx3";
  spec.labels = dir / "labels.idx1";
  spec.schedule = {{1, 0, 2}, {0, 2, 3}};
  spec.solver.executable = test::test_solver();
  spec.solver.timeout_secs = 30;
  spec.output = dir / "out";
  save_model(micro_network(), spec.model);
  save_idx_dataset(spec.images, spec.labels, micro_samples(), 1, 1);
  return spec;
}

} // namespace

TEST_CASE("quantize_pixels keeps the top bits") {
  const std::vector<std::uint8_t> px{255, 0, 130, 3, 4};
  CHECK(quantize_pixels(px, 6) == iv({63, 0, 32, 0, 1}));
  CHECK(quantize_pixels(px, 8) == iv({255, 0, 130, 3, 4}));
  CHECK(quantize_pixels(px, 1) == iv({1, 0, 1, 0, 0}));
  CHECK_THROWS_AS(quantize_pixels(px, 0), Error);
  CHECK_THROWS_AS(quantize_pixels(px, 9), Error);
}

TEST_CASE("IDX parsing") {
  const std::string images = u32be(0x803) + u32be(2) + u32be(1) + u32be(2) + std::string("\x01\x02\x03\x04", 4);
  const std::string labels = u32be(0x801) + u32be(2) + std::string("\x07\x09", 2);
  const auto samples = parse_idx_dataset(images, labels);
  REQUIRE(samples.size() == 2);
  CHECK(samples[1].pixels == std::vector<std::uint8_t>{3, 4});
  CHECK(samples[1].label == 9);

  auto message = [](const std::string& im, const std::string& lb) {
    try {
      parse_idx_dataset(im, lb);
    } catch (const Error& e) {
      return std::string(e.what());
    }
    return std::string();
  };
  CHECK(message(u32be(0x802) + images.substr(4), labels).find("bad magic") != std::string::npos);
  const std::string truncated = message(images.substr(0, images.size() - 1), labels);
  CHECK(truncated.find("truncated") != std::string::npos);
  CHECK(truncated.find("expected 20 bytes") != std::string::npos);
  CHECK(truncated.find("found 19") != std::string::npos);
  CHECK(message(images, u32be(0x801) + u32be(1) + "\x07").find("mismatch") != std::string::npos);
}

TEST_CASE("IDX round trip and hold-out fixture") {
  TempDir dir;
  const auto in = micro_samples();
  save_idx_dataset(dir.path / "i.idx3", dir.path / "l.idx1", in, 1, 1);
  const auto out = load_idx_dataset(dir.path / "i.idx3", dir.path / "l.idx1");
  REQUIRE(out.size() == in.size());
  for (std::size_t i = 0; i < in.size(); ++i) {
    CHECK(out[i].pixels == in[i].pixels);
    CHECK(out[i].label == in[i].label);
  }
  const auto holdout =
      load_idx_dataset(test::data_dir() / "mnist-holdout-images.idx3", test::data_dir() / "mnist-holdout-labels.idx1");
  CHECK(holdout.size() == 200);
  CHECK(holdout[0].pixels.size() == 784);
  CHECK_THROWS_AS(load_idx_dataset(dir.path / "missing", dir.path / "l.idx1"), Error);
}

TEST_CASE("campaign spec JSON resolves relative paths") {
  const auto doc = nlohmann::json::parse(R"({
    "model": "m.json", "images": "/abs/i.idx3", "labels": "l.idx1",
    "schedule": [{"epsilon": 2, "begin": 0, "end": 5}, {"epsilon": "3", "begin": 5, "end": 6}],
    "options": {"dead_branch_removal": false},
    "solver": {"executable": "boolector", "args": ["-m"], "timeout_secs": 7},
    "parallelism": 3, "output": "res"})");
  const auto spec = campaign_spec_from_json(doc, "/base");
  CHECK(spec.model == fs::path("/base/m.json"));
  CHECK(spec.images == fs::path("/abs/i.idx3"));
  CHECK(spec.output == fs::path("/base/res"));
  REQUIRE(spec.schedule.size() == 2);
  CHECK(spec.schedule[1].epsilon == 3);
  CHECK_FALSE(spec.options.dead_branch_removal);
  CHECK(spec.options.minimal_bits);
  CHECK(spec.solver.executable == "boolector");
  CHECK(spec.solver.timeout_secs == 7.0);
  CHECK(spec.parallelism == 3);
  CHECK_THROWS_AS(campaign_spec_from_json(nlohmann::json::parse(R"({"model": "m"})")), Error);
  const auto ci = load_campaign_spec(test::data_dir() / "ci_campaign.json");
  CHECK(ci.model == test::data_dir() / "mnist_784_16_10_w4.json");
}

TEST_CASE("campaign schedule validation") {
  const auto net = micro_network();
  const auto samples = micro_samples();
  CampaignSpec spec;
  spec.schedule = {{1, 0, 2}, {1, 1, 3}};
  CHECK_THROWS_AS(run_campaign(net, samples, spec), Error);
  spec.schedule = {{1, 2, 5}};
  CHECK_THROWS_AS(run_campaign(net, samples, spec), Error);
  spec.schedule = {};
  const auto empty = run_campaign(net, samples, spec);
  CHECK(empty.records.empty());
  CHECK(empty.summary.total.attempted == 0);
  CHECK_FALSE(empty.summary.total.median_seconds);
}

TEST_CASE("summary arithmetic") {
  std::vector<ResultRecord> recs(5);
  recs[0] = {0, 1, RecordStatus::sat, true, 1.0};
  recs[1] = {1, 1, RecordStatus::unsat, false, 3.0};
  recs[2] = {2, 1, RecordStatus::timeout, false, 10.0};
  recs[3] = {3, 2, RecordStatus::skipped, false, 0.0};
  recs[4] = {4, 2, RecordStatus::unsat, false, 2.0};
  const auto s = summarize(recs);
  CHECK(s.total.attempted == 4);
  CHECK(s.total.skipped == 1);
  CHECK(s.total.solved == 3);
  CHECK(s.total.timeout == 1);
  CHECK(*s.total.median_seconds == doctest::Approx(2.0));
  CHECK(*s.total.mean_seconds == doctest::Approx(2.0));
  CHECK(s.total.total_seconds == doctest::Approx(16.0));
  REQUIRE(s.by_epsilon.count("1"));
  CHECK(s.by_epsilon.at("1").solved == 2);
  CHECK(*s.by_epsilon.at("1").median_seconds == doctest::Approx(2.0));
  CHECK(s.by_epsilon.at("2").skipped == 1);
  const auto j = summary_to_json(s);
  CHECK(j.at("total").at("solved") == 3);
}

TEST_CASE("failing solver is recorded per sample") {
  TempDir dir;
  auto spec = micro_spec(dir.path);
  spec.solver.executable = "/nonexistent/solver";
  const auto result = run_campaign(spec);
  REQUIRE(result.records.size() == 3);
  CHECK(result.records[0].status == RecordStatus::solver_error);
  CHECK(result.records[1].status == RecordStatus::skipped);
  CHECK(result.records[2].status == RecordStatus::solver_error);
  CHECK(result.summary.total.errors == 2);
}

TEST_CASE("toy campaign end to end" * doctest::skip(test::test_solver().empty())) {
  TempDir dir;
  auto spec = micro_spec(dir.path);
  const auto result = run_campaign(spec);
  REQUIRE(result.records.size() == 3);
  CHECK(result.records[0].status == RecordStatus::sat);
  CHECK(result.records[0].validated);
  CHECK(result.records[1].status == RecordStatus::skipped);
  CHECK(result.records[2].status == RecordStatus::unsat);
  CHECK(result.records[2].epsilon == 0);

  // Brute force agrees on every attempted record.
  const auto net = micro_network();
  const auto samples = micro_samples();
  for (const auto& r : result.records) {
    if (!r.solved()) continue;
    const auto x = quantize_pixels(samples[r.sample_index].pixels, net.input_bits);
    CHECK(brute_force_verify(net, x, samples[r.sample_index].label, r.epsilon).robust == (r.status == RecordStatus::unsat));
  }

  write_campaign_outputs(spec.output, result);
  std::ifstream csv(dir.path / "out.csv");
  std::string header, line;
  std::getline(csv, header);
  CHECK(header.find("sample") != std::string::npos);
  int rows = 0;
  while (std::getline(csv, line)) ++rows;
  CHECK(rows == 3);
  std::ifstream js(dir.path / "out.json");
  CHECK(nlohmann::json::parse(js).at("total").at("sat") == 1);

  spec.parallelism = 3;
  const auto again = run_campaign(spec);
  REQUIRE(again.records.size() == result.records.size());
  for (std::size_t i = 0; i < again.records.size(); ++i) {
    CHECK(again.records[i].sample_index == result.records[i].sample_index);
    CHECK(again.records[i].status == result.records[i].status);
  }

  const auto rows5 = run_ablation(spec);
  REQUIRE(rows5.size() == 5);
  CHECK(rows5.front().label == "all enabled");
  CHECK(rows5.back().label == "baseline");
  for (const auto& row : rows5)
    for (std::size_t i = 0; i < row.result.records.size(); ++i)
      CHECK(row.result.records[i].status == result.records[i].status);
  std::ostringstream table;
  write_ablation_table(table, rows5);
  CHECK(table.str().find("no dead branch removal") != std::string::npos);
  CHECK(ablation_to_json(rows5).size() == 5);
}
