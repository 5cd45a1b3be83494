// Copyright 2026 The Tailor Authors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <json.hpp>

#include <filesystem>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <unistd.h>

#include "tailor/cli.hpp"
#include "tailor/error.hpp"
#include "tailor/io.hpp"

using namespace tailor;
using namespace tailor::cli;

namespace {

class TempDir {
 public:
  TempDir() {
    static int counter = 0;
    path_ = fs::temp_directory_path() /
            ("tailor_cli_" + std::to_string(getpid()) + "_" + std::to_string(counter++));
    fs::remove_all(path_);
    fs::create_directories(path_);
  }
  ~TempDir() { fs::remove_all(path_); }
  fs::path operator/(const std::string& name) const { return path_ / name; }

 private:
  fs::path path_;
};

std::string text(const fs::path& p) {
  const auto bytes = read_file(p);
  return {reinterpret_cast<const char*>(bytes.data()), bytes.size()};
}

int invoke(std::vector<std::string> args) {
  args.insert(args.begin(), "tailor");
  std::vector<char*> argv;
  for (auto& a : args) argv.push_back(a.data());
  return run(static_cast<int>(argv.size()), argv.data());
}

std::vector<std::vector<std::string>> csv_rows(const std::string& body) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream in(body);
  std::string line;
  while (std::getline(in, line)) {
    std::vector<std::string> cells;
    std::istringstream cs(line);
    std::string cell;
    while (std::getline(cs, cell, ',')) cells.push_back(cell);
    rows.push_back(cells);
  }
  return rows;
}

const char* kSpec = R"({"tasks": [
  {"name": "vqa", "n_clusters": 3, "samples_per_cluster": 20, "duplicate_fraction": 0.5,
   "rounds_distribution": [0.7, 0.3]},
  {"name": "ocr", "n_clusters": 2, "samples_per_cluster": 15}
]})";

}  // namespace

TEST_CASE("config parsing") {
  const auto c = parse_config(R"({"k": 0.2, "lambda": 0.05, "ward_variant": "paper_literal",
      "uniqueness_aggregation": "mean", "threads": "auto", "seed": 9})");
  CHECK(c.k == 0.2);
  CHECK(c.lambda == 0.05);
  CHECK(c.ward_variant == WardVariant::kPaperLiteral);
  CHECK(c.uniqueness_aggregation == UniquenessAggregation::kMean);
  CHECK(c.threads == 0);
  CHECK(c.seed == 9);

  const auto d = parse_config("{}");
  CHECK(d.k == 0.075);
  CHECK(d.lambda == 0.1);
  CHECK(d.uniqueness_aggregation == UniquenessAggregation::kSum);

  CHECK_THROWS_AS(parse_config(R"({"kk": 0.2})"), ConfigError);
  CHECK_THROWS_AS(parse_config(R"({"k": 0})"), ConfigError);
  CHECK_THROWS_AS(parse_config(R"({"lambda": 2})"), ConfigError);
  CHECK_THROWS_AS(parse_config(R"({"threads": 0})"), ConfigError);
  CHECK_THROWS_AS(parse_config(R"({"ward_variant": "single"})"), ConfigError);
  CHECK_THROWS_AS(parse_config("not json"), ConfigError);
}

TEST_CASE("synth spec parsing") {
  const auto spec = parse_synth_spec(kSpec);
  REQUIRE(spec.tasks.size() == 2);
  CHECK(spec.tasks[0].duplicate_fraction == 0.5);
  CHECK(spec.tasks[0].rounds_distribution == std::vector<double>{0.7, 0.3});
  const auto r1 = parse_synth_spec(R"({"tasks": [{"name": "x", "token_rank_profile": "rank-1"}]})");
  CHECK(r1.tasks[0].token_rank_profile.max_rank == 1);
  CHECK_THROWS_AS(parse_synth_spec(R"({"tasks": [{"name": "x", "colour": 1}]})"), ConfigError);
}

TEST_CASE("subset parsing") {
  CHECK(parse_subset("3\n1\n\n2\n") == std::vector<SampleId>{3, 1, 2});
  CHECK_THROWS(parse_subset("3\nabc\n"));
}

TEST_CASE("synth, score and select end to end") {
  TempDir dir;
  write_file_atomic(dir / "spec.json", std::string(kSpec));
  REQUIRE(invoke({"synth", (dir / "spec.json").string(), "--seed", "11", "--out",
                  (dir / "a.dtlr").string()}) == kExitOk);
  REQUIRE(invoke({"synth", (dir / "spec.json").string(), "--seed", "11", "--out",
                  (dir / "b.dtlr").string()}) == kExitOk);
  CHECK(text(dir / "a.dtlr") == text(dir / "b.dtlr"));

  const Dataset d = load_container(dir / "a.dtlr");
  CHECK(d.samples.size() == 90);
  // floor(0.5 * 60) byte-identical copies in the first task.
  std::size_t copies = 0;
  for (std::size_t i = 0; i < 60; ++i) {
    for (std::size_t j = 0; j < i; ++j) {
      if (d.samples[i].features == d.samples[j].features) {
        ++copies;
        break;
      }
    }
  }
  CHECK(copies >= 30);

  REQUIRE(invoke({"score", (dir / "a.dtlr").string(), "--out", (dir / "s1.csv").string()}) == kExitOk);
  REQUIRE(invoke({"score", (dir / "a.dtlr").string(), "--out", (dir / "s2.csv").string(),
                  "--threads", "3"}) == kExitOk);
  CHECK(text(dir / "s1.csv") == text(dir / "s2.csv"));
  const auto rows = csv_rows(text(dir / "s1.csv"));
  REQUIRE(rows.size() == d.samples.size() + 1);
  CHECK(rows[0] == std::vector<std::string>{"sample_id", "task", "rounds", "cluster_id", "v_inf_raw",
                                            "v_inf", "v_uni", "v_rep", "v_synergy"});
  for (std::size_t i = 1; i < rows.size(); ++i) {
    const auto& r = rows[i];
    const double v = synergistic_value(std::stod(r[5]), std::stod(r[6]), std::stod(r[7]),
                                       static_cast<std::uint32_t>(std::stoul(r[2])));
    CHECK(std::abs(v - std::stod(r[8])) <= 1e-8);
  }

  REQUIRE(invoke({"select", (dir / "a.dtlr").string(), "--out", (dir / "sel").string(), "--k",
                  "0.2"}) == kExitOk);
  const auto j = nlohmann::json::parse(text(dir / "sel" / "selection.json"));
  CHECK(j["config"]["k"] == 0.2);
  CHECK(j["selected"].size() == 18);
  CHECK(j["plan"].size() == 2);
  CHECK(j["metrics"]["subset_size"] == 18);
  const auto sel_rows = csv_rows(text(dir / "sel" / "scores.csv"));
  CHECK(sel_rows[0].back() == "selected");
  std::size_t flagged = 0;
  for (std::size_t i = 1; i < sel_rows.size(); ++i) flagged += sel_rows[i].back() == "1";
  CHECK(flagged == 18);

  REQUIRE(invoke({"select", (dir / "a.dtlr").string(), "--out", (dir / "all").string(), "--k",
                  "1"}) == kExitOk);
  CHECK(nlohmann::json::parse(text(dir / "all" / "selection.json"))["selected"].size() == 90);

  std::string all_ids;
  for (const auto& s : d.samples) all_ids += std::to_string(s.id) + "\n";
  write_file_atomic(dir / "all.txt", all_ids);
  REQUIRE(invoke({"evaluate", (dir / "a.dtlr").string(), (dir / "all.txt").string(), "--out",
                  (dir / "m.json").string()}) == kExitOk);
  const auto m = nlohmann::json::parse(text(dir / "m.json"));
  CHECK(m["cluster_coverage"] == 1.0);
  CHECK(m["subset_size"] == 90);
}

TEST_CASE("rank-1 profile scores zero informativeness") {
  TempDir dir;
  write_file_atomic(dir / "spec.json",
                    std::string(R"({"tasks": [{"name": "flat", "samples_per_cluster": 10,
                                 "token_rank_profile": "rank-1"}]})"));
  REQUIRE(invoke({"synth", (dir / "spec.json").string(), "--out", (dir / "r1.dtlr").string()}) == kExitOk);
  REQUIRE(invoke({"score", (dir / "r1.dtlr").string(), "--out", (dir / "s.csv").string()}) == kExitOk);
  const auto rows = csv_rows(text(dir / "s.csv"));
  REQUIRE(rows.size() == 41);
  for (std::size_t i = 1; i < rows.size(); ++i) CHECK(rows[i][4] == "0");
}

TEST_CASE("exit codes") {
  TempDir dir;
  write_file_atomic(dir / "spec.json", std::string(kSpec));
  REQUIRE(invoke({"synth", (dir / "spec.json").string(), "--out", (dir / "a.dtlr").string()}) == kExitOk);

  CHECK(invoke({"select", (dir / "missing.dtlr").string(), "--out", (dir / "o").string()}) ==
        kExitBadInput);
  CHECK(!fs::exists(dir / "o" / "selection.json"));

  write_file_atomic(dir / "junk.dtlr", std::string("XXXXjunk"));
  CHECK(invoke({"score", (dir / "junk.dtlr").string(), "--out", (dir / "j.csv").string()}) ==
        kExitBadInput);
  CHECK(!fs::exists(dir / "j.csv"));

  write_file_atomic(dir / "bad.json", std::string(R"({"k": 0.1, "colour": "red"})"));
  CHECK(invoke({"select", (dir / "a.dtlr").string(), "--config", (dir / "bad.json").string(),
                "--out", (dir / "o").string()}) == kExitBadConfig);
  CHECK(invoke({"select", (dir / "a.dtlr").string(), "--k", "1.5", "--out", (dir / "o").string()}) ==
        kExitBadConfig);
  CHECK(invoke({"select", (dir / "a.dtlr").string(), "--bogus"}) == kExitBadConfig);

  write_file_atomic(dir / "badspec.json", std::string(R"({"tasks": [{"name": "x", "duplicate_fraction": 2}]})"));
  CHECK(invoke({"synth", (dir / "badspec.json").string(), "--out", (dir / "x.dtlr").string()}) ==
        kExitBadConfig);

  write_file_atomic(dir / "ids.txt", std::string("0\n123456789\n"));
  CHECK(invoke({"evaluate", (dir / "a.dtlr").string(), (dir / "ids.txt").string(), "--out",
                (dir / "m.json").string()}) == kExitBadInput);
  CHECK(!fs::exists(dir / "m.json"));
}
