// Copyright (c) 2026 The ltfb authors
// SPDX-License-Identifier: Apache-2.0
//
// End-to-end tests of the command-line harness. The binary path comes from
// the LTFB_CLI_PATH compile definition (set by CMake) or the LTFB_CLI
// environment variable.

#include <gtest/gtest.h>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <map>
#include <sstream>

#include <json.hpp>

#include "ltfb/bench/output.hpp"
#include "test_util.hpp"

using namespace ltfb;
using namespace ltfb_test;
using nlohmann::json;

namespace {

std::string cli_path() {
#ifdef LTFB_CLI_PATH
  return LTFB_CLI_PATH;
#else
  const char* env = std::getenv("LTFB_CLI");
  return env ? env : "";
#endif
}

struct CliResult {
  int exit_code = -1;
  std::string output;
};

CliResult run_cli(const std::string& args) {
  const std::string cmd = cli_path() + " " + args + " 2>&1";
  std::FILE* pipe = ::popen(cmd.c_str(), "r");
  if (!pipe) return {};
  CliResult result;
  char buf[512];
  while (std::fgets(buf, sizeof(buf), pipe)) result.output += buf;
  const int status = ::pclose(pipe);
  result.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return result;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  std::ostringstream os;
  os << is.rdbuf();
  return os.str();
}

std::size_t count_bundles(const std::filesystem::path& dir) {
  std::size_t n = 0;
  if (!std::filesystem::exists(dir)) return 0;
  for (const auto& e : std::filesystem::directory_iterator(dir))
    if (e.path().extension() == ".lbds") ++n;
  return n;
}

void write_tiny_config(const std::filesystem::path& path,
                       const std::filesystem::path& data_dir,
                       const std::string& mode, int trainers,
                       std::uint64_t interval, std::uint64_t steps) {
  json j;
  j["data_dir"] = data_dir.string();
  j["gen_n"] = 600;
  j["samples_per_file"] = 100;
  j["image_views"] = 1;
  j["image_channels"] = 1;
  j["image_h"] = 4;
  j["image_w"] = 4;
  j["enc_hidden"] = {8};
  j["dec_hidden"] = {8};
  j["fwd_hidden"] = {8};
  j["inv_hidden"] = {8};
  j["disc_hidden"] = {8};
  j["mode"] = mode;
  j["trainers"] = trainers;
  j["batch_size"] = 32;
  j["interval"] = interval;
  j["step_budget"] = steps;
  j["ae_steps"] = 10;
  j["seed"] = 5;
  std::ofstream(path) << j.dump(2);
}

std::vector<json> parse_jsonl(const std::filesystem::path& path) {
  std::vector<json> events;
  std::ifstream is(path);
  std::string line;
  while (std::getline(is, line))
    if (!line.empty()) events.push_back(json::parse(line));
  return events;
}

}  // namespace

TEST(CliGenerateData, WritesExpectedFileCount) {
  ASSERT_FALSE(cli_path().empty());
  TempDir dir("cli_gen");
  const auto out = dir.path() / "data";
  const auto result = run_cli(
      "generate-data --n 4000 --samples-per-file 500 --views 1 --channels 1 "
      "--image-size 4 --out " + out.string());
  EXPECT_EQ(result.exit_code, 0) << result.output;
  EXPECT_EQ(count_bundles(out), 8u);
}

TEST(CliGenerateData, RerunsAreByteIdentical) {
  TempDir dir("cli_gen_det");
  const auto out1 = dir.path() / "a";
  const auto out2 = dir.path() / "b";
  const std::string flags =
      "generate-data --n 300 --samples-per-file 100 --views 1 --channels 1 "
      "--image-size 4 --sampling-seed 7 --spec-seed 9 --out ";
  ASSERT_EQ(run_cli(flags + out1.string()).exit_code, 0);
  ASSERT_EQ(run_cli(flags + out2.string()).exit_code, 0);
  for (int f = 0; f < 3; ++f) {
    char name[32];
    std::snprintf(name, sizeof(name), "bundle_%05d.lbds", f);
    EXPECT_EQ(read_file(out1 / name), read_file(out2 / name)) << name;
  }
}

TEST(CliGenerateData, UnwritableDestinationFailsCleanly) {
  TempDir dir("cli_gen_bad");
  const auto blocker = dir.path() / "blocker";
  std::ofstream(blocker) << "x";
  const auto bad = blocker / "out";
  const auto result = run_cli(
      "generate-data --n 10 --samples-per-file 5 --views 1 --channels 1 "
      "--image-size 4 --out " + bad.string());
  EXPECT_EQ(result.exit_code, 3) << result.output;
  EXPECT_EQ(count_bundles(bad), 0u);
}

TEST(CliTrain, SingleModeHasNoTournamentEvents) {
  TempDir dir("cli_single");
  const auto cfg_path = dir.path() / "config.json";
  write_tiny_config(cfg_path, dir.path() / "data", "single", 1, 10, 20);
  const auto result = run_cli("train --config " + cfg_path.string() +
                              " --out " + (dir.path() / "run").string());
  EXPECT_EQ(result.exit_code, 0) << result.output;

  const auto events = parse_jsonl(dir.path() / "run" / "events.jsonl");
  ASSERT_FALSE(events.empty());
  for (const auto& e : events) {
    EXPECT_NE(e["type"], "round");
    EXPECT_NE(e["type"], "trainer_round");
    EXPECT_NE(e["type"], "transfer");
  }
  EXPECT_TRUE(std::filesystem::exists(dir.path() / "run" / "summary.csv"));
  EXPECT_TRUE(std::filesystem::exists(dir.path() / "run" / "best_model.bin"));
}

TEST(CliTrain, IntervalBeyondBudgetMeansZeroRounds) {
  TempDir dir("cli_zero_rounds");
  const auto cfg_path = dir.path() / "config.json";
  write_tiny_config(cfg_path, dir.path() / "data", "ltfb", 2, 1000, 10);
  const auto result = run_cli("train --config " + cfg_path.string() +
                              " --out " + (dir.path() / "run").string());
  EXPECT_EQ(result.exit_code, 0) << result.output;
  for (const auto& e : parse_jsonl(dir.path() / "run" / "events.jsonl"))
    EXPECT_NE(e["type"], "round");
}

TEST(CliTrain, SummaryRecomputesExactlyFromTheEventLog) {
  TempDir dir("cli_recompute");
  const auto cfg_path = dir.path() / "config.json";
  write_tiny_config(cfg_path, dir.path() / "data", "ltfb", 2, 10, 30);
  const auto result = run_cli("train --config " + cfg_path.string() +
                              " --out " + (dir.path() / "run").string());
  ASSERT_EQ(result.exit_code, 0) << result.output;

  const auto events = parse_jsonl(dir.path() / "run" / "events.jsonl");
  std::string config_hash, mode;
  int n_trainers = 0, best_trainer = -1;
  std::map<int, train::TrainerSummary> summaries;
  for (const auto& e : events) {
    const std::string type = e["type"];
    if (type == "run_start") {
      config_hash = e["config_hash"];
      mode = e["mode"];
      n_trainers = e["trainers"];
      for (int t = 0; t < n_trainers; ++t) summaries[t].trainer = t;
    } else if (type == "step") {
      auto& s = summaries[e["trainer"]];
      s.steps = std::max<std::uint64_t>(s.steps, e["step"]);
      if (!e["skipped"].get<bool>()) {
        s.final_d_loss = e["d_loss"];
        s.final_g_total = e["g_total"];
        s.final_g_fwd = e["g_fwd"];
        s.final_g_adv = e["g_adv"];
        s.final_g_cyc = e["g_cyc"];
      } else {
        s.skipped_steps += 1;
      }
    } else if (type == "eval") {
      auto& s = summaries[e["trainer"]];
      s.final_val_forward_mae = e["forward_mae"];
      s.final_val_inverse_mae = e["inverse_mae"];
      s.final_val_combined = e["combined"];
    } else if (type == "epoch") {
      auto& s = summaries[e["trainer"]];
      if (e["epoch"].get<std::uint32_t>() > 0 && !e["partial"].get<bool>())
        s.epochs_completed += 1;
      s.files_opened += e["files_opened"].get<std::uint64_t>();
      s.bytes_read += e["bytes_read"].get<std::uint64_t>();
      s.samples_shuffled += e["samples_shuffled"].get<std::uint64_t>();
    } else if (type == "trainer_round") {
      auto& s = summaries[e["trainer"]];
      s.rounds += 1;
      if (e["winner"] == "incoming") s.incoming_adopted += 1;
    } else if (type == "run_end") {
      best_trainer = e["best_trainer"];
    }
  }

  train::RunHistory rebuilt;
  rebuilt.config_hash = config_hash;
  rebuilt.mode = mode;
  rebuilt.n_trainers = n_trainers;
  for (auto& [t, s] : summaries) {
    s.is_best = t == best_trainer;
    rebuilt.summaries.push_back(s);
  }
  EXPECT_EQ(bench::summary_csv(rebuilt),
            read_file(dir.path() / "run" / "summary.csv"));
}

TEST(CliTrain, UnknownConfigKeysAreListedAndExitTwo) {
  TempDir dir("cli_badcfg");
  const auto cfg_path = dir.path() / "config.json";
  std::ofstream(cfg_path)
      << R"({"trainers": 2, "no_such_key": 1, "also_bad": "x"})";
  const auto result = run_cli("train --config " + cfg_path.string() +
                              " --out " + (dir.path() / "run").string());
  EXPECT_EQ(result.exit_code, 2) << result.output;
  EXPECT_NE(result.output.find("no_such_key"), std::string::npos);
  EXPECT_NE(result.output.find("also_bad"), std::string::npos);
}

TEST(CliTrain, BadModeFlagExitsTwo) {
  TempDir dir("cli_badmode");
  const auto result =
      run_cli("train --mode bogus --data " + (dir.path() / "d").string() +
              " --out " + (dir.path() / "run").string());
  EXPECT_EQ(result.exit_code, 2) << result.output;
}

TEST(CliBenchDatastore, MissingDatasetExitsThree) {
  const auto result = run_cli("bench-datastore --data /nonexistent_ltfb_ds");
  EXPECT_EQ(result.exit_code, 3) << result.output;
}

TEST(CliBenchDatastore, ReportsAllThreeModes) {
  TempDir dir("cli_bench");
  const auto data = dir.path() / "data";
  ASSERT_EQ(run_cli("generate-data --n 256 --samples-per-file 32 --views 1 "
                    "--channels 1 --image-size 4 --out " + data.string())
                .exit_code,
            0);
  const auto csv = dir.path() / "bench.csv";
  const auto result =
      run_cli("bench-datastore --data " + data.string() +
              " --batch-size 32 --epochs 3 --out " + csv.string());
  EXPECT_EQ(result.exit_code, 0) << result.output;
  EXPECT_NE(result.output.find("preload"), std::string::npos);
  EXPECT_NE(result.output.find("dynamic"), std::string::npos);
  const std::string csv_text = read_file(csv);
  EXPECT_NE(csv_text.find("none,1,"), std::string::npos);
  EXPECT_NE(csv_text.find("preload,3,"), std::string::npos);
}
