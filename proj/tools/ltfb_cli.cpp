// Copyright (c) 2026 The ltfb authors
// SPDX-License-Identifier: Apache-2.0
//
// Command-line experiment harness. Subcommands:
//   generate-data   materialize a synthetic dataset into bundle files
//   train           run single / ltfb / k-independent training
//   bench-datastore time the three ingestion modes on a dataset
//
// Exit codes: 0 success, 2 configuration error, 3 I/O error,
// 4 numeric abort, 1 anything else.

#include <CLI11.hpp>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>

#include "ltfb/ltfb.hpp"

namespace fs = std::filesystem;
using namespace ltfb;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitOther = 1;
constexpr int kExitConfig = 2;
constexpr int kExitIo = 3;
constexpr int kExitNumeric = 4;

struct GenerateArgs {
  std::uint64_t n = 16000;
  std::uint32_t samples_per_file = 500;
  std::string out_dir;
  std::uint64_t sampling_seed = 1;
  std::uint64_t spec_seed = 1;
  double noise_level = 0.0;
  std::uint32_t views = 3;
  std::uint32_t channels = 4;
  std::uint32_t image_size = 16;
  std::uint32_t latent_dim = 20;
  std::uint32_t scalar_dim = 15;
  bool paper_dims = false;
};

int cmd_generate_data(const GenerateArgs& args) {
  surrogate::ModalityDims dims;
  if (args.paper_dims) {
    dims = surrogate::ModalityDims::paper_scale();
  } else {
    dims.image_views = args.views;
    dims.image_channels = args.channels;
    dims.image_h = args.image_size;
    dims.image_w = args.image_size;
    dims.latent_dim = args.latent_dim;
    dims.scalar_dim = args.scalar_dim;
  }
  synth::GeneratorSpec spec;
  spec.dims = dims;
  spec.noise_level = args.noise_level;
  spec.spec_seed = args.spec_seed;
  synth::SynthGenerator gen(spec);
  const auto records = synth::generate_dataset(gen, args.n,
                                               args.sampling_seed);
  const auto paths =
      data::write_bundles(records, dims, args.samples_per_file, args.out_dir);
  std::cout << "wrote " << paths.size() << " bundle files (" << records.size()
            << " samples, " << dims.record_floats() * 4
            << " bytes per record) under " << args.out_dir << "\n";
  return kExitOk;
}

struct TrainArgs {
  std::string config_path;
  std::string out_dir;
  CLI::App* cmd = nullptr;
  // Flag overrides (applied only when given on the command line).
  std::string mode;
  int trainers = 0;
  int shards = 0;
  std::size_t batch_size = 0;
  double lr = 0;
  std::uint64_t interval = 0;
  std::uint64_t steps = 0;
  std::uint64_t ae_steps = 0;
  std::string data_store;
  int threads = 0;
  std::uint64_t seed = 0;
  std::string data_dir;
};

tournament::RunConfig load_config(const TrainArgs& args) {
  tournament::RunConfig cfg;
  if (!args.config_path.empty()) {
    std::ifstream is(args.config_path);
    if (!is) throw IoError("cannot open config file " + args.config_path);
    bench::json j;
    try {
      is >> j;
    } catch (const std::exception& e) {
      throw ConfigError("config file " + args.config_path +
                        " is not valid JSON: " + e.what());
    }
    cfg = bench::config_from_json(j);
  }
  const CLI::App& cmd = *args.cmd;
  if (cmd.count("--mode")) cfg.mode = tournament::run_mode_from_name(args.mode);
  if (cmd.count("--trainers")) cfg.trainers = args.trainers;
  if (cmd.count("--shards")) cfg.shards = args.shards;
  if (cmd.count("--batch-size")) cfg.batch_size = args.batch_size;
  if (cmd.count("--lr")) cfg.arch.adam.lr = args.lr;
  if (cmd.count("--interval")) cfg.interval = args.interval;
  if (cmd.count("--steps")) cfg.step_budget = args.steps;
  if (cmd.count("--ae-steps")) cfg.ae_steps = args.ae_steps;
  if (cmd.count("--data-store"))
    cfg.store_mode = data::store_mode_from_name(args.data_store);
  if (cmd.count("--threads")) cfg.threads = args.threads;
  if (cmd.count("--seed")) cfg.seed = args.seed;
  if (cmd.count("--data")) cfg.data_dir = args.data_dir;
  if (cfg.data_dir.empty())
    throw ConfigError("no dataset directory: set data_dir or pass --data");
  return cfg;
}

int cmd_train(const TrainArgs& args) {
  const tournament::RunConfig cfg = load_config(args);
  const auto index = tournament::ensure_dataset(cfg);
  auto result = tournament::run_experiment(cfg, index);
  result.history.config_hash = bench::config_hash(cfg);
  bench::write_run_outputs(args.out_dir, cfg, result.history,
                           &result.best_model);
  std::cout << "run complete: best trainer " << result.best_trainer
            << ", validation combined "
            << bench::fmt_double(result.best_metric.combined) << "\n"
            << "outputs under " << args.out_dir << "\n";
  return kExitOk;
}

struct BenchArgs {
  std::string data_dir;
  std::size_t batch_size = 128;
  std::uint32_t epochs = 4;
  int shards = 1;
  std::uint64_t seed = 1;
  std::string out_csv;
  std::vector<std::string> modes{"none", "dynamic", "preload"};
};

int cmd_bench_datastore(const BenchArgs& args) {
  const auto index = data::DatasetIndex::scan_dir(args.data_dir);
  std::vector<data::StoreMode> modes;
  for (const auto& name : args.modes)
    modes.push_back(data::store_mode_from_name(name));
  const auto result = bench::run_datastore_bench(
      index, modes, args.batch_size, args.epochs, args.shards, args.seed);

  std::printf("%-9s %12s %14s %14s %14s\n", "mode", "epoch1_s", "steady_s",
              "files_opened", "bytes_read");
  for (const auto& m : result.modes)
    std::printf("%-9s %12.6f %14.6f %14llu %14llu\n", m.mode.c_str(),
                m.epoch1_seconds(), m.steady_seconds(),
                static_cast<unsigned long long>(m.total_files_opened),
                static_cast<unsigned long long>(m.total_bytes_read));
  if (!args.out_csv.empty())
    bench::write_text_file(args.out_csv, bench::datastore_bench_csv(result));
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"tournament training of generative surrogates with a sharded "
               "in-memory data store"};
  app.require_subcommand(1);

  GenerateArgs gen_args;
  auto* gen = app.add_subcommand("generate-data",
                                 "materialize a synthetic dataset");
  gen->add_option("--n", gen_args.n, "number of samples");
  gen->add_option("--samples-per-file", gen_args.samples_per_file,
                  "samples per bundle file");
  gen->add_option("--out", gen_args.out_dir, "output directory")->required();
  gen->add_option("--sampling-seed", gen_args.sampling_seed,
                  "sweep jitter seed");
  gen->add_option("--spec-seed", gen_args.spec_seed,
                  "generator coefficient seed");
  gen->add_option("--noise", gen_args.noise_level,
                  "additive observation noise level");
  gen->add_option("--views", gen_args.views, "image views");
  gen->add_option("--channels", gen_args.channels, "image channels");
  gen->add_option("--image-size", gen_args.image_size,
                  "square image side length");
  gen->add_option("--latent", gen_args.latent_dim, "latent dimension");
  gen->add_option("--scalars", gen_args.scalar_dim, "scalar output count");
  gen->add_flag("--paper-dims", gen_args.paper_dims,
                "use the full 64x64, 3-view, 4-channel layout");

  TrainArgs train_args;
  auto* train = app.add_subcommand("train", "run a training experiment");
  train_args.cmd = train;
  train->add_option("--config", train_args.config_path, "JSON config file");
  train->add_option("--out", train_args.out_dir, "run output directory")
      ->required();
  train->add_option("--mode", train_args.mode,
                    "single | ltfb | k-independent");
  train->add_option("--trainers", train_args.trainers, "trainer count");
  train->add_option("--shards", train_args.shards,
                    "data-parallel shards per trainer");
  train->add_option("--batch-size", train_args.batch_size,
                    "minibatch size (default 128)");
  train->add_option("--lr", train_args.lr, "learning rate (default 0.001)");
  train->add_option("--interval", train_args.interval,
                    "steps between tournament rounds");
  train->add_option("--steps", train_args.steps, "per-trainer step budget");
  train->add_option("--ae-steps", train_args.ae_steps,
                    "autoencoder pre-training steps");
  train->add_option("--data-store", train_args.data_store,
                    "none | dynamic | preload");
  train->add_option("--threads", train_args.threads,
                    "worker threads (1 = deterministic replay mode)");
  train->add_option("--seed", train_args.seed, "run seed");
  train->add_option("--data", train_args.data_dir, "dataset directory");

  BenchArgs bench_args;
  auto* bench_cmd = app.add_subcommand("bench-datastore",
                                       "time the data-store modes");
  bench_cmd->add_option("--data", bench_args.data_dir, "dataset directory")
      ->required();
  bench_cmd->add_option("--batch-size", bench_args.batch_size,
                        "minibatch size");
  bench_cmd->add_option("--epochs", bench_args.epochs, "epochs per mode");
  bench_cmd->add_option("--shards", bench_args.shards, "shard count");
  bench_cmd->add_option("--seed", bench_args.seed, "shuffle plan seed");
  bench_cmd->add_option("--out", bench_args.out_csv, "CSV output path");
  bench_cmd->add_option("--modes", bench_args.modes,
                        "subset of {none,dynamic,preload}");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (gen->parsed()) return cmd_generate_data(gen_args);
    if (train->parsed()) return cmd_train(train_args);
    if (bench_cmd->parsed()) return cmd_bench_datastore(bench_args);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const IoError& e) {
    std::cerr << "io error: " << e.what() << "\n";
    return kExitIo;
  } catch (const NumericError& e) {
    std::cerr << "numeric abort: " << e.what() << "\n";
    return kExitNumeric;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitOther;
  }
  return kExitOther;
}
