// Copyright (c) 2026 The ltfb authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <future>
#include <limits>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

#include "ltfb/synth/generator.hpp"
#include "ltfb/tournament/ltfb.hpp"

// Experiment orchestration. A run is: split the dataset (shared validation
// slice, k disjoint partitions, per-trainer tournament slices), pre-train
// the autoencoder once and broadcast it, then alternate train chunks with
// tournament rounds until the step budget. K-independent is the same loop
// with rounds disabled; single is k = 1. Everything derives from the run
// seed, so a run is a pure function of its configuration.

namespace ltfb::tournament {

enum class RunMode { kSingle, kLtfb, kKIndependent };

inline std::string run_mode_name(RunMode m) {
  switch (m) {
    case RunMode::kSingle: return "single";
    case RunMode::kLtfb: return "ltfb";
    case RunMode::kKIndependent: return "k-independent";
  }
  return "single";
}

inline RunMode run_mode_from_name(const std::string& name) {
  if (name == "single") return RunMode::kSingle;
  if (name == "ltfb") return RunMode::kLtfb;
  if (name == "k-independent" || name == "k_independent")
    return RunMode::kKIndependent;
  throw ConfigError("unknown run mode: " + name);
}

struct RunConfig {
  // Dataset on disk; generated on demand when `generate` is set and the
  // directory does not already hold bundles.
  std::string data_dir;
  bool generate = true;
  std::uint64_t gen_n = 16000;
  std::uint32_t samples_per_file = 500;
  std::uint64_t sampling_seed = 1;
  std::uint64_t spec_seed = 1;
  double noise_level = 0.0;

  surrogate::ModalityDims dims;
  surrogate::SurrogateArch arch;

  RunMode mode = RunMode::kSingle;
  int trainers = 1;
  int shards = 1;
  std::size_t batch_size = 128;
  std::uint64_t interval = 100;
  std::uint64_t step_budget = 1000;
  std::uint64_t ae_steps = 2000;
  data::StoreMode store_mode = data::StoreMode::kPreload;
  int threads = 1;
  std::uint64_t seed = 1;
  double validation_fraction = 0.05;
  double tournament_fraction = 0.05;
  double lr_jitter = 0.0;
  std::size_t store_budget_mb = 0;
  int numeric_abort_threshold = 10;
  int prefetch_depth = 1;
  double w_f = 1.0;
  double w_i = 1.0;
};

struct RunResult {
  train::RunHistory history;
  int best_trainer = -1;
  surrogate::EvalMetric best_metric;
  surrogate::CycleGan<float> best_model;
};

namespace detail {

inline void validate_run_config(const RunConfig& cfg) {
  std::string problems;
  auto bad = [&](const std::string& msg) { problems += msg + "; "; };
  if (cfg.trainers < 1) bad("trainers must be >= 1");
  if (cfg.shards < 1) bad("shards must be >= 1");
  if (cfg.batch_size < 1) bad("batch_size must be >= 1");
  if (cfg.interval < 1) bad("interval must be >= 1");
  if (cfg.threads < 1) bad("threads must be >= 1");
  if (!(cfg.validation_fraction >= 0 && cfg.validation_fraction < 1))
    bad("validation_fraction must be in [0,1)");
  if (!(cfg.tournament_fraction >= 0 && cfg.tournament_fraction < 1))
    bad("tournament_fraction must be in [0,1)");
  if (cfg.numeric_abort_threshold < 0)
    bad("numeric_abort_threshold must be >= 0");
  if (cfg.prefetch_depth < 0) bad("prefetch_depth must be >= 0");
  if (!problems.empty()) throw ConfigError("invalid run config: " + problems);
  cfg.dims.validate();
}

/// Runs fn(i) for i in [0, n) on up to `threads` workers. With one thread
/// the calls happen inline in index order; results are identical either way
/// because the tasks share no state.
template <typename Fn>
void parallel_for_indices(int n, int threads, Fn&& fn) {
  if (threads <= 1 || n <= 1) {
    for (int i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<int> next{0};
  const int workers = std::min(threads, n);
  std::vector<std::future<void>> futures;
  futures.reserve(static_cast<std::size_t>(workers));
  for (int w = 0; w < workers; ++w)
    futures.push_back(std::async(std::launch::async, [&]() {
      for (int i = next.fetch_add(1); i < n; i = next.fetch_add(1)) fn(i);
    }));
  for (auto& f : futures) f.get();
}

struct DataSplit {
  std::vector<data::SampleId> validation;
  std::vector<std::vector<data::SampleId>> train;       // per trainer
  std::vector<std::vector<data::SampleId>> tournament;  // per trainer
};

inline DataSplit split_dataset(const data::DatasetIndex& index, int k,
                               double validation_fraction,
                               double tournament_fraction,
                               std::uint64_t seed, bool need_tournament) {
  std::vector<data::SampleId> ids(index.total);
  for (std::size_t i = 0; i < index.total; ++i)
    ids[i] = static_cast<data::SampleId>(i);

  Rng rng(mix_seed({seed, 0xa11ULL}));
  rng.shuffle(ids);
  const std::size_t n_val =
      static_cast<std::size_t>(validation_fraction *
                               static_cast<double>(ids.size()));
  DataSplit split;
  split.validation.assign(ids.begin(),
                          ids.begin() + static_cast<std::ptrdiff_t>(n_val));
  std::vector<data::SampleId> pool(
      ids.begin() + static_cast<std::ptrdiff_t>(n_val), ids.end());

  auto parts = partition_dataset(std::move(pool), k, mix_seed({seed, 0xbbULL}));
  split.train.resize(parts.size());
  split.tournament.resize(parts.size());
  for (std::size_t t = 0; t < parts.size(); ++t) {
    auto& part = parts[t];
    Rng part_rng(mix_seed({seed, 0xccULL, t}));
    part_rng.shuffle(part);
    std::size_t n_tour = static_cast<std::size_t>(
        tournament_fraction * static_cast<double>(part.size()));
    if (need_tournament && n_tour == 0 && part.size() > 1) n_tour = 1;
    split.tournament[t].assign(
        part.begin(), part.begin() + static_cast<std::ptrdiff_t>(n_tour));
    split.train[t].assign(part.begin() + static_cast<std::ptrdiff_t>(n_tour),
                          part.end());
  }
  return split;
}

inline void merge_segments(train::RunHistory& history,
                           std::vector<std::unique_ptr<train::Trainer>>& ts) {
  for (auto& t : ts) {
    auto& seg = t->history();
    history.steps.insert(history.steps.end(), seg.steps.begin(),
                         seg.steps.end());
    history.evals.insert(history.evals.end(), seg.evals.begin(),
                         seg.evals.end());
    history.epochs.insert(history.epochs.end(), seg.epochs.begin(),
                          seg.epochs.end());
  }
  std::stable_sort(history.steps.begin(), history.steps.end(),
                   [](const auto& l, const auto& r) {
                     return std::pair(l.step, l.trainer) <
                            std::pair(r.step, r.trainer);
                   });
  std::stable_sort(history.evals.begin(), history.evals.end(),
                   [](const auto& l, const auto& r) {
                     return std::pair(l.step, l.trainer) <
                            std::pair(r.step, r.trainer);
                   });
  std::stable_sort(history.epochs.begin(), history.epochs.end(),
                   [](const auto& l, const auto& r) {
                     return std::pair(l.epoch, l.trainer) <
                            std::pair(r.epoch, r.trainer);
                   });
}

}  // namespace detail

/// Generates the dataset into cfg.data_dir when asked to and it is not
/// already there, then scans it.
inline data::DatasetIndex ensure_dataset(const RunConfig& cfg) {
  namespace fs = std::filesystem;
  bool have_bundles = false;
  if (fs::exists(cfg.data_dir)) {
    std::error_code ec;
    for (const auto& e : fs::directory_iterator(cfg.data_dir, ec))
      if (e.path().extension() == ".lbds") {
        have_bundles = true;
        break;
      }
  }
  if (!have_bundles) {
    if (!cfg.generate)
      throw IoError("no dataset found under " + cfg.data_dir +
                    " and generation is disabled");
    synth::GeneratorSpec spec;
    spec.dims = cfg.dims;
    spec.noise_level = cfg.noise_level;
    spec.spec_seed = cfg.spec_seed;
    synth::SynthGenerator gen(spec);
    const auto records =
        synth::generate_dataset(gen, cfg.gen_n, cfg.sampling_seed);
    data::write_bundles(records, cfg.dims, cfg.samples_per_file,
                        cfg.data_dir);
  }
  return data::DatasetIndex::scan_dir(cfg.data_dir);
}

/// Executes a full experiment against an existing dataset index.
inline RunResult run_experiment(const RunConfig& cfg,
                                const data::DatasetIndex& index) {
  detail::validate_run_config(cfg);
  if (!(index.dims == cfg.dims))
    throw ConfigError("configured dims do not match the dataset on disk");

  const int k = cfg.mode == RunMode::kSingle ? 1 : cfg.trainers;
  const bool rounds_enabled = cfg.mode == RunMode::kLtfb && k >= 2;

  RunResult result;
  result.history.mode = run_mode_name(cfg.mode);
  result.history.n_trainers = k;

  const auto split = detail::split_dataset(
      index, k, cfg.validation_fraction, cfg.tournament_fraction, cfg.seed,
      /*need_tournament=*/k >= 2);

  // Autoencoder pre-training on the union of the training partitions, read
  // once outside the stores; the result is broadcast to every trainer and
  // stays frozen for the rest of the run.
  auto base_model = surrogate::make_cyclegan<float>(
      cfg.dims, cfg.arch, mix_seed({cfg.seed, 0xae0ULL}));
  {
    std::vector<data::SampleId> union_ids;
    for (const auto& part : split.train)
      union_ids.insert(union_ids.end(), part.begin(), part.end());
    std::sort(union_ids.begin(), union_ids.end());
    auto [ax, ay] = data::assemble_tensors(index, union_ids);
    (void)ax;
    Rng batch_rng(mix_seed({cfg.seed, 0xae1ULL}));
    const std::size_t rows = ay.rows();
    nn::Tensor<float> batch(
        {std::min(cfg.batch_size, rows), cfg.dims.output_dim()});
    for (std::uint64_t s = 0; s < cfg.ae_steps; ++s) {
      for (std::size_t r = 0; r < batch.rows(); ++r) {
        const std::size_t src = static_cast<std::size_t>(
            batch_rng.below(rows));
        std::copy_n(ay.data.begin() +
                        static_cast<std::ptrdiff_t>(src * ay.cols()),
                    ay.cols(),
                    batch.data.begin() +
                        static_cast<std::ptrdiff_t>(r * batch.cols()));
      }
      const double loss = surrogate::autoencoder_step(base_model, batch);
      result.history.pretrain.push_back({s + 1, loss});
    }
  }
  base_model.autoencoder_frozen = true;

  // Per-trainer models: shared frozen autoencoder, own generator and
  // discriminator init, optional learning-rate jitter.
  std::vector<std::unique_ptr<train::Trainer>> trainers;
  for (int t = 0; t < k; ++t) {
    surrogate::CycleGan<float> model = base_model;
    reinit_gan_nets(model, mix_seed({cfg.seed, 0x1417ULL,
                                     static_cast<std::uint64_t>(t)}));
    if (cfg.lr_jitter > 0) {
      Rng jitter_rng(mix_seed({cfg.seed, 0x717ULL,
                               static_cast<std::uint64_t>(t)}));
      const double factor =
          std::exp(cfg.lr_jitter * jitter_rng.uniform(-1.0, 1.0));
      for (auto* opt : {&model.fwd_opt, &model.inv_opt, &model.disc_opt})
        opt->hyper.lr = cfg.arch.adam.lr * factor;
    }

    train::TrainerConfig tc;
    tc.trainer_id = t;
    tc.n_shards = cfg.shards;
    tc.batch_size = cfg.batch_size;
    tc.store_mode = cfg.store_mode;
    tc.store_budget_bytes = cfg.store_budget_mb == 0
                                ? data::kUnlimitedBudget
                                : cfg.store_budget_mb * 1024 * 1024;
    tc.seed = mix_seed({cfg.seed, 0x57a7e1ULL,
                        static_cast<std::uint64_t>(t)});
    tc.numeric_abort_threshold = cfg.numeric_abort_threshold;
    tc.prefetch_depth = cfg.threads > 1 ? cfg.prefetch_depth : 0;
    tc.w_f = cfg.w_f;
    tc.w_i = cfg.w_i;
    tc.train_ids = split.train[static_cast<std::size_t>(t)];
    tc.tournament_ids = split.tournament[static_cast<std::size_t>(t)];
    trainers.push_back(
        std::make_unique<train::Trainer>(std::move(tc), index,
                                         std::move(model)));
  }

  auto [val_x, val_y] = data::assemble_tensors(index, split.validation);
  const bool have_validation = !split.validation.empty();

  auto evaluate_all = [&](std::uint64_t at_step) {
    if (!have_validation) return;
    for (auto& t : trainers) {
      const auto metric =
          surrogate::evaluate(t->model(), val_x, val_y, cfg.w_f, cfg.w_i);
      train::EvalRecord rec;
      rec.trainer = t->id();
      rec.step = at_step;
      rec.slice = "validation";
      rec.forward_mae = metric.forward_mae;
      rec.inverse_mae = metric.inverse_mae;
      rec.combined = metric.combined;
      t->history().evals.push_back(rec);
    }
  };

  evaluate_all(0);

  std::uint64_t done = 0;
  int round_index = 0;
  std::exception_ptr trainer_failure;
  std::mutex failure_mutex;
  while (done < cfg.step_budget) {
    const std::uint64_t chunk = std::min<std::uint64_t>(
        cfg.interval, cfg.step_budget - done);
    detail::parallel_for_indices(k, cfg.threads, [&](int t) {
      try {
        trainers[static_cast<std::size_t>(t)]->train_steps(chunk);
      } catch (...) {
        const std::lock_guard<std::mutex> lock(failure_mutex);
        if (!trainer_failure) trainer_failure = std::current_exception();
      }
    });
    if (trainer_failure) break;  // partial history is preserved below
    done += chunk;

    evaluate_all(done);
    // Rounds happen at full interval boundaries only; a budget that is not
    // a multiple of the interval ends with plain training.
    if (rounds_enabled && chunk == cfg.interval) {
      ++round_index;
      const Matching matching =
          pair_trainers(k, round_index, mix_seed({cfg.seed, 0x9a18ULL}));
      auto round = tournament_round(trainers, matching, round_index);
      result.history.rounds.push_back(std::move(round.round));
      result.history.trainer_rounds.insert(
          result.history.trainer_rounds.end(),
          round.trainer_records.begin(), round.trainer_records.end());
      result.history.transfers.insert(result.history.transfers.end(),
                                      round.transfers.begin(),
                                      round.transfers.end());
    }
  }

  for (auto& t : trainers) t->flush_epoch_record();
  detail::merge_segments(result.history, trainers);

  // Final selection: the run's model is the trainer with the best shared
  // validation metric, mirroring best-of-k selection for the baseline.
  if (have_validation) {
    double best = std::numeric_limits<double>::infinity();
    for (auto& t : trainers) {
      const auto metric =
          surrogate::evaluate(t->model(), val_x, val_y, cfg.w_f, cfg.w_i);
      if (metric.combined < best) {
        best = metric.combined;
        result.best_trainer = t->id();
        result.best_metric = metric;
      }
    }
  } else {
    result.best_trainer = 0;
  }
  result.best_model = trainers[static_cast<std::size_t>(
                                   std::max(result.best_trainer, 0))]
                          ->model();
  result.history.best_trainer = result.best_trainer;
  result.history.best_metric = result.best_metric;

  // Per-trainer summaries, all recomputable from the merged records.
  for (auto& t : trainers) {
    train::TrainerSummary s;
    s.trainer = t->id();
    s.steps = t->step();
    for (const auto& rec : t->history().steps)
      if (!rec.skipped) {
        s.final_d_loss = rec.d_loss;
        s.final_g_total = rec.g_total;
        s.final_g_fwd = rec.g_fwd;
        s.final_g_adv = rec.g_adv;
        s.final_g_cyc = rec.g_cyc;
      }
    for (const auto& rec : t->history().epochs)
      if (rec.epoch > 0 && !rec.partial) s.epochs_completed += 1;
    for (const auto& rec : t->history().evals)
      if (rec.slice == "validation") {
        s.final_val_forward_mae = rec.forward_mae;
        s.final_val_inverse_mae = rec.inverse_mae;
        s.final_val_combined = rec.combined;
      }
    for (const auto& rec : result.history.trainer_rounds)
      if (rec.trainer == t->id()) {
        s.rounds += 1;
        if (rec.kept_incoming) s.incoming_adopted += 1;
      }
    const auto& counters = t->store().counters();
    s.files_opened = counters.files_opened;
    s.bytes_read = counters.bytes_read;
    s.samples_shuffled = counters.samples_shuffled;
    s.skipped_steps = t->history().skipped_steps;
    s.is_best = t->id() == result.best_trainer;
    result.history.summaries.push_back(s);
  }

  if (trainer_failure) std::rethrow_exception(trainer_failure);
  return result;
}

inline RunResult run_ltfb(RunConfig cfg, const data::DatasetIndex& index) {
  cfg.mode = RunMode::kLtfb;
  return run_experiment(cfg, index);
}

inline RunResult run_k_independent(RunConfig cfg,
                                   const data::DatasetIndex& index) {
  cfg.mode = RunMode::kKIndependent;
  return run_experiment(cfg, index);
}

}  // namespace ltfb::tournament
