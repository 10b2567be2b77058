// Copyright (c) 2026 The ltfb authors
// SPDX-License-Identifier: Apache-2.0
//
// Acceptance suite. Each test checks one acceptance criterion end to end
// and prints one "[ACCEPTANCE] criterion N (...): PASS|FAIL" line. Runs as
// a single process so datasets and training runs are shared across
// criteria. All tolerances are fixed here, in code.

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <sstream>

#include "ltfb/bench/config.hpp"
#include "ltfb/bench/datastore_bench.hpp"
#include "ltfb/bench/output.hpp"
#include "ltfb/synth/generator.hpp"
#include "ltfb/tournament/runner.hpp"
#include "test_util.hpp"

using namespace ltfb;
using namespace ltfb_test;

namespace {

void report(int criterion, const std::string& name, bool pass) {
  std::printf("[ACCEPTANCE] criterion %d (%s): %s\n", criterion, name.c_str(),
              pass ? "PASS" : "FAIL");
  std::fflush(stdout);
}

#define REPORT_AND_CHECK(n, name)            \
  do {                                       \
    const bool ok_ = !HasFailure();          \
    report(n, name, ok_);                    \
    ASSERT_TRUE(ok_);                        \
  } while (0)

surrogate::ModalityDims tiny_dims() {
  surrogate::ModalityDims d;
  d.image_views = 1;
  d.image_channels = 1;
  d.image_h = 4;
  d.image_w = 4;
  return d;
}

surrogate::ModalityDims arena_dims() {
  surrogate::ModalityDims d;
  d.image_views = 3;
  d.image_channels = 4;
  d.image_h = 8;
  d.image_w = 8;
  return d;  // output_dim = 783
}

/// Process-wide shared datasets and cached training runs.
struct Shared {
  TempDir root{"ltfb_acceptance"};
  std::map<std::string, data::DatasetIndex> datasets;
  std::map<std::string, tournament::RunResult> runs;

  static Shared& get() {
    static Shared inst;
    return inst;
  }

  const data::DatasetIndex& dataset(const std::string& name,
                                    const surrogate::ModalityDims& dims,
                                    std::uint64_t n, std::uint32_t per_file,
                                    double noise, std::uint64_t spec_seed,
                                    std::uint64_t sampling_seed) {
    auto it = datasets.find(name);
    if (it != datasets.end()) return it->second;
    synth::GeneratorSpec spec;
    spec.dims = dims;
    spec.noise_level = noise;
    spec.spec_seed = spec_seed;
    synth::SynthGenerator gen(spec);
    const auto records = synth::generate_dataset(gen, n, sampling_seed);
    const auto dir = root.path() / name;
    const auto paths = data::write_bundles(records, dims, per_file, dir);
    return datasets.emplace(name, data::DatasetIndex::scan(paths))
        .first->second;
  }

  const data::DatasetIndex& arena_dataset() {
    return dataset("arena", arena_dims(), 16000, 500, 0.0, 21, 22);
  }

  /// The shared competition regime for criteria 7, 8 and 10: equal
  /// iteration budgets and paired seeds across arms.
  tournament::RunConfig arena_config(tournament::RunMode mode, int k,
                                     std::uint64_t seed) {
    tournament::RunConfig cfg;
    cfg.data_dir = (root.path() / "arena").string();
    cfg.dims = arena_dims();
    cfg.mode = mode;
    cfg.trainers = k;
    cfg.shards = 1;
    cfg.batch_size = 128;
    cfg.interval = 50;
    cfg.step_budget = 500;
    cfg.ae_steps = 250;
    cfg.seed = seed;
    cfg.threads = 1;
    return cfg;
  }

  const tournament::RunResult& arena_run(tournament::RunMode mode, int k,
                                         std::uint64_t seed) {
    const std::string key = tournament::run_mode_name(mode) + "/" +
                            std::to_string(k) + "/" + std::to_string(seed);
    auto it = runs.find(key);
    if (it != runs.end()) return it->second;
    const auto& index = arena_dataset();
    auto result = tournament::run_experiment(arena_config(mode, k, seed),
                                             index);
    return runs.emplace(key, std::move(result)).first->second;
  }
};

}  // namespace

// Criterion 1: for >= 20 random small networks every backprop gradient
// matches central finite differences to rel. err <= 1e-5 in wide precision.
TEST(Acceptance, C01_GradientOracle) {
  Rng rng(20260801);
  const std::vector<nn::Activation> pool = {{nn::Act::kTanh},
                                            {nn::Act::kSigmoid},
                                            {nn::Act::kRelu},
                                            {nn::Act::kLeakyRelu, 0.2},
                                            {nn::Act::kIdentity}};
  double worst = 0;
  int networks = 0;
  std::size_t checked = 0, skipped = 0;
  for (int trial = 0; trial < 20; ++trial) {
    nn::MlpSpec spec;
    spec.layer_widths.push_back(1 + rng.below(8));
    const std::size_t n_layers = 1 + rng.below(3);
    for (std::size_t l = 0; l < n_layers; ++l) {
      spec.layer_widths.push_back(1 + rng.below(32));
      spec.activations.push_back(pool[rng.below(pool.size())]);
    }
    spec.init_seed = 555000 + static_cast<std::uint64_t>(trial);
    auto params = nn::init_params<double>(spec);

    Rng data_rng(777000 + static_cast<std::uint64_t>(trial));
    // Jitter the zero-initialized biases into general position: with a
    // dead relu layer upstream, exact zero biases park later units exactly
    // on their kink, where a finite difference is not a valid oracle.
    for (auto& b : params.biases)
      for (auto& v : b.data) v = data_rng.uniform(-0.05, 0.05);
    nn::Tensor<double> batch({1 + data_rng.below(5), spec.in_dim()});
    for (auto& v : batch.data) v = data_rng.uniform(-1, 1);
    nn::Tensor<double> target({batch.rows(), spec.out_dim()});
    for (auto& v : target.data) v = data_rng.uniform(-1, 1);

    auto loss_of = [&]() {
      return nn::mae_value(nn::mlp_apply(spec, params, batch), target);
    };
    // Central differences are only a valid oracle at smooth points. A
    // parameter whose perturbation crosses a relu or |.| kink is detected
    // by comparing the h and h/2 estimates (they agree to O(h^2) when the
    // crossed region is smooth) and excluded; the excluded fraction must
    // stay negligible.
    auto fd_smooth = [&](double* x, double& fd_out) {
      const double fd_h = central_diff(loss_of, x, 1e-5);
      const double fd_h2 = central_diff(loss_of, x, 5e-6);
      fd_out = fd_h2;
      return std::abs(fd_h - fd_h2) <= 1e-6 * std::max(1.0, std::abs(fd_h));
    };
    const auto tape = nn::mlp_forward(spec, params, batch);
    const auto mae = nn::mae_loss(tape.output(), target);
    const auto back = nn::mlp_backward(spec, params, tape, mae.grad);
    // Denominator floor 1e-4: gradients below it are compared absolutely
    // at 1e-9 resolution, well above the ~1e-11 cancellation noise of a
    // central difference in double at h=1e-5.
    auto check_param = [&](double* x, double grad) {
      double fd = 0;
      if (!fd_smooth(x, fd)) {
        ++skipped;
        return;
      }
      ++checked;
      worst = std::max(worst, rel_err(grad, fd, 1e-4));
    };
    for (std::size_t l = 0; l < spec.n_layers(); ++l) {
      for (std::size_t i = 0; i < params.weights[l].size(); ++i)
        check_param(&params.weights[l][i], back.param_grads.weights[l][i]);
      for (std::size_t i = 0; i < params.biases[l].size(); ++i)
        check_param(&params.biases[l][i], back.param_grads.biases[l][i]);
    }
    ++networks;
  }
  std::printf(
      "  gradient oracle: %d networks, %zu gradients checked, %zu at "
      "non-smooth points, worst rel err %.3g\n",
      networks, checked, skipped, worst);
  EXPECT_GE(networks, 20);
  EXPECT_LE(worst, 1e-5);
  EXPECT_LE(static_cast<double>(skipped),
            0.01 * static_cast<double>(checked + skipped));
  REPORT_AND_CHECK(1, "gradient-oracle");
}

// Criterion 2: 50 training steps with n_shards in {1,2,4} at fixed total
// batch size agree per step within 1e-4 relative, at desk dims.
TEST(Acceptance, C02_ShardEquivalence) {
  auto& shared = Shared::get();
  const auto& index = shared.dataset("desk", surrogate::ModalityDims{}, 2000,
                                     250, 0.0, 11, 12);
  auto run_with_shards = [&](int shards) {
    tournament::RunConfig cfg;
    cfg.data_dir = (shared.root.path() / "desk").string();
    cfg.dims = surrogate::ModalityDims{};
    cfg.mode = tournament::RunMode::kSingle;
    cfg.shards = shards;
    cfg.batch_size = 128;
    cfg.interval = 50;
    cfg.step_budget = 50;
    cfg.ae_steps = 30;
    cfg.seed = 77;
    return tournament::run_experiment(cfg, index);
  };
  const auto base = run_with_shards(1);
  double worst = 0;
  for (const int shards : {2, 4}) {
    const auto other = run_with_shards(shards);
    ASSERT_EQ(base.history.steps.size(), other.history.steps.size());
    for (std::size_t i = 0; i < base.history.steps.size(); ++i) {
      worst = std::max(worst, rel_err(base.history.steps[i].d_loss,
                                      other.history.steps[i].d_loss));
      worst = std::max(worst, rel_err(base.history.steps[i].g_total,
                                      other.history.steps[i].g_total));
    }
  }
  std::printf("  shard equivalence: worst per-step rel diff %.3g\n", worst);
  EXPECT_LE(worst, 1e-4);
  REPORT_AND_CHECK(2, "shard-equivalence");
}

// Criterion 3: over 5 seeds x 3 epochs on a 1,000-sample partition, each
// epoch delivers the partition exactly once; permutations differ between
// epochs.
TEST(Acceptance, C03_ExactlyOnceShuffle) {
  auto& shared = Shared::get();
  const auto& index =
      shared.dataset("shuffle1k", tiny_dims(), 1000, 125, 0.0, 31, 32);
  std::vector<data::SampleId> ids(index.total);
  for (std::size_t i = 0; i < ids.size(); ++i)
    ids[i] = static_cast<data::SampleId>(i);
  const std::multiset<data::SampleId> expected(ids.begin(), ids.end());

  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    data::DataStore store(&index, ids, data::StoreMode::kPreload, 2);
    store.preload();
    std::vector<std::vector<data::SampleId>> perms;
    for (std::uint32_t epoch = 1; epoch <= 3; ++epoch) {
      const auto plan = data::plan_epoch(store, epoch, seed, 128);
      std::vector<data::SampleId> delivered;
      for (std::size_t s = 0; s < plan.n_steps(); ++s) {
        const auto mb = data::shuffle_step(store, plan, s);
        for (const auto& shard : mb.shards)
          delivered.insert(delivered.end(), shard.ids.begin(),
                           shard.ids.end());
      }
      EXPECT_EQ(std::multiset<data::SampleId>(delivered.begin(),
                                              delivered.end()),
                expected)
          << "seed " << seed << " epoch " << epoch;
      perms.push_back(plan.permutation);
    }
    EXPECT_NE(perms[0], perms[1]) << "seed " << seed;
    EXPECT_NE(perms[1], perms[2]) << "seed " << seed;
  }
  REPORT_AND_CHECK(3, "exactly-once-shuffle");
}

// Criterion 4: dynamic mode opens zero files from epoch 2 on; preload opens
// each file exactly once; mode none opens files every epoch; dynamic and
// preload minibatch streams are bit-identical from epoch 2 under a shared
// plan seed.
TEST(Acceptance, C04_SteadyStateZeroIo) {
  auto& shared = Shared::get();
  const auto& index =
      shared.dataset("zeroio", tiny_dims(), 400, 50, 0.0, 41, 42);
  const auto result = bench::run_datastore_bench(
      index,
      {data::StoreMode::kNone, data::StoreMode::kDynamic,
       data::StoreMode::kPreload},
      32, 3, 2, 97);

  const auto& none = result.mode("none");
  const auto& dynamic = result.mode("dynamic");
  const auto& preload = result.mode("preload");

  EXPECT_GT(dynamic.epochs[0].files_opened, 0u);
  EXPECT_EQ(dynamic.epochs[1].files_opened, 0u);
  EXPECT_EQ(dynamic.epochs[2].files_opened, 0u);

  for (std::uint32_t opens : preload.file_open_counts)
    EXPECT_EQ(opens, 1u);
  EXPECT_EQ(preload.epochs[1].files_opened, 0u);
  EXPECT_EQ(preload.epochs[2].files_opened, 0u);

  for (const auto& epoch : none.epochs)
    EXPECT_EQ(epoch.files_opened, 400u);

  EXPECT_EQ(dynamic.epochs[1].stream_hash, preload.epochs[1].stream_hash);
  EXPECT_EQ(dynamic.epochs[2].stream_hash, preload.epochs[2].stream_hash);
  REPORT_AND_CHECK(4, "steady-state-zero-io");
}

// Criterion 5: steady-state epoch time ordering preload ~ dynamic < none,
// with none at least 1.5x slower, on >= 100 bundle files. The store modes
// must also sit within 1.5x of each other.
TEST(Acceptance, C05_DatastoreSpeedOrdering) {
  auto& shared = Shared::get();
  const auto& index =
      shared.dataset("io100", tiny_dims(), 12800, 128, 0.0, 51, 52);
  ASSERT_GE(index.paths.size(), 100u);
  const auto result = bench::run_datastore_bench(
      index,
      {data::StoreMode::kNone, data::StoreMode::kDynamic,
       data::StoreMode::kPreload},
      128, 4, 1, 53);

  const double none_s = result.mode("none").steady_seconds();
  const double dyn_s = result.mode("dynamic").steady_seconds();
  const double pre_s = result.mode("preload").steady_seconds();
  std::printf("  steady epoch seconds: none %.6f dynamic %.6f preload %.6f\n",
              none_s, dyn_s, pre_s);
  EXPECT_GE(none_s, 1.5 * dyn_s);
  EXPECT_GE(none_s, 1.5 * pre_s);
  const double store_ratio =
      std::max(dyn_s, pre_s) / std::max(1e-12, std::min(dyn_s, pre_s));
  EXPECT_LE(store_ratio, 1.5);
  REPORT_AND_CHECK(5, "datastore-speed-ordering");
}

// Criterion 6: in a 4-trainer, 10-round run every tournament event keeps
// the minimum-metric generator, pairings are valid matchings, and no
// discriminator bytes cross trainers.
TEST(Acceptance, C06_TournamentCorrectness) {
  auto& shared = Shared::get();
  const auto& index =
      shared.dataset("tour", tiny_dims(), 2400, 300, 0.0, 61, 62);
  tournament::RunConfig cfg;
  cfg.data_dir = (shared.root.path() / "tour").string();
  cfg.dims = tiny_dims();
  cfg.arch.enc_hidden = {16};
  cfg.arch.dec_hidden = {16};
  cfg.arch.fwd_hidden = {16};
  cfg.arch.inv_hidden = {16};
  cfg.arch.disc_hidden = {16};
  cfg.mode = tournament::RunMode::kLtfb;
  cfg.trainers = 4;
  cfg.batch_size = 32;
  cfg.interval = 5;
  cfg.step_budget = 50;
  cfg.ae_steps = 20;
  cfg.seed = 63;
  const auto result = tournament::run_experiment(cfg, index);

  EXPECT_EQ(result.history.rounds.size(), 10u);
  for (const auto& round : result.history.rounds) {
    std::set<int> seen;
    for (const auto& p : round.pairs) {
      EXPECT_NE(p[0], p[1]);
      EXPECT_TRUE(seen.insert(p[0]).second);
      EXPECT_TRUE(seen.insert(p[1]).second);
      EXPECT_GE(std::min(p[0], p[1]), 0);
      EXPECT_LT(std::max(p[0], p[1]), 4);
    }
    EXPECT_EQ(seen.size(), 4u);  // even k: everyone plays
  }
  EXPECT_EQ(result.history.trainer_rounds.size(), 40u);
  for (const auto& rec : result.history.trainer_rounds) {
    const double winner = rec.kept_incoming ? rec.incoming_metric
                                            : rec.local_metric;
    EXPECT_EQ(winner, std::min(rec.local_metric, rec.incoming_metric));
  }
  std::set<std::string> disc_hashes;
  for (const auto& rec : result.history.trainer_rounds)
    disc_hashes.insert(rec.disc_hash);
  EXPECT_EQ(result.history.transfers.size(), 2u * 2u * 2u * 10u);
  for (const auto& transfer : result.history.transfers) {
    EXPECT_TRUE(transfer.payload == "fwd" || transfer.payload == "inv");
    EXPECT_EQ(disc_hashes.count(transfer.blob_hash), 0u);
  }
  REPORT_AND_CHECK(6, "tournament-correctness");
}

// Criterion 7: on a 16,000-sample dataset with equal budgets and paired
// seeds, LTFB beats the best of k independent trainers in >= 4 of 5 seed
// pairs; the median gap is <= 0 and does not shrink from k=2 to k=4.
TEST(Acceptance, C07_LtfbVsKIndependent) {
  auto& shared = Shared::get();
  const std::vector<std::uint64_t> seeds{101, 102, 103, 104, 105};

  auto gaps_for = [&](int k) {
    std::vector<double> gaps;
    for (const std::uint64_t seed : seeds) {
      const auto& ltfb =
          shared.arena_run(tournament::RunMode::kLtfb, k, seed);
      const auto& kind =
          shared.arena_run(tournament::RunMode::kKIndependent, k, seed);
      gaps.push_back(ltfb.best_metric.combined - kind.best_metric.combined);
      std::printf("  k=%d seed %llu: ltfb %.5f k-independent %.5f\n", k,
                  static_cast<unsigned long long>(seed),
                  ltfb.best_metric.combined, kind.best_metric.combined);
      std::fflush(stdout);
    }
    return gaps;
  };

  const auto gaps4 = gaps_for(4);
  int wins4 = 0;
  for (double gap : gaps4)
    if (gap <= 0) ++wins4;
  const auto gaps2 = gaps_for(2);

  auto median = [](std::vector<double> values) {
    std::sort(values.begin(), values.end());
    return values[values.size() / 2];
  };
  const double median4 = median(gaps4);
  const double median2 = median(gaps2);
  std::printf("  wins at k=4: %d/5, median gap k=4 %.5f, k=2 %.5f\n", wins4,
              median4, median2);
  EXPECT_GE(wins4, 4);
  EXPECT_LE(median4, 0.0);
  EXPECT_LE(median4, median2);
  REPORT_AND_CHECK(7, "ltfb-vs-k-independent");
}

// Criterion 8: at a fixed per-trainer step budget, the final validation
// metric for k in {1,2,4} is non-increasing in k within a 5% band.
TEST(Acceptance, C08_QualityVsTrainerCount) {
  auto& shared = Shared::get();
  const std::vector<std::uint64_t> seeds{101, 102, 103};

  auto median_metric = [&](int k) {
    std::vector<double> values;
    for (const std::uint64_t seed : seeds)
      values.push_back(shared.arena_run(tournament::RunMode::kLtfb, k, seed)
                           .best_metric.combined);
    std::sort(values.begin(), values.end());
    return values[values.size() / 2];
  };
  const double m1 = median_metric(1);
  const double m2 = median_metric(2);
  const double m4 = median_metric(4);
  std::printf("  median validation combined: k=1 %.5f k=2 %.5f k=4 %.5f\n",
              m1, m2, m4);
  EXPECT_LE(m2, 1.05 * m1);
  EXPECT_LE(m4, 1.05 * m2);
  REPORT_AND_CHECK(8, "quality-vs-trainer-count");
}

// Criterion 9: a run re-executed single-threaded from its config reproduces
// its summary CSV byte for byte.
TEST(Acceptance, C09_DeterminismReplay) {
  auto& shared = Shared::get();
  shared.dataset("replay", tiny_dims(), 800, 100, 0.0, 91, 92);
  tournament::RunConfig cfg;
  cfg.data_dir = (shared.root.path() / "replay").string();
  cfg.dims = tiny_dims();
  cfg.arch.enc_hidden = {16};
  cfg.arch.dec_hidden = {16};
  cfg.arch.fwd_hidden = {16};
  cfg.arch.inv_hidden = {16};
  cfg.arch.disc_hidden = {16};
  cfg.mode = tournament::RunMode::kLtfb;
  cfg.trainers = 2;
  cfg.batch_size = 32;
  cfg.interval = 10;
  cfg.step_budget = 40;
  cfg.ae_steps = 15;
  cfg.seed = 93;

  const auto& index = Shared::get().datasets.at("replay");
  cfg.threads = 2;
  auto threaded = tournament::run_experiment(cfg, index);
  threaded.history.config_hash = bench::config_hash(cfg);
  cfg.threads = 1;
  auto replay = tournament::run_experiment(cfg, index);
  replay.history.config_hash = bench::config_hash(cfg);

  EXPECT_EQ(bench::summary_csv(threaded.history),
            bench::summary_csv(replay.history));

  // The event logs must also agree once wall-clock fields are removed.
  auto strip_seconds = [](const train::RunHistory& history) {
    std::istringstream is(bench::events_jsonl(history));
    std::string line, out;
    while (std::getline(is, line)) {
      auto j = bench::json::parse(line);
      j.erase("seconds");
      out += j.dump();
      out += '\n';
    }
    return out;
  };
  EXPECT_EQ(strip_seconds(threaded.history), strip_seconds(replay.history));
  REPORT_AND_CHECK(9, "determinism-replay");
}

// Criterion 10: per-trainer steady-state epoch time at k=4 is at most 0.3x
// the k=1 time on the same total dataset (ideal 0.25).
TEST(Acceptance, C10_ThroughputScalingProxy) {
  auto& shared = Shared::get();
  shared.arena_dataset();

  auto steady_epoch_seconds = [&](int k, std::uint64_t budget) {
    auto cfg = shared.arena_config(tournament::RunMode::kLtfb, k, 110);
    cfg.interval = budget + 1;  // no tournament rounds: pure epoch timing
    cfg.step_budget = budget;
    cfg.ae_steps = 20;
    const auto result =
        tournament::run_experiment(cfg, Shared::get().datasets.at("arena"));
    // Median of the complete steady-state epochs across all trainers.
    std::vector<double> seconds;
    for (const auto& rec : result.history.epochs)
      if (rec.epoch >= 2 && !rec.partial && rec.steps > 0)
        seconds.push_back(rec.seconds);
    std::sort(seconds.begin(), seconds.end());
    EXPECT_FALSE(seconds.empty());
    return seconds.empty() ? 0.0 : seconds[seconds.size() / 2];
  };

  const double t1 = steady_epoch_seconds(1, 360);
  const double t4 = steady_epoch_seconds(4, 120);
  std::printf("  per-trainer steady epoch seconds: k=1 %.4f k=4 %.4f "
              "(ratio %.3f)\n",
              t1, t4, t4 / t1);
  EXPECT_GT(t1, 0.0);
  EXPECT_LE(t4, 0.3 * t1);
  REPORT_AND_CHECK(10, "throughput-scaling-proxy");
}
