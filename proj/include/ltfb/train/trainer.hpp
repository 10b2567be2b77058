// Copyright (c) 2026 The ltfb authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <chrono>
#include <cstdint>
#include <future>
#include <optional>
#include <utility>
#include <vector>

#include "ltfb/data/epoch_plan.hpp"
#include "ltfb/surrogate/train_ops.hpp"
#include "ltfb/train/allreduce.hpp"
#include "ltfb/train/history.hpp"

// One trainer: a set of shards (worker lanes) jointly training one model
// with intra-trainer data parallelism. Every shard holds its own replica;
// replicas stay bit-identical because each applies the same reduced
// gradient. The per-minibatch update order is fixed: discriminator step,
// then generator step. Shard gradients are reduced in shard order, so a
// run's arithmetic does not depend on scheduling.

namespace ltfb::train {

struct TrainerConfig {
  int trainer_id = 0;
  int n_shards = 4;
  std::size_t batch_size = 128;
  data::StoreMode store_mode = data::StoreMode::kPreload;
  std::size_t store_budget_bytes = data::kUnlimitedBudget;
  std::uint64_t seed = 0;              // drives the per-epoch shuffle plans
  int numeric_abort_threshold = 10;
  int prefetch_depth = 1;  // 0 = assemble synchronously
  double w_f = 1.0;
  double w_i = 1.0;
  std::vector<data::SampleId> train_ids;
  std::vector<data::SampleId> tournament_ids;
};

class Trainer {
 public:
  Trainer(TrainerConfig cfg, const data::DatasetIndex& index,
          surrogate::CycleGan<float> model)
      : cfg_(std::move(cfg)),
        store_(&index, cfg_.train_ids, cfg_.store_mode, cfg_.n_shards,
               cfg_.store_budget_bytes) {
    if (cfg_.n_shards < 1)
      throw ContractError("Trainer: n_shards must be >= 1");
    if (cfg_.batch_size < 1)
      throw ContractError("Trainer: batch_size must be >= 1");
    if (!model.autoencoder_frozen)
      throw ContractError("Trainer: model autoencoder must be frozen");
    replicas_.assign(static_cast<std::size_t>(cfg_.n_shards),
                     std::move(model));
    double preload_seconds = 0;
    if (cfg_.store_mode == data::StoreMode::kPreload) {
      const auto t0 = Clock::now();
      store_.preload();
      preload_seconds =
          std::chrono::duration<double>(Clock::now() - t0).count();
    }
    // Epoch 0 covers everything before training (the preload phase), so the
    // per-epoch records in the log always sum to the store totals.
    const CounterSnapshot phase0 = snapshot_counters();
    EpochRecord rec;
    rec.trainer = cfg_.trainer_id;
    rec.epoch = 0;
    rec.files_opened = phase0.files_opened;
    rec.bytes_read = phase0.bytes_read;
    rec.samples_shuffled = phase0.samples_shuffled;
    rec.seconds = preload_seconds;
    segment_.epochs.push_back(rec);
    if (!cfg_.tournament_ids.empty()) {
      auto [x, y] = data::assemble_tensors(index, cfg_.tournament_ids);
      tournament_x_ = std::move(x);
      tournament_y_ = std::move(y);
    }
  }

  Trainer(const Trainer&) = delete;
  Trainer& operator=(const Trainer&) = delete;

  int id() const { return cfg_.trainer_id; }
  std::uint64_t step() const { return global_step_; }
  const TrainerConfig& config() const { return cfg_; }
  const surrogate::CycleGan<float>& model() const { return replicas_.front(); }
  data::DataStore& store() { return store_; }
  const data::DataStore& store() const { return store_; }
  HistorySegment& history() { return segment_; }
  const HistorySegment& history() const { return segment_; }

  std::vector<std::uint64_t> replica_hashes() const {
    std::vector<std::uint64_t> hashes;
    for (const auto& r : replicas_) hashes.push_back(r.model_hash());
    return hashes;
  }

  /// Runs n minibatch steps. Numeric failures in a sub-step skip that
  /// step's updates, log the step as skipped, and abort the run past the
  /// configured threshold.
  void train_steps(std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) run_one_step();
  }

  surrogate::EvalMetric eval_tournament(
      const surrogate::CycleGan<float>& candidate) const {
    if (tournament_x_.empty())
      throw ContractError("Trainer: no tournament slice configured");
    return surrogate::evaluate(candidate, tournament_x_, tournament_y_,
                               cfg_.w_f, cfg_.w_i);
  }

  /// Installs incoming generator-side parameters on every replica. The
  /// adopted networks continue with zeroed Adam moments; the step counter t
  /// is preserved so the bias-correction schedule is not restarted.
  void adopt_generators(const nn::MlpParams<float>& fwd,
                        const nn::MlpParams<float>& inv) {
    for (auto& replica : replicas_) {
      if (!replica.fwd.same_shape(fwd) || !replica.inv.same_shape(inv))
        throw ContractError("adopt_generators: incompatible parameter shapes");
      replica.fwd = fwd;
      replica.inv = inv;
      replica.fwd_opt.reset_moments();
      replica.inv_opt.reset_moments();
    }
  }

  /// Emits the record for the in-flight epoch (run teardown).
  void flush_epoch_record() {
    if (plan_ && step_in_epoch_ > 0)
      emit_epoch_record(step_in_epoch_ < plan_->n_steps());
    pending_ = std::nullopt;
  }

 private:
  using Clock = std::chrono::steady_clock;

  void start_epoch() {
    epoch_ += 1;
    store_.begin_epoch(epoch_);
    plan_ = data::plan_epoch(store_, epoch_, cfg_.seed, cfg_.batch_size);
    step_in_epoch_ = 0;
    epoch_seconds_ = 0;
    epoch_steps_ = 0;
    epoch_base_ = snapshot_counters();
    pending_ = std::nullopt;
  }

  struct CounterSnapshot {
    std::uint64_t files_opened, bytes_read, samples_shuffled;
  };

  CounterSnapshot snapshot_counters() const {
    const auto& c = store_.counters();
    return {c.files_opened, c.bytes_read, c.samples_shuffled};
  }

  void emit_epoch_record(bool partial = false) {
    const CounterSnapshot now = snapshot_counters();
    EpochRecord rec;
    rec.trainer = cfg_.trainer_id;
    rec.epoch = epoch_;
    rec.steps = epoch_steps_;
    rec.partial = partial;
    rec.files_opened = now.files_opened - epoch_base_.files_opened;
    rec.bytes_read = now.bytes_read - epoch_base_.bytes_read;
    rec.samples_shuffled = now.samples_shuffled - epoch_base_.samples_shuffled;
    rec.seconds = epoch_seconds_;
    segment_.epochs.push_back(rec);
  }

  data::Minibatch next_minibatch() {
    data::Minibatch mb;
    if (pending_.has_value()) {
      mb = pending_->get();
      pending_ = std::nullopt;
    } else {
      mb = data::shuffle_step(store_, *plan_, step_in_epoch_);
    }
    if (cfg_.prefetch_depth > 0 && step_in_epoch_ + 1 < plan_->n_steps()) {
      pending_ = std::async(std::launch::async,
                            [this, next = step_in_epoch_ + 1]() {
                              return data::shuffle_step(store_, *plan_, next);
                            });
    }
    return mb;
  }

  void run_one_step() {
    if (!plan_ || step_in_epoch_ >= plan_->n_steps()) {
      if (plan_) emit_epoch_record();
      start_epoch();
    }

    const auto t0 = Clock::now();
    data::Minibatch mb = next_minibatch();

    std::vector<std::size_t> rows;
    for (const auto& shard : mb.shards) rows.push_back(shard.x.rows());

    StepRecord rec;
    rec.trainer = cfg_.trainer_id;
    rec.epoch = epoch_;

    bool skipped = false;

    // Discriminator update.
    try {
      std::vector<nn::MlpParams<float>> grads(replicas_.size());
      std::vector<double> losses(replicas_.size(), 0.0);
      for (std::size_t s = 0; s < replicas_.size(); ++s) {
        if (rows[s] == 0) {
          grads[s] = nn::MlpParams<float>::zeros_like(replicas_[s].disc_spec);
          continue;
        }
        losses[s] = surrogate::discriminator_backward(
            replicas_[s], mb.shards[s].x, mb.shards[s].y, &grads[s]);
      }
      const double d_loss = weighted_mean(losses, rows);
      if (!std::isfinite(d_loss))
        throw NumericError("discriminator loss is not finite");
      auto avg = allreduce_gradients(grads, rows);
      for (auto& replica : replicas_)
        nn::adam_step(replica.disc, avg, replica.disc_opt);
      rec.d_loss = d_loss;
    } catch (const NumericError&) {
      skipped = true;
    }

    // Generator update (runs against the just-updated discriminator).
    if (!skipped) {
      try {
        std::vector<nn::MlpParams<float>> fwd_grads(replicas_.size());
        std::vector<nn::MlpParams<float>> inv_grads(replicas_.size());
        std::vector<double> total(replicas_.size(), 0.0);
        std::vector<double> fwd_l(replicas_.size(), 0.0);
        std::vector<double> adv_l(replicas_.size(), 0.0);
        std::vector<double> cyc_l(replicas_.size(), 0.0);
        for (std::size_t s = 0; s < replicas_.size(); ++s) {
          if (rows[s] == 0) {
            fwd_grads[s] =
                nn::MlpParams<float>::zeros_like(replicas_[s].fwd_spec);
            inv_grads[s] =
                nn::MlpParams<float>::zeros_like(replicas_[s].inv_spec);
            continue;
          }
          const auto losses = surrogate::generator_backward(
              replicas_[s], mb.shards[s].x, mb.shards[s].y, &fwd_grads[s],
              &inv_grads[s]);
          total[s] = losses.total;
          fwd_l[s] = losses.fwd;
          adv_l[s] = losses.adv;
          cyc_l[s] = losses.cyc;
        }
        const double g_total = weighted_mean(total, rows);
        if (!std::isfinite(g_total))
          throw NumericError("generator loss is not finite");
        auto avg_fwd = allreduce_gradients(fwd_grads, rows);
        auto avg_inv = allreduce_gradients(inv_grads, rows);
        for (auto& replica : replicas_) {
          nn::adam_step(replica.fwd, avg_fwd, replica.fwd_opt);
          nn::adam_step(replica.inv, avg_inv, replica.inv_opt);
        }
        rec.g_total = g_total;
        rec.g_fwd = weighted_mean(fwd_l, rows);
        rec.g_adv = weighted_mean(adv_l, rows);
        rec.g_cyc = weighted_mean(cyc_l, rows);
      } catch (const NumericError&) {
        skipped = true;
      }
    }

    epoch_seconds_ +=
        std::chrono::duration<double>(Clock::now() - t0).count();
    epoch_steps_ += 1;
    global_step_ += 1;
    step_in_epoch_ += 1;

    rec.step = global_step_;
    rec.skipped = skipped;
    segment_.steps.push_back(rec);
    if (skipped) {
      segment_.skipped_steps += 1;
      if (segment_.skipped_steps >
          static_cast<std::uint64_t>(cfg_.numeric_abort_threshold))
        throw NumericError("trainer " + std::to_string(cfg_.trainer_id) +
                           " exceeded the numeric skip threshold");
    }
  }

  TrainerConfig cfg_;
  data::DataStore store_;
  std::vector<surrogate::CycleGan<float>> replicas_;

  std::optional<data::EpochPlan> plan_;
  std::optional<std::future<data::Minibatch>> pending_;
  std::uint32_t epoch_ = 0;
  std::size_t step_in_epoch_ = 0;
  std::uint64_t global_step_ = 0;
  std::uint64_t epoch_steps_ = 0;
  double epoch_seconds_ = 0;
  CounterSnapshot epoch_base_{0, 0, 0};

  HistorySegment segment_;
  nn::Tensor<float> tournament_x_;
  nn::Tensor<float> tournament_y_;
};

}  // namespace ltfb::train
