// Copyright (c) 2026 The ltfb authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "ltfb/surrogate/train_ops.hpp"

// Run history records. Each trainer appends to its own segment while
// training; the runner merges the segments into one RunHistory in a
// canonical order so serialized output is identical however the trainers
// were scheduled. Wall-clock fields live in epoch records and the timings
// file only, never in the replay-compared summary.

namespace ltfb::train {

struct StepRecord {
  int trainer = 0;
  std::uint64_t step = 0;  // 1-based, value after the step completed
  std::uint32_t epoch = 0;
  double d_loss = 0;
  double g_total = 0;
  double g_fwd = 0;
  double g_adv = 0;
  double g_cyc = 0;
  bool skipped = false;
};

struct EvalRecord {
  int trainer = 0;
  std::uint64_t step = 0;
  std::string slice;  // "validation" or "tournament"
  double forward_mae = 0;
  double inverse_mae = 0;
  double combined = 0;
};

struct EpochRecord {
  int trainer = 0;
  std::uint32_t epoch = 0;  // 0 = preload phase
  std::uint64_t steps = 0;
  std::uint64_t files_opened = 0;
  std::uint64_t bytes_read = 0;
  std::uint64_t samples_shuffled = 0;
  double seconds = 0;
  bool partial = false;  // run ended mid-epoch
};

struct PretrainRecord {
  std::uint64_t step = 0;
  double loss = 0;
};

struct RoundRecord {
  int round = 0;
  std::uint64_t step = 0;
  std::vector<std::array<int, 2>> pairs;
  int bye = -1;
};

struct TrainerRoundRecord {
  int round = 0;
  std::uint64_t step = 0;
  int trainer = 0;
  int peer = -1;
  double local_metric = 0;
  double incoming_metric = 0;
  bool kept_incoming = false;
  std::string disc_hash;  // trainer's own discriminator blob, for the audit
};

struct TransferRecord {
  int round = 0;
  int from_trainer = 0;
  int to_trainer = 0;
  std::string payload;  // network name, e.g. "fwd" or "inv"
  std::uint64_t bytes = 0;
  std::string blob_hash;
};

/// One trainer's share of the history; merged by the runner.
struct HistorySegment {
  std::vector<StepRecord> steps;
  std::vector<EvalRecord> evals;
  std::vector<EpochRecord> epochs;
  std::uint64_t skipped_steps = 0;
};

struct TrainerSummary {
  int trainer = 0;
  std::uint64_t steps = 0;
  std::uint32_t epochs_completed = 0;
  double final_d_loss = 0;
  double final_g_total = 0;
  double final_g_fwd = 0;
  double final_g_adv = 0;
  double final_g_cyc = 0;
  double final_val_forward_mae = 0;
  double final_val_inverse_mae = 0;
  double final_val_combined = 0;
  std::uint64_t rounds = 0;
  std::uint64_t incoming_adopted = 0;
  std::uint64_t files_opened = 0;
  std::uint64_t bytes_read = 0;
  std::uint64_t samples_shuffled = 0;
  std::uint64_t skipped_steps = 0;
  bool is_best = false;
};

struct RunHistory {
  std::string config_hash;
  std::string mode;
  int n_trainers = 1;

  std::vector<PretrainRecord> pretrain;
  std::vector<StepRecord> steps;
  std::vector<EvalRecord> evals;
  std::vector<EpochRecord> epochs;
  std::vector<RoundRecord> rounds;
  std::vector<TrainerRoundRecord> trainer_rounds;
  std::vector<TransferRecord> transfers;

  int best_trainer = -1;
  surrogate::EvalMetric best_metric;
  std::vector<TrainerSummary> summaries;
};

}  // namespace ltfb::train
