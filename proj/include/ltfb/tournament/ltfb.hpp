// Copyright (c) 2026 The ltfb authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <memory>
#include <vector>

#include "ltfb/core/hash.hpp"
#include "ltfb/core/rng.hpp"
#include "ltfb/train/trainer.hpp"

// The tournament layer: random dataset partitioning, random pairing, the
// generator-only exchange, and local tournament selection. Discriminators
// never leave their trainer; the transfer log records every blob that does.

namespace ltfb::tournament {

/// Disjoint random split of `ids` into k parts whose sizes differ by at
/// most one. Deterministic in `seed`.
inline std::vector<std::vector<data::SampleId>> partition_dataset(
    std::vector<data::SampleId> ids, int k, std::uint64_t seed) {
  if (k < 1) throw ContractError("partition_dataset: k must be >= 1");
  if (static_cast<std::size_t>(k) > ids.size())
    throw ContractError("partition_dataset: k exceeds the number of ids");
  Rng rng(mix_seed({seed, 0x9a27ULL}));
  rng.shuffle(ids);
  std::vector<std::vector<data::SampleId>> parts(
      static_cast<std::size_t>(k));
  const std::size_t base = ids.size() / static_cast<std::size_t>(k);
  const std::size_t extra = ids.size() % static_cast<std::size_t>(k);
  std::size_t begin = 0;
  for (std::size_t p = 0; p < parts.size(); ++p) {
    const std::size_t len = base + (p < extra ? 1 : 0);
    parts[p].assign(ids.begin() + static_cast<std::ptrdiff_t>(begin),
                    ids.begin() + static_cast<std::ptrdiff_t>(begin + len));
    begin += len;
  }
  return parts;
}

struct Matching {
  std::vector<std::array<int, 2>> pairs;
  int bye = -1;  // the trainer sitting this round out when k is odd
};

/// Uniform random perfect matching over k trainers (seeded by round). With
/// odd k one seeded trainer gets a bye; with k < 2 the matching is empty.
inline Matching pair_trainers(int k, int round, std::uint64_t seed) {
  Matching m;
  if (k < 2) return m;
  std::vector<int> order(static_cast<std::size_t>(k));
  for (int i = 0; i < k; ++i) order[static_cast<std::size_t>(i)] = i;
  Rng rng(mix_seed({seed, static_cast<std::uint64_t>(round), 0x9a12ULL}));
  rng.shuffle(order);
  if (k % 2 == 1) {
    m.bye = order.back();
    order.pop_back();
  }
  for (std::size_t i = 0; i + 1 < order.size(); i += 2)
    m.pairs.push_back({order[i], order[i + 1]});
  return m;
}

struct RoundResult {
  train::RoundRecord round;
  std::vector<train::TrainerRoundRecord> trainer_records;
  std::vector<train::TransferRecord> transfers;
};

namespace detail {

inline std::uint64_t blob_bytes(const nn::MlpParams<float>& p) {
  return p.param_count() * sizeof(float);
}

/// A candidate loses automatically on a non-finite metric; if both metrics
/// are non-finite the local model is kept. Ties keep local.
inline bool incoming_wins(double local, double incoming) {
  const bool local_ok = std::isfinite(local);
  const bool incoming_ok = std::isfinite(incoming);
  if (!incoming_ok) return false;
  if (!local_ok) return true;
  return incoming < local;
}

}  // namespace detail

/// One LTFB round over an already-paired set of trainers. For each pair the
/// two sides swap forward/inverse parameter blobs, each evaluates the local
/// and the incoming generator on its own tournament slice, and each keeps
/// the better one. All trainers must sit at the same step count.
inline RoundResult tournament_round(
    std::vector<std::unique_ptr<train::Trainer>>& trainers,
    const Matching& matching, int round_index) {
  for (const auto& t : trainers)
    if (t->step() != trainers.front()->step())
      throw ContractError("tournament_round: trainers are not step-synchronized");
  const std::uint64_t step = trainers.front()->step();

  RoundResult result;
  result.round.round = round_index;
  result.round.step = step;
  result.round.pairs = matching.pairs;
  result.round.bye = matching.bye;

  struct Exchange {
    int trainer;
    int peer;
    nn::MlpParams<float> fwd;
    nn::MlpParams<float> inv;
  };
  std::vector<Exchange> exchanges;

  for (const auto& pair : matching.pairs) {
    const int a = pair[0], b = pair[1];
    if (a == b) throw ContractError("tournament_round: trainer paired with itself");
    for (const auto [to, from] : {std::pair{a, b}, std::pair{b, a}}) {
      const auto& src = trainers[static_cast<std::size_t>(from)]->model();
      exchanges.push_back({to, from, src.fwd, src.inv});
      result.transfers.push_back({round_index, from, to, "fwd",
                                  detail::blob_bytes(src.fwd),
                                  hex64(src.fwd_hash())});
      result.transfers.push_back({round_index, from, to, "inv",
                                  detail::blob_bytes(src.inv),
                                  hex64(src.inv_hash())});
    }
  }

  // Evaluate and select only after every payload is captured, so both sides
  // of a pair judge the same pre-round generators.
  for (Exchange& ex : exchanges) {
    auto& trainer = *trainers[static_cast<std::size_t>(ex.trainer)];
    const auto& local_model = trainer.model();
    const auto local = trainer.eval_tournament(local_model);

    surrogate::CycleGan<float> candidate = local_model;
    candidate.fwd = ex.fwd;
    candidate.inv = ex.inv;
    const auto incoming = trainer.eval_tournament(candidate);

    const bool adopt = detail::incoming_wins(local.combined,
                                             incoming.combined);
    if (adopt) trainer.adopt_generators(ex.fwd, ex.inv);

    train::TrainerRoundRecord rec;
    rec.round = round_index;
    rec.step = step;
    rec.trainer = ex.trainer;
    rec.peer = ex.peer;
    rec.local_metric = local.combined;
    rec.incoming_metric = incoming.combined;
    rec.kept_incoming = adopt;
    rec.disc_hash = hex64(local_model.disc_hash());
    result.trainer_records.push_back(rec);
  }

  std::sort(result.trainer_records.begin(), result.trainer_records.end(),
            [](const auto& l, const auto& r) { return l.trainer < r.trainer; });
  return result;
}

}  // namespace ltfb::tournament
