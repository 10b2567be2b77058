// Copyright (c) 2026 The ltfb authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <cstdint>
#include <utility>
#include <vector>

#include "ltfb/core/rng.hpp"
#include "ltfb/data/store.hpp"
#include "ltfb/nn/tensor.hpp"

// Per-epoch shuffle plans: a seeded permutation of the partition, the
// derived minibatch slices, and the owner-to-consumer transfer lists that
// realize each minibatch from the sharded caches.

namespace ltfb::data {

struct TransferItem {
  SampleId id;
  int owner;
  int consumer;
};

struct EpochPlan {
  std::uint32_t epoch = 0;
  std::uint64_t seed = 0;
  std::size_t batch_size = 0;
  std::vector<SampleId> permutation;
  std::vector<std::pair<std::size_t, std::size_t>> slices;  // [begin, end)
  // One list per step; empty while ownership is still being established
  // (dynamic mode, epoch 1).
  std::vector<std::vector<TransferItem>> transfers;

  std::size_t n_steps() const { return slices.size(); }
};

/// Contiguous split of `rows` minibatch rows over `n_shards` consumers;
/// the first (rows % n_shards) shards get one extra row.
inline std::vector<std::pair<std::size_t, std::size_t>> shard_split(
    std::size_t rows, int n_shards) {
  std::vector<std::pair<std::size_t, std::size_t>> ranges;
  const std::size_t n = static_cast<std::size_t>(n_shards);
  const std::size_t base = rows / n;
  const std::size_t extra = rows % n;
  std::size_t begin = 0;
  for (std::size_t s = 0; s < n; ++s) {
    const std::size_t len = base + (s < extra ? 1 : 0);
    ranges.emplace_back(begin, begin + len);
    begin += len;
  }
  return ranges;
}

/// Builds the plan for one epoch. Deterministic in (seed, epoch); the
/// permutation covers the partition exactly once and the final slice may be
/// short. Transfer lists are derived from the current ownership map.
inline EpochPlan plan_epoch(const DataStore& store, std::uint32_t epoch,
                            std::uint64_t seed, std::size_t batch_size) {
  if (store.partition().empty())
    throw ContractError("plan_epoch: empty partition");
  if (batch_size < 1) throw ContractError("plan_epoch: batch_size must be >= 1");

  EpochPlan plan;
  plan.epoch = epoch;
  plan.seed = seed;
  plan.batch_size = batch_size;
  plan.permutation = store.partition();
  Rng rng(mix_seed({seed, epoch, 0x5caff1eULL}));
  rng.shuffle(plan.permutation);

  const std::size_t n = plan.permutation.size();
  for (std::size_t begin = 0; begin < n; begin += batch_size) {
    const std::size_t end = std::min(n, begin + batch_size);
    plan.slices.emplace_back(begin, end);
    std::vector<TransferItem> items;
    const auto ranges = shard_split(end - begin, store.n_shards());
    for (int s = 0; s < store.n_shards(); ++s) {
      for (std::size_t r = ranges[s].first; r < ranges[s].second; ++r) {
        const SampleId id = plan.permutation[begin + r];
        const int owner = store.owner_of(id);
        if (owner >= 0 && owner != s) items.push_back({id, owner, s});
      }
    }
    plan.transfers.push_back(std::move(items));
  }
  return plan;
}

struct ShardBatch {
  nn::Tensor<float> x;
  nn::Tensor<float> y;
  std::vector<SampleId> ids;
};

struct Minibatch {
  std::vector<ShardBatch> shards;
  std::size_t rows = 0;
};

/// Assembles minibatch `step` of the plan at the consumer shards. Cached
/// deliveries whose owner differs from the consumer are counted as
/// shuffled; in dynamic mode, misses populate the cache as a side effect.
/// May be issued one step ahead of consumption (the prefetch contract).
inline Minibatch shuffle_step(DataStore& store, const EpochPlan& plan,
                              std::size_t step) {
  if (step >= plan.n_steps())
    throw ContractError("shuffle_step: step index beyond the plan");
  const auto [begin, end] = plan.slices[step];
  const std::size_t rows = end - begin;
  const auto& dims = store.index().dims;

  Minibatch mb;
  mb.rows = rows;
  const auto ranges = shard_split(rows, store.n_shards());
  for (int s = 0; s < store.n_shards(); ++s) {
    const std::size_t shard_rows = ranges[s].second - ranges[s].first;
    ShardBatch batch;
    batch.x = nn::Tensor<float>({shard_rows, dims.input_dim});
    batch.y = nn::Tensor<float>({shard_rows, dims.output_dim()});
    batch.ids.reserve(shard_rows);
    for (std::size_t r = 0; r < shard_rows; ++r) {
      const SampleId id = plan.permutation[begin + ranges[s].first + r];
      batch.ids.push_back(id);
      const float* rec = store.fetch(id, s);
      std::copy_n(rec, dims.input_dim, batch.x.data.begin() +
                                           static_cast<std::ptrdiff_t>(
                                               r * dims.input_dim));
      std::copy_n(rec + dims.input_dim, dims.output_dim(),
                  batch.y.data.begin() +
                      static_cast<std::ptrdiff_t>(r * dims.output_dim()));
    }
    mb.shards.push_back(std::move(batch));
  }
  return mb;
}

}  // namespace ltfb::data
