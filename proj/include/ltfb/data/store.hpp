// Copyright (c) 2026 The ltfb authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <fstream>
#include <string>
#include <unordered_map>
#include <vector>

#include "ltfb/data/bundle.hpp"

// The owner-sharded in-memory sample cache. Three modes:
//   none    - every fetch reads from disk (naive ingestion),
//   dynamic - cache-on-first-use during epoch 1, no file reads afterwards,
//   preload - fully populate before training, each file opened by exactly
//             one shard.
// A shard models one worker process inside a trainer. Counters follow a
// single-writer discipline: one logical thread drives a store at a time
// (the prefetcher hands off through a future before the consumer resumes).

namespace ltfb::data {

enum class StoreMode { kNone, kDynamic, kPreload };

inline std::string store_mode_name(StoreMode m) {
  switch (m) {
    case StoreMode::kNone: return "none";
    case StoreMode::kDynamic: return "dynamic";
    case StoreMode::kPreload: return "preload";
  }
  return "none";
}

inline StoreMode store_mode_from_name(const std::string& name) {
  if (name == "none") return StoreMode::kNone;
  if (name == "dynamic") return StoreMode::kDynamic;
  if (name == "preload") return StoreMode::kPreload;
  throw ConfigError("unknown data-store mode: " + name);
}

/// File-access accounting. Totals are monotone within a run; per_epoch
/// holds closed deltas (epoch 0 covers everything before the first
/// begin_epoch call, i.e. the preload phase).
struct AccessCounters {
  std::uint64_t files_opened = 0;
  std::uint64_t bytes_read = 0;
  std::uint64_t samples_shuffled = 0;

  struct EpochDelta {
    std::uint32_t epoch = 0;
    std::uint64_t files_opened = 0;
    std::uint64_t bytes_read = 0;
    std::uint64_t samples_shuffled = 0;
  };
  std::vector<EpochDelta> per_epoch;
};

inline constexpr std::size_t kUnlimitedBudget =
    ~static_cast<std::size_t>(0);

class DataStore {
 public:
  DataStore(const DatasetIndex* index, std::vector<SampleId> partition,
            StoreMode mode, int n_shards,
            std::size_t budget_bytes = kUnlimitedBudget)
      : index_(index),
        partition_(std::move(partition)),
        mode_(mode),
        n_shards_(n_shards),
        budget_bytes_(budget_bytes) {
    if (!index_) throw ContractError("DataStore: null dataset index");
    if (n_shards_ < 1) throw ContractError("DataStore: n_shards must be >= 1");
    slot_of_.reserve(partition_.size());
    for (std::size_t i = 0; i < partition_.size(); ++i) {
      if (partition_[i] >= index_->total)
        throw ContractError("DataStore: partition id outside dataset");
      slot_of_.emplace(partition_[i], static_cast<std::uint32_t>(i));
    }
    if (slot_of_.size() != partition_.size())
      throw ContractError("DataStore: duplicate sample ids in partition");
    cache_.resize(partition_.size());
    owner_.assign(partition_.size(), -1);
    file_open_counts_.assign(index_->paths.size(), 0);
    scratch_.resize(index_->stride_floats());
  }

  StoreMode mode() const { return mode_; }
  int n_shards() const { return n_shards_; }
  const DatasetIndex& index() const { return *index_; }
  const std::vector<SampleId>& partition() const { return partition_; }
  const AccessCounters& counters() const { return counters_; }
  const std::vector<std::uint32_t>& file_open_counts() const {
    return file_open_counts_;
  }

  /// Fully populates the cache before training. Files covering the
  /// partition are dealt round-robin to shards; each file is opened once by
  /// its loader shard, which becomes the owner of every sample it loads.
  void preload() {
    if (mode_ != StoreMode::kPreload)
      throw ContractError("preload: store is not in preload mode");
    const std::size_t required = partition_.size() * index_->stride_bytes();
    if (required > budget_bytes_)
      throw CapacityError("preload requires " + std::to_string(required) +
                          " bytes but the store budget is " +
                          std::to_string(budget_bytes_) + " bytes");

    // Group partition slots by containing file, keeping file order.
    std::vector<std::vector<std::uint32_t>> slots_by_file(
        index_->paths.size());
    for (std::size_t slot = 0; slot < partition_.size(); ++slot) {
      const auto loc = index_->locate(partition_[slot]);
      slots_by_file[loc.file_idx].push_back(
          static_cast<std::uint32_t>(slot));
    }
    int next_shard = 0;
    for (std::size_t f = 0; f < slots_by_file.size(); ++f) {
      if (slots_by_file[f].empty()) continue;
      const int loader = next_shard;
      next_shard = (next_shard + 1) % n_shards_;
      std::ifstream is(index_->paths[f], std::ios::binary);
      if (!is)
        throw IoError("cannot open bundle " + index_->paths[f].string());
      count_open(f);
      for (std::uint32_t slot : slots_by_file[f]) {
        const auto loc = index_->locate(partition_[slot]);
        cache_[slot].resize(index_->stride_floats());
        read_record(is, index_->paths[f].string(), loc.record_idx,
                    cache_[slot].data());
        owner_[slot] = loader;
      }
    }
    preloaded_ = true;
  }

  /// Returns the record for `id`, honoring the store mode. `consumer_shard`
  /// is the shard assembling the minibatch; deliveries whose owner differs
  /// from the consumer count as shuffled samples.
  const float* fetch(SampleId id, int consumer_shard) {
    const auto it = slot_of_.find(id);
    if (it == slot_of_.end())
      throw ContractError("fetch: sample id " + std::to_string(id) +
                          " is not in this store's partition");
    const std::uint32_t slot = it->second;

    switch (mode_) {
      case StoreMode::kNone:
        read_from_disk(id, scratch_.data());
        return scratch_.data();
      case StoreMode::kPreload:
        if (!preloaded_)
          throw ContractError("fetch: preload() has not been called");
        if (cache_[slot].empty())
          throw StoreCorruptError("owner shard is missing sample " +
                                  std::to_string(id));
        break;
      case StoreMode::kDynamic:
        if (cache_[slot].empty()) {
          const std::size_t required =
              (cached_count_ + 1) * index_->stride_bytes();
          if (required > budget_bytes_)
            throw CapacityError(
                "dynamic insert requires " + std::to_string(required) +
                " bytes but the store budget is " +
                std::to_string(budget_bytes_) + " bytes");
          cache_[slot].resize(index_->stride_floats());
          read_from_disk(id, cache_[slot].data());
          owner_[slot] = next_dynamic_owner_;
          next_dynamic_owner_ = (next_dynamic_owner_ + 1) % n_shards_;
          ++cached_count_;
        }
        break;
    }
    if (consumer_shard >= 0 && owner_[slot] >= 0 &&
        owner_[slot] != consumer_shard) {
      ++counters_.samples_shuffled;
      ++epoch_delta_.samples_shuffled;
    }
    return cache_[slot].data();
  }

  /// Closes the running per-epoch counter delta and starts a new one.
  void begin_epoch(std::uint32_t epoch) {
    counters_.per_epoch.push_back(epoch_delta_);
    epoch_delta_ = AccessCounters::EpochDelta{};
    epoch_delta_.epoch = epoch;
  }

  /// Flushes the current delta without starting a new epoch (run teardown).
  void flush_epoch() {
    counters_.per_epoch.push_back(epoch_delta_);
    epoch_delta_ = AccessCounters::EpochDelta{};
    epoch_delta_.epoch += 1;
  }

  int owner_of(SampleId id) const {
    const auto it = slot_of_.find(id);
    return it == slot_of_.end() ? -1 : owner_[it->second];
  }

  std::vector<SampleId> cached_ids() const {
    std::vector<SampleId> out;
    for (std::size_t slot = 0; slot < partition_.size(); ++slot)
      if (!cache_[slot].empty()) out.push_back(partition_[slot]);
    std::sort(out.begin(), out.end());
    return out;
  }

  /// Diagnostic hook: forgets a cached record while keeping its ownership,
  /// leaving the store in the corrupt state fetch() is required to detect.
  void drop_cached(SampleId id) {
    const auto it = slot_of_.find(id);
    if (it != slot_of_.end()) {
      cache_[it->second].clear();
      cache_[it->second].shrink_to_fit();
    }
  }

 private:
  void count_open(std::size_t file_idx) {
    ++counters_.files_opened;
    ++epoch_delta_.files_opened;
    ++file_open_counts_[file_idx];
  }

  void count_read(std::size_t bytes) {
    counters_.bytes_read += bytes;
    epoch_delta_.bytes_read += bytes;
  }

  void read_record(std::ifstream& is, const std::string& path,
                   std::uint32_t record_idx, float* dst) {
    is.seekg(static_cast<std::streamoff>(kBundleHeaderBytes +
                                         record_idx * index_->stride_bytes()));
    for (std::size_t i = 0; i < index_->stride_floats(); ++i)
      dst[i] = get_f32(is, path);
    count_read(index_->stride_bytes());
  }

  /// Naive single-record access: open, validate, seek, read, close.
  void read_from_disk(SampleId id, float* dst) {
    const auto loc = index_->locate(id);
    const std::string path = index_->paths[loc.file_idx].string();
    std::ifstream is(index_->paths[loc.file_idx], std::ios::binary);
    if (!is)
      throw IoError("cannot open bundle " + path + " for sample " +
                    std::to_string(id));
    count_open(loc.file_idx);
    read_bundle_header(is, path);
    read_record(is, path, loc.record_idx, dst);
  }

  const DatasetIndex* index_;
  std::vector<SampleId> partition_;
  StoreMode mode_;
  int n_shards_;
  std::size_t budget_bytes_;

  std::unordered_map<SampleId, std::uint32_t> slot_of_;
  std::vector<std::vector<float>> cache_;
  std::vector<int> owner_;
  std::vector<std::uint32_t> file_open_counts_;
  std::vector<float> scratch_;
  std::size_t cached_count_ = 0;
  int next_dynamic_owner_ = 0;
  bool preloaded_ = false;

  AccessCounters counters_;
  AccessCounters::EpochDelta epoch_delta_;
};

}  // namespace ltfb::data
