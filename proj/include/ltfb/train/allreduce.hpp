// Copyright (c) 2026 The ltfb authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <vector>

#include "ltfb/core/error.hpp"
#include "ltfb/nn/mlp.hpp"

namespace ltfb::train {

/// Averages per-shard gradients, weighted by shard batch size, in a fixed
/// shard order (accumulation in double). Every shard applying the returned
/// blob produces bit-identical replicas.
template <typename T>
nn::MlpParams<T> allreduce_gradients(
    const std::vector<nn::MlpParams<T>>& shard_grads,
    const std::vector<std::size_t>& shard_rows) {
  if (shard_grads.empty())
    throw ContractError("allreduce_gradients: no shard gradients");
  if (shard_rows.size() != shard_grads.size())
    throw ContractError("allreduce_gradients: weight count mismatch");
  for (const auto& g : shard_grads)
    if (!g.same_shape(shard_grads.front()))
      throw ContractError("allreduce_gradients: manifest mismatch");

  double total_rows = 0;
  for (std::size_t r : shard_rows) total_rows += static_cast<double>(r);
  if (total_rows <= 0)
    throw ContractError("allreduce_gradients: zero total batch size");

  const auto& ref = shard_grads.front();
  nn::MlpParams<T> out;
  out.weights.reserve(ref.weights.size());
  out.biases.reserve(ref.biases.size());
  auto reduce_tensor = [&](auto select) {
    const auto& first = select(ref);
    nn::Tensor<T> acc(first.shape);
    for (std::size_t i = 0; i < acc.size(); ++i) {
      double sum = 0;
      for (std::size_t s = 0; s < shard_grads.size(); ++s)
        sum += static_cast<double>(shard_rows[s]) *
               static_cast<double>(select(shard_grads[s])[i]);
      acc[i] = static_cast<T>(sum / total_rows);
    }
    return acc;
  };
  for (std::size_t l = 0; l < ref.weights.size(); ++l) {
    out.weights.push_back(reduce_tensor(
        [l](const nn::MlpParams<T>& p) -> const nn::Tensor<T>& {
          return p.weights[l];
        }));
    out.biases.push_back(reduce_tensor(
        [l](const nn::MlpParams<T>& p) -> const nn::Tensor<T>& {
          return p.biases[l];
        }));
  }
  return out;
}

/// Weighted mean of per-shard scalars (losses) with the same fixed-order
/// double accumulation as the gradient reduction.
inline double weighted_mean(const std::vector<double>& values,
                            const std::vector<std::size_t>& weights) {
  if (values.size() != weights.size() || values.empty())
    throw ContractError("weighted_mean: bad arguments");
  double num = 0, den = 0;
  for (std::size_t i = 0; i < values.size(); ++i) {
    num += static_cast<double>(weights[i]) * values[i];
    den += static_cast<double>(weights[i]);
  }
  if (den <= 0) throw ContractError("weighted_mean: zero total weight");
  return num / den;
}

}  // namespace ltfb::train
