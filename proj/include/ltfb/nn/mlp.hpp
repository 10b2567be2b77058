// Copyright (c) 2026 The ltfb authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "ltfb/core/error.hpp"
#include "ltfb/core/rng.hpp"
#include "ltfb/nn/activation.hpp"
#include "ltfb/nn/tensor.hpp"

// Fully-connected networks: specification, parameters with a flat-blob
// manifest, forward pass with an activation tape, and exact backprop.

namespace ltfb::nn {

/// Architecture of a stack of dense layers. Layer l maps
/// layer_widths[l] -> layer_widths[l+1] and applies activations[l].
struct MlpSpec {
  std::vector<std::size_t> layer_widths;
  std::vector<Activation> activations;
  std::uint64_t init_seed = 0;

  std::size_t n_layers() const {
    return layer_widths.empty() ? 0 : layer_widths.size() - 1;
  }
  std::size_t in_dim() const { return layer_widths.front(); }
  std::size_t out_dim() const { return layer_widths.back(); }

  void validate() const {
    std::string problems;
    if (layer_widths.size() < 2)
      problems += "need at least two layer widths; ";
    for (std::size_t w : layer_widths)
      if (w < 1) {
        problems += "layer widths must be >= 1; ";
        break;
      }
    if (!layer_widths.empty() &&
        activations.size() != layer_widths.size() - 1)
      problems += "need exactly one activation per layer (" +
                  std::to_string(layer_widths.size() - 1) + " expected, " +
                  std::to_string(activations.size()) + " given); ";
    if (!problems.empty()) throw ContractError("invalid MlpSpec: " + problems);
  }

  bool operator==(const MlpSpec&) const = default;
};

/// Maps every parameter tensor to its offset in the flat blob. Blob order is
/// W0, b0, W1, b1, ... with row-major weights.
struct BlobManifest {
  struct Entry {
    std::string name;
    std::size_t offset;
    std::size_t rows;  // 1 for biases
    std::size_t cols;
    std::size_t count() const { return rows * cols; }
  };
  std::vector<Entry> entries;
  std::size_t total = 0;

  bool operator==(const BlobManifest&) const = default;
};

inline BlobManifest manifest_for(const MlpSpec& spec) {
  spec.validate();
  BlobManifest m;
  std::size_t offset = 0;
  for (std::size_t l = 0; l < spec.n_layers(); ++l) {
    const std::size_t in = spec.layer_widths[l];
    const std::size_t out = spec.layer_widths[l + 1];
    m.entries.push_back({"w" + std::to_string(l), offset, in, out});
    offset += in * out;
    m.entries.push_back({"b" + std::to_string(l), offset, 1, out});
    offset += out;
  }
  m.total = offset;
  return m;
}

/// Weights and biases of one network. Layout mirrors MlpSpec; flatten and
/// unflatten round-trip exactly.
template <typename T>
struct MlpParams {
  std::vector<Tensor<T>> weights;  // [in x out] per layer
  std::vector<Tensor<T>> biases;   // [out] per layer

  std::size_t param_count() const {
    std::size_t n = 0;
    for (const auto& w : weights) n += w.size();
    for (const auto& b : biases) n += b.size();
    return n;
  }

  bool same_shape(const MlpParams& other) const {
    if (weights.size() != other.weights.size()) return false;
    for (std::size_t l = 0; l < weights.size(); ++l) {
      if (weights[l].shape != other.weights[l].shape) return false;
      if (biases[l].shape != other.biases[l].shape) return false;
    }
    return true;
  }

  std::vector<T> flatten() const {
    std::vector<T> blob;
    blob.reserve(param_count());
    for (std::size_t l = 0; l < weights.size(); ++l) {
      blob.insert(blob.end(), weights[l].data.begin(), weights[l].data.end());
      blob.insert(blob.end(), biases[l].data.begin(), biases[l].data.end());
    }
    return blob;
  }

  static MlpParams unflatten(const MlpSpec& spec, std::span<const T> blob) {
    const BlobManifest manifest = manifest_for(spec);
    if (blob.size() != manifest.total)
      throw ContractError("blob length " + std::to_string(blob.size()) +
                          " does not match manifest total " +
                          std::to_string(manifest.total));
    MlpParams p;
    for (std::size_t l = 0; l < spec.n_layers(); ++l) {
      const auto& w_entry = manifest.entries[2 * l];
      const auto& b_entry = manifest.entries[2 * l + 1];
      Tensor<T> w({w_entry.rows, w_entry.cols});
      std::copy_n(blob.begin() + static_cast<std::ptrdiff_t>(w_entry.offset),
                  w_entry.count(), w.data.begin());
      Tensor<T> b({b_entry.cols});
      std::copy_n(blob.begin() + static_cast<std::ptrdiff_t>(b_entry.offset),
                  b_entry.count(), b.data.begin());
      p.weights.push_back(std::move(w));
      p.biases.push_back(std::move(b));
    }
    return p;
  }

  /// Zero-valued parameters with the same shapes (gradient buffers).
  static MlpParams zeros_like(const MlpSpec& spec) {
    MlpParams p;
    for (std::size_t l = 0; l < spec.n_layers(); ++l) {
      p.weights.emplace_back(
          Tensor<T>({spec.layer_widths[l], spec.layer_widths[l + 1]}));
      p.biases.emplace_back(Tensor<T>({spec.layer_widths[l + 1]}));
    }
    return p;
  }
};

/// Scaled-uniform fan-in init: weights ~ U(-a, a) with a = sqrt(1/fan_in),
/// biases zero. Deterministic in spec.init_seed.
template <typename T>
MlpParams<T> init_params(const MlpSpec& spec) {
  spec.validate();
  Rng rng(spec.init_seed);
  MlpParams<T> p = MlpParams<T>::zeros_like(spec);
  for (std::size_t l = 0; l < spec.n_layers(); ++l) {
    const double a = std::sqrt(1.0 / static_cast<double>(spec.layer_widths[l]));
    for (T& w : p.weights[l].data) w = static_cast<T>(rng.uniform(-a, a));
  }
  return p;
}

/// Everything the backward pass needs about one forward pass.
template <typename T>
struct ForwardTape {
  Tensor<T> input;
  std::vector<Tensor<T>> pre_acts;     // z_l
  std::vector<Tensor<T>> activations;  // a_l = act(z_l)

  const Tensor<T>& output() const { return activations.back(); }
};

namespace detail {
template <typename T>
void check_forward_shapes(const MlpSpec& spec, const MlpParams<T>& params,
                          const Tensor<T>& batch) {
  spec.validate();
  if (params.weights.size() != spec.n_layers())
    throw ContractError("params have " +
                        std::to_string(params.weights.size()) +
                        " layers, spec has " + std::to_string(spec.n_layers()));
  if (batch.cols() != spec.in_dim())
    throw DimensionError("mlp_forward: layer 0 expects input width " +
                         std::to_string(spec.in_dim()) + ", got " +
                         std::to_string(batch.cols()));
  for (std::size_t l = 0; l < spec.n_layers(); ++l) {
    if (params.weights[l].rows() != spec.layer_widths[l] ||
        params.weights[l].cols() != spec.layer_widths[l + 1] ||
        params.biases[l].size() != spec.layer_widths[l + 1])
      throw DimensionError("mlp_forward: layer " + std::to_string(l) +
                           " parameter shapes do not match the spec");
  }
}
}  // namespace detail

/// Forward pass that records the activation tape for backprop.
template <typename T>
ForwardTape<T> mlp_forward(const MlpSpec& spec, const MlpParams<T>& params,
                           const Tensor<T>& batch) {
  detail::check_forward_shapes(spec, params, batch);
  ForwardTape<T> tape;
  tape.input = batch;
  const Tensor<T>* cur = &tape.input;
  for (std::size_t l = 0; l < spec.n_layers(); ++l) {
    Tensor<T> z = matmul(*cur, params.weights[l]);
    add_row_vector(z, params.biases[l]);
    Tensor<T> a({z.rows(), z.cols()});
    for (std::size_t i = 0; i < z.size(); ++i)
      a[i] = act_apply(spec.activations[l], z[i]);
    tape.pre_acts.push_back(std::move(z));
    tape.activations.push_back(std::move(a));
    cur = &tape.activations.back();
  }
  return tape;
}

/// Tape-free forward pass for evaluation paths.
template <typename T>
Tensor<T> mlp_apply(const MlpSpec& spec, const MlpParams<T>& params,
                    const Tensor<T>& batch) {
  detail::check_forward_shapes(spec, params, batch);
  Tensor<T> cur = batch;
  for (std::size_t l = 0; l < spec.n_layers(); ++l) {
    Tensor<T> z = matmul(cur, params.weights[l]);
    add_row_vector(z, params.biases[l]);
    for (std::size_t i = 0; i < z.size(); ++i)
      z[i] = act_apply(spec.activations[l], z[i]);
    cur = std::move(z);
  }
  return cur;
}

template <typename T>
struct BackwardResult {
  MlpParams<T> param_grads;
  Tensor<T> grad_input;
};

/// Exact gradients for the forward pass recorded in `tape`.
/// `grad_output` is dL/d(output); the tape must come from a matching
/// mlp_forward call on the same spec and params.
template <typename T>
BackwardResult<T> mlp_backward(const MlpSpec& spec, const MlpParams<T>& params,
                               const ForwardTape<T>& tape,
                               const Tensor<T>& grad_output) {
  spec.validate();
  const std::size_t layers = spec.n_layers();
  if (tape.pre_acts.size() != layers || tape.activations.size() != layers)
    throw ContractError("tape does not match the spec's layer count");
  if (grad_output.shape != tape.activations.back().shape)
    throw ContractError("grad_output shape does not match the tape output");
  if (params.weights.size() != layers)
    throw ContractError("params do not match the spec's layer count");
  for (std::size_t l = 0; l < layers; ++l)
    if (params.weights[l].rows() != spec.layer_widths[l] ||
        params.weights[l].cols() != spec.layer_widths[l + 1])
      throw ContractError("stale tape: params no longer match layer " +
                          std::to_string(l));

  BackwardResult<T> result;
  result.param_grads = MlpParams<T>::zeros_like(spec);

  Tensor<T> grad_act = grad_output;
  for (std::size_t l = layers; l-- > 0;) {
    const Tensor<T>& z = tape.pre_acts[l];
    const Tensor<T>& a = tape.activations[l];
    Tensor<T> dz({z.rows(), z.cols()});
    for (std::size_t i = 0; i < z.size(); ++i)
      dz[i] = grad_act[i] * act_deriv(spec.activations[l], z[i], a[i]);
    const Tensor<T>& below =
        (l == 0) ? tape.input : tape.activations[l - 1];
    result.param_grads.weights[l] = matmul_tn(below, dz);
    result.param_grads.biases[l] = col_sums(dz);
    grad_act = matmul_nt(dz, params.weights[l]);
  }
  result.grad_input = std::move(grad_act);
  return result;
}

}  // namespace ltfb::nn
