// Copyright (c) 2026 The ltfb authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <cstdint>
#include <span>
#include <vector>

#include "ltfb/core/error.hpp"
#include "ltfb/nn/mlp.hpp"

namespace ltfb::nn {

struct AdamHyper {
  double lr = 0.001;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;

  bool operator==(const AdamHyper&) const = default;
};

/// Adam moment buffers, laid out like the flattened parameter blob.
template <typename T>
struct AdamState {
  std::vector<T> m;
  std::vector<T> v;
  std::uint64_t t = 0;
  AdamHyper hyper;

  static AdamState for_params(const MlpParams<T>& params, AdamHyper hyper) {
    AdamState s;
    s.m.assign(params.param_count(), T{0});
    s.v.assign(params.param_count(), T{0});
    s.hyper = hyper;
    return s;
  }

  /// Zeroes m and v but keeps t; used when a trainer adopts an incoming
  /// generator and continues with fresh moments.
  void reset_moments() {
    std::fill(m.begin(), m.end(), T{0});
    std::fill(v.begin(), v.end(), T{0});
  }
};

namespace detail {
template <typename T>
void adam_update_range(std::span<T> params, std::span<const T> grads,
                       std::span<T> m, std::span<T> v, const AdamHyper& h,
                       double c1, double c2) {
  for (std::size_t i = 0; i < params.size(); ++i) {
    const double g = static_cast<double>(grads[i]);
    const double mi = h.beta1 * static_cast<double>(m[i]) + (1.0 - h.beta1) * g;
    const double vi =
        h.beta2 * static_cast<double>(v[i]) + (1.0 - h.beta2) * g * g;
    m[i] = static_cast<T>(mi);
    v[i] = static_cast<T>(vi);
    const double update = h.lr * (mi / c1) / (std::sqrt(vi / c2) + h.eps);
    params[i] = static_cast<T>(static_cast<double>(params[i]) - update);
  }
}
}  // namespace detail

/// One bias-corrected Adam step on a flat blob. Throws NumericError before
/// touching any state if a gradient component is not finite.
template <typename T>
void adam_step_blob(std::span<T> params, std::span<const T> grads,
                    AdamState<T>& state) {
  if (params.size() != grads.size() || params.size() != state.m.size() ||
      params.size() != state.v.size())
    throw ContractError("adam_step: parameter/gradient/state sizes disagree");
  for (const T& g : grads)
    if (!std::isfinite(static_cast<double>(g)))
      throw NumericError("adam_step: non-finite gradient component");
  state.t += 1;
  const double c1 = 1.0 - std::pow(state.hyper.beta1,
                                   static_cast<double>(state.t));
  const double c2 = 1.0 - std::pow(state.hyper.beta2,
                                   static_cast<double>(state.t));
  detail::adam_update_range(params, grads, std::span<T>(state.m),
                            std::span<T>(state.v), state.hyper, c1, c2);
}

/// Adam step on structured parameters; iterates tensors in blob order.
template <typename T>
void adam_step(MlpParams<T>& params, const MlpParams<T>& grads,
               AdamState<T>& state) {
  if (!params.same_shape(grads))
    throw ContractError("adam_step: gradient shapes do not match parameters");
  if (params.param_count() != state.m.size())
    throw ContractError("adam_step: state was built for different parameters");

  for (std::size_t l = 0; l < params.weights.size(); ++l) {
    for (const T& g : grads.weights[l].data)
      if (!std::isfinite(static_cast<double>(g)))
        throw NumericError("adam_step: non-finite gradient component");
    for (const T& g : grads.biases[l].data)
      if (!std::isfinite(static_cast<double>(g)))
        throw NumericError("adam_step: non-finite gradient component");
  }

  state.t += 1;
  const double c1 = 1.0 - std::pow(state.hyper.beta1,
                                   static_cast<double>(state.t));
  const double c2 = 1.0 - std::pow(state.hyper.beta2,
                                   static_cast<double>(state.t));
  std::size_t offset = 0;
  auto step_tensor = [&](std::span<T> p, std::span<const T> g) {
    detail::adam_update_range(
        p, g, std::span<T>(state.m).subspan(offset, p.size()),
        std::span<T>(state.v).subspan(offset, p.size()), state.hyper, c1, c2);
    offset += p.size();
  };
  for (std::size_t l = 0; l < params.weights.size(); ++l) {
    step_tensor(std::span<T>(params.weights[l].data),
                std::span<const T>(grads.weights[l].data));
    step_tensor(std::span<T>(params.biases[l].data),
                std::span<const T>(grads.biases[l].data));
  }
}

}  // namespace ltfb::nn
