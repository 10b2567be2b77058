// Copyright (c) 2026 The ltfb authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>

#include "ltfb/core/error.hpp"
#include "ltfb/nn/activation.hpp"
#include "ltfb/nn/tensor.hpp"

namespace ltfb::nn {

template <typename T>
struct Loss {
  double value = 0;
  Tensor<T> grad;
};

/// Probabilities are clamped into [kProbEps, 1 - kProbEps] before the log.
inline constexpr double kProbEps = 1e-7;

/// Mean absolute error over all elements. The gradient is the subgradient
/// sign(pred - target)/N with 0 at exact ties.
template <typename T>
Loss<T> mae_loss(const Tensor<T>& pred, const Tensor<T>& target) {
  if (pred.shape != target.shape)
    throw DimensionError("mae_loss: shapes differ");
  Loss<T> out;
  out.grad = Tensor<T>(pred.shape);
  const double n = static_cast<double>(pred.size());
  double acc = 0;
  for (std::size_t i = 0; i < pred.size(); ++i) {
    const double d = static_cast<double>(pred[i]) -
                     static_cast<double>(target[i]);
    acc += std::abs(d);
    out.grad[i] = d > 0 ? static_cast<T>(1.0 / n)
                        : (d < 0 ? static_cast<T>(-1.0 / n) : T{0});
  }
  out.value = acc / n;
  return out;
}

/// Loss value only, no gradient allocation.
template <typename T>
double mae_value(const Tensor<T>& pred, const Tensor<T>& target) {
  if (pred.shape != target.shape)
    throw DimensionError("mae_value: shapes differ");
  double acc = 0;
  for (std::size_t i = 0; i < pred.size(); ++i)
    acc += std::abs(static_cast<double>(pred[i]) -
                    static_cast<double>(target[i]));
  return acc / static_cast<double>(pred.size());
}

/// Mean binary cross-entropy. `pred_prob` holds sigmoid outputs; labels must
/// be exactly 0 or 1. The returned gradient is taken with respect to the
/// pre-sigmoid logits, (p - y)/N, which is the stable form to feed into a
/// network whose final layer emits logits.
template <typename T>
Loss<T> bce_loss(const Tensor<T>& pred_prob, const Tensor<T>& labels) {
  if (pred_prob.shape != labels.shape)
    throw DimensionError("bce_loss: shapes differ");
  Loss<T> out;
  out.grad = Tensor<T>(pred_prob.shape);
  const double n = static_cast<double>(pred_prob.size());
  double acc = 0;
  for (std::size_t i = 0; i < pred_prob.size(); ++i) {
    const double y = static_cast<double>(labels[i]);
    if (y != 0.0 && y != 1.0)
      throw ContractError("bce_loss: labels must be 0 or 1");
    double p = static_cast<double>(pred_prob[i]);
    if (p < kProbEps) p = kProbEps;
    if (p > 1.0 - kProbEps) p = 1.0 - kProbEps;
    acc += y != 0.0 ? -std::log(p) : -std::log(1.0 - p);
    out.grad[i] = static_cast<T>((p - y) / n);
  }
  out.value = acc / n;
  return out;
}

/// Elementwise sigmoid of a logits tensor.
template <typename T>
Tensor<T> sigmoid(const Tensor<T>& logits) {
  Tensor<T> p(logits.shape);
  for (std::size_t i = 0; i < logits.size(); ++i)
    p[i] = stable_sigmoid(logits[i]);
  return p;
}

}  // namespace ltfb::nn
