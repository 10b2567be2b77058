// Copyright (c) 2026 The ltfb authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <string>

#include "ltfb/core/error.hpp"

namespace ltfb::nn {

enum class Act { kIdentity, kRelu, kLeakyRelu, kTanh, kSigmoid };

/// One layer's activation; `slope` only matters for leaky ReLU.
struct Activation {
  Act kind = Act::kIdentity;
  double slope = 0.01;

  bool operator==(const Activation&) const = default;
};

inline std::string act_name(Act a) {
  switch (a) {
    case Act::kIdentity: return "identity";
    case Act::kRelu: return "relu";
    case Act::kLeakyRelu: return "leaky_relu";
    case Act::kTanh: return "tanh";
    case Act::kSigmoid: return "sigmoid";
  }
  return "identity";
}

inline Act act_from_name(const std::string& name) {
  if (name == "identity") return Act::kIdentity;
  if (name == "relu") return Act::kRelu;
  if (name == "leaky_relu") return Act::kLeakyRelu;
  if (name == "tanh") return Act::kTanh;
  if (name == "sigmoid") return Act::kSigmoid;
  throw ConfigError("unknown activation name: " + name);
}

/// Numerically stable logistic function.
template <typename T>
T stable_sigmoid(T z) {
  if (z >= T{0}) {
    return T{1} / (T{1} + std::exp(-z));
  }
  const T e = std::exp(z);
  return e / (T{1} + e);
}

template <typename T>
T act_apply(const Activation& act, T z) {
  switch (act.kind) {
    case Act::kIdentity: return z;
    case Act::kRelu: return z > T{0} ? z : T{0};
    case Act::kLeakyRelu: return z > T{0} ? z : static_cast<T>(act.slope) * z;
    case Act::kTanh: return std::tanh(z);
    case Act::kSigmoid: return stable_sigmoid(z);
  }
  return z;
}

/// d(act)/dz given the pre-activation z and the activation value a.
/// ReLU uses the 0 subgradient at z == 0.
template <typename T>
T act_deriv(const Activation& act, T z, T a) {
  switch (act.kind) {
    case Act::kIdentity: return T{1};
    case Act::kRelu: return z > T{0} ? T{1} : T{0};
    case Act::kLeakyRelu:
      return z > T{0} ? T{1} : static_cast<T>(act.slope);
    case Act::kTanh: return T{1} - a * a;
    case Act::kSigmoid: return a * (T{1} - a);
  }
  return T{1};
}

}  // namespace ltfb::nn
