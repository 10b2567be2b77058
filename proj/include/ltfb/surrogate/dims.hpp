// Copyright (c) 2026 The ltfb authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <string>

#include "ltfb/core/error.hpp"

namespace ltfb::surrogate {

/// Shapes of one sample: a 5-D input vector and an output bundle of scalars
/// plus a multi-view, multi-channel image stack. Desk-scale 16x16 images are
/// the default; paper_scale() gives the full 64x64 layout.
struct ModalityDims {
  std::uint32_t input_dim = 5;
  std::uint32_t latent_dim = 20;
  std::uint32_t scalar_dim = 15;
  std::uint32_t image_views = 3;
  std::uint32_t image_channels = 4;
  std::uint32_t image_h = 16;
  std::uint32_t image_w = 16;

  std::uint32_t image_elems() const {
    return image_views * image_channels * image_h * image_w;
  }
  std::uint32_t output_dim() const { return scalar_dim + image_elems(); }
  std::uint32_t record_floats() const { return input_dim + output_dim(); }

  void validate() const {
    auto check = [](std::uint32_t v, const char* name) {
      if (v < 1)
        throw ContractError(std::string("ModalityDims: ") + name +
                            " must be >= 1");
    };
    check(input_dim, "input_dim");
    check(latent_dim, "latent_dim");
    check(scalar_dim, "scalar_dim");
    check(image_views, "image_views");
    check(image_channels, "image_channels");
    check(image_h, "image_h");
    check(image_w, "image_w");
  }

  static ModalityDims paper_scale() {
    ModalityDims d;
    d.image_h = 64;
    d.image_w = 64;
    return d;
  }

  bool operator==(const ModalityDims&) const = default;
};

}  // namespace ltfb::surrogate
