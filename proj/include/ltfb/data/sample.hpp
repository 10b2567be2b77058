// Copyright (c) 2026 The ltfb authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <vector>

#include "ltfb/surrogate/dims.hpp"

namespace ltfb::data {

using SampleId = std::uint32_t;

/// One simulation sample. `inputs` holds the 5-D parameter vector;
/// `outputs` holds the scalars followed by the image stack flattened in
/// view-major, then channel, row, column order.
struct SampleRecord {
  std::vector<float> inputs;
  std::vector<float> outputs;

  bool matches(const surrogate::ModalityDims& dims) const {
    return inputs.size() == dims.input_dim &&
           outputs.size() == dims.output_dim();
  }

  bool operator==(const SampleRecord&) const = default;
};

}  // namespace ltfb::data
