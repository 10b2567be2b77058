// Copyright (c) 2026 The ltfb authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <bit>
#include <cmath>
#include <cstdint>
#include <span>
#include <vector>

#include "ltfb/core/hash.hpp"
#include "ltfb/core/rng.hpp"
#include "ltfb/data/sample.hpp"

// Deterministic analytic stand-in for a slow physics simulator. The map
// from the 5-D input space is:
//   scalars - a seeded coefficient table over a fixed nonlinear basis
//             (constant, linear, pairwise products, sinusoids), and
//   images  - one anisotropic Gaussian blob per (view, channel):
//             params[0] ("drive") sets amplitude and width nonlinearly,
//             params[1..4] ("shape") set orientation, eccentricity and the
//             center offset, each view applies a fixed rotation, and each
//             channel scales the width and damps the amplitude.
// Shape components at 0.5 give an exactly circular, centered blob.

namespace ltfb::synth {

struct GeneratorSpec {
  surrogate::ModalityDims dims;
  double noise_level = 0.0;
  std::uint64_t spec_seed = 1;
};

inline constexpr double kTwoPi = 6.283185307179586476925286766559;

/// Number of basis terms for 5 inputs: 1 + 5 + 15 + 5 + 5.
inline constexpr std::size_t kScalarBasisTerms = 31;

inline void scalar_basis(std::span<const double> p, double* phi) {
  std::size_t k = 0;
  phi[k++] = 1.0;
  for (int i = 0; i < 5; ++i) phi[k++] = p[i];
  for (int i = 0; i < 5; ++i)
    for (int j = i; j < 5; ++j) phi[k++] = p[i] * p[j];
  for (int i = 0; i < 5; ++i) phi[k++] = std::sin(kTwoPi * p[i]);
  for (int i = 0; i < 5; ++i) phi[k++] = std::cos(kTwoPi * p[i]);
}

class SynthGenerator {
 public:
  explicit SynthGenerator(GeneratorSpec spec) : spec_(spec) {
    spec_.dims.validate();
    if (spec_.dims.input_dim != 5)
      throw ContractError("SynthGenerator: input_dim must be 5");
    Rng rng(mix_seed({spec_.spec_seed, 0xc0effULL}));
    scalar_coeffs_.resize(spec_.dims.scalar_dim * kScalarBasisTerms);
    for (double& c : scalar_coeffs_) c = rng.uniform(-1.0, 1.0);
    const std::size_t vc = static_cast<std::size_t>(spec_.dims.image_views) *
                           spec_.dims.image_channels;
    gain_.resize(vc);
    for (double& g : gain_) g = rng.uniform(0.9, 1.1);
    wavelength_.resize(spec_.dims.image_channels);
    for (std::uint32_t c = 0; c < spec_.dims.image_channels; ++c)
      wavelength_[c] = (1.0 / (1.0 + 0.25 * c)) * rng.uniform(0.95, 1.05);
  }

  const GeneratorSpec& spec() const { return spec_; }

  /// Generates one sample; fully determined by (spec seed, params).
  data::SampleRecord sample(std::span<const double> params) const {
    if (params.size() != 5)
      throw ContractError("synth_sample: expected 5 parameters");
    for (double p : params)
      if (!(p >= 0.0 && p <= 1.0))
        throw ContractError("synth_sample: parameters must lie in [0,1]");

    const auto& dims = spec_.dims;
    data::SampleRecord rec;
    rec.inputs.resize(dims.input_dim);
    for (std::size_t i = 0; i < 5; ++i)
      rec.inputs[i] = static_cast<float>(params[i]);
    rec.outputs.resize(dims.output_dim());

    double phi[kScalarBasisTerms];
    scalar_basis(params, phi);
    for (std::uint32_t s = 0; s < dims.scalar_dim; ++s) {
      double acc = 0;
      for (std::size_t t = 0; t < kScalarBasisTerms; ++t)
        acc += scalar_coeffs_[s * kScalarBasisTerms + t] * phi[t];
      rec.outputs[s] = static_cast<float>(acc);
    }

    render_images(params, rec.outputs.data() + dims.scalar_dim);

    if (spec_.noise_level > 0.0) apply_noise(params, rec);
    return rec;
  }

 private:
  void render_images(std::span<const double> p, float* out) const {
    const auto& dims = spec_.dims;
    const double drive = p[0];
    const double theta_base = 3.14159265358979323846 * p[1];
    const double ecc = 1.2 * (p[2] - 0.5);
    const double cx = 0.25 * (p[3] - 0.5);
    const double cy = 0.25 * (p[4] - 0.5);
    const double sigma = 0.10 + 0.25 * drive * drive;
    const double amp =
        0.4 + 1.8 * drive * drive * drive + 0.3 * std::sin(kTwoPi * drive);

    std::size_t k = 0;
    for (std::uint32_t v = 0; v < dims.image_views; ++v) {
      const double theta =
          theta_base + v * 3.14159265358979323846 / dims.image_views;
      const double ct = std::cos(theta), st = std::sin(theta);
      for (std::uint32_t c = 0; c < dims.image_channels; ++c) {
        const double wl = wavelength_[c];
        const double sx = sigma * wl * std::exp(ecc);
        const double sy = sigma * wl * std::exp(-ecc);
        const double a = amp * gain_[v * dims.image_channels + c] *
                         std::exp(-static_cast<double>(c) *
                                  (0.3 + 0.6 * drive));
        for (std::uint32_t i = 0; i < dims.image_h; ++i) {
          const double y =
              (static_cast<double>(i) - 0.5 * (dims.image_h - 1)) /
              dims.image_h - cy;
          for (std::uint32_t j = 0; j < dims.image_w; ++j) {
            const double x =
                (static_cast<double>(j) - 0.5 * (dims.image_w - 1)) /
                dims.image_w - cx;
            const double xr = ct * x + st * y;
            const double yr = -st * x + ct * y;
            const double val =
                a * std::exp(-0.5 * (xr * xr / (sx * sx) +
                                     yr * yr / (sy * sy)));
            out[k++] = static_cast<float>(val);
          }
        }
      }
    }
  }

  void apply_noise(std::span<const double> p, data::SampleRecord& rec) const {
    // Noise is seeded from the parameter bits so a sample is still a pure
    // function of (spec, params).
    std::uint64_t h = spec_.spec_seed;
    for (double v : p)
      h = mix_seed({h, std::bit_cast<std::uint64_t>(v)});
    Rng rng(h);
    for (std::uint32_t s = 0; s < spec_.dims.scalar_dim; ++s)
      rec.outputs[s] += static_cast<float>(spec_.noise_level * rng.normal());
    for (std::size_t i = spec_.dims.scalar_dim; i < rec.outputs.size(); ++i) {
      const double noisy =
          rec.outputs[i] + spec_.noise_level * 0.5 * rng.normal();
      rec.outputs[i] = static_cast<float>(noisy > 0.0 ? noisy : 0.0);
    }
  }

  GeneratorSpec spec_;
  std::vector<double> scalar_coeffs_;
  std::vector<double> gain_;
  std::vector<double> wavelength_;
};

/// Side length of the smallest 5-D grid holding at least n points.
inline std::uint32_t grid_side(std::uint64_t n) {
  std::uint32_t g = 1;
  while (static_cast<std::uint64_t>(g) * g * g * g * g < n) ++g;
  return g;
}

/// Input parameters of sweep point i on a g^5 lexicographic grid (first
/// coordinate slowest), cell-centered, with seeded sub-cell jitter.
inline std::array<double, 5> sweep_point(std::uint64_t i, std::uint32_t g,
                                         std::uint64_t sampling_seed) {
  std::array<double, 5> p{};
  std::uint64_t rem = i;
  for (int k = 4; k >= 0; --k) {
    p[static_cast<std::size_t>(k)] = static_cast<double>(rem % g);
    rem /= g;
  }
  Rng rng(mix_seed({sampling_seed, i, 0x9e37ULL}));
  for (int k = 0; k < 5; ++k) {
    const double jitter = rng.uniform(-0.4, 0.4);
    p[static_cast<std::size_t>(k)] =
        (p[static_cast<std::size_t>(k)] + 0.5 + jitter) / g;
  }
  return p;
}

/// Materializes n samples in sweep order. The order is deliberately the
/// structured grid sweep, so consecutive (and therefore same-file) samples
/// cover only a sliver of the input space.
inline std::vector<data::SampleRecord> generate_dataset(
    const SynthGenerator& gen, std::uint64_t n, std::uint64_t sampling_seed) {
  if (n < 1) throw ContractError("generate_dataset: n must be >= 1");
  const std::uint32_t g = grid_side(n);
  std::vector<data::SampleRecord> records;
  records.reserve(n);
  for (std::uint64_t i = 0; i < n; ++i) {
    const auto p = sweep_point(i, g, sampling_seed);
    records.push_back(gen.sample(p));
  }
  return records;
}

}  // namespace ltfb::synth
