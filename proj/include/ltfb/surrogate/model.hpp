// Copyright (c) 2026 The ltfb authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <vector>

#include "ltfb/core/hash.hpp"
#include "ltfb/core/rng.hpp"
#include "ltfb/nn/adam.hpp"
#include "ltfb/nn/mlp.hpp"
#include "ltfb/surrogate/dims.hpp"

namespace ltfb::surrogate {

/// Hidden-layer widths and loss weights of the surrogate networks. The
/// boundary dimensions always come from ModalityDims.
struct SurrogateArch {
  std::vector<std::size_t> enc_hidden{64};
  std::vector<std::size_t> dec_hidden{64};
  std::vector<std::size_t> fwd_hidden{32, 32};
  std::vector<std::size_t> inv_hidden{32, 32};
  std::vector<std::size_t> disc_hidden{32, 32};
  nn::Activation hidden_act{nn::Act::kLeakyRelu, 0.2};
  double lambda_adv = 0.01;
  double lambda_cyc = 1.0;
  nn::AdamHyper adam;

  bool operator==(const SurrogateArch&) const = default;
};

/// The surrogate: an autoencoder (enc: outputs -> latent, dec: latent ->
/// outputs) pre-trained once and then frozen, a forward map fwd: inputs ->
/// latent, an inverse map inv: latent -> inputs, and a latent discriminator.
/// The discriminator network emits logits; the sigmoid lives in the loss.
template <typename T>
struct CycleGan {
  ModalityDims dims;

  nn::MlpSpec enc_spec, dec_spec, fwd_spec, inv_spec, disc_spec;
  nn::MlpParams<T> enc, dec, fwd, inv, disc;
  nn::AdamState<T> enc_opt, dec_opt, fwd_opt, inv_opt, disc_opt;

  T lambda_adv{};
  T lambda_cyc{};
  bool autoencoder_frozen = false;

  std::uint64_t enc_hash() const { return hash_blob(enc); }
  std::uint64_t dec_hash() const { return hash_blob(dec); }
  std::uint64_t fwd_hash() const { return hash_blob(fwd); }
  std::uint64_t inv_hash() const { return hash_blob(inv); }
  std::uint64_t disc_hash() const { return hash_blob(disc); }

  /// Hash over every network blob; equal across data-parallel replicas.
  std::uint64_t model_hash() const {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (const auto* p : {&enc, &dec, &fwd, &inv, &disc})
      for (std::size_t l = 0; l < p->weights.size(); ++l) {
        h = hash_span(std::span<const T>(p->weights[l].data), h);
        h = hash_span(std::span<const T>(p->biases[l].data), h);
      }
    return h;
  }

  static std::uint64_t hash_blob(const nn::MlpParams<T>& p) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (std::size_t l = 0; l < p.weights.size(); ++l) {
      h = hash_span(std::span<const T>(p.weights[l].data), h);
      h = hash_span(std::span<const T>(p.biases[l].data), h);
    }
    return h;
  }
};

namespace detail {
inline nn::MlpSpec make_spec(std::size_t in, std::size_t out,
                             const std::vector<std::size_t>& hidden,
                             nn::Activation hidden_act, std::uint64_t seed) {
  nn::MlpSpec spec;
  spec.layer_widths.push_back(in);
  for (std::size_t h : hidden) spec.layer_widths.push_back(h);
  spec.layer_widths.push_back(out);
  for (std::size_t l = 0; l + 1 < spec.layer_widths.size(); ++l)
    spec.activations.push_back(l + 2 < spec.layer_widths.size()
                                   ? hidden_act
                                   : nn::Activation{nn::Act::kIdentity});
  spec.init_seed = seed;
  spec.validate();
  return spec;
}
}  // namespace detail

/// Builds a freshly initialized model. Per-network init streams derive from
/// `seed`, so two models built with the same (dims, arch, seed) are
/// bit-identical.
template <typename T>
CycleGan<T> make_cyclegan(const ModalityDims& dims, const SurrogateArch& arch,
                          std::uint64_t seed) {
  dims.validate();
  CycleGan<T> m;
  m.dims = dims;
  m.lambda_adv = static_cast<T>(arch.lambda_adv);
  m.lambda_cyc = static_cast<T>(arch.lambda_cyc);

  m.enc_spec = detail::make_spec(dims.output_dim(), dims.latent_dim,
                                 arch.enc_hidden, arch.hidden_act,
                                 mix_seed({seed, 1}));
  m.dec_spec = detail::make_spec(dims.latent_dim, dims.output_dim(),
                                 arch.dec_hidden, arch.hidden_act,
                                 mix_seed({seed, 2}));
  m.fwd_spec = detail::make_spec(dims.input_dim, dims.latent_dim,
                                 arch.fwd_hidden, arch.hidden_act,
                                 mix_seed({seed, 3}));
  m.inv_spec = detail::make_spec(dims.latent_dim, dims.input_dim,
                                 arch.inv_hidden, arch.hidden_act,
                                 mix_seed({seed, 4}));
  m.disc_spec = detail::make_spec(dims.latent_dim, 1, arch.disc_hidden,
                                  arch.hidden_act, mix_seed({seed, 5}));

  m.enc = nn::init_params<T>(m.enc_spec);
  m.dec = nn::init_params<T>(m.dec_spec);
  m.fwd = nn::init_params<T>(m.fwd_spec);
  m.inv = nn::init_params<T>(m.inv_spec);
  m.disc = nn::init_params<T>(m.disc_spec);

  m.enc_opt = nn::AdamState<T>::for_params(m.enc, arch.adam);
  m.dec_opt = nn::AdamState<T>::for_params(m.dec, arch.adam);
  m.fwd_opt = nn::AdamState<T>::for_params(m.fwd, arch.adam);
  m.inv_opt = nn::AdamState<T>::for_params(m.inv, arch.adam);
  m.disc_opt = nn::AdamState<T>::for_params(m.disc, arch.adam);
  return m;
}

/// Re-initializes fwd/inv/disc (and their optimizer states) from a new seed
/// while keeping the shared autoencoder. Used to give each trainer its own
/// starting point after the encoder/decoder broadcast.
template <typename T>
void reinit_gan_nets(CycleGan<T>& m, std::uint64_t seed) {
  m.fwd_spec.init_seed = mix_seed({seed, 3});
  m.inv_spec.init_seed = mix_seed({seed, 4});
  m.disc_spec.init_seed = mix_seed({seed, 5});
  m.fwd = nn::init_params<T>(m.fwd_spec);
  m.inv = nn::init_params<T>(m.inv_spec);
  m.disc = nn::init_params<T>(m.disc_spec);
  m.fwd_opt = nn::AdamState<T>::for_params(m.fwd, m.fwd_opt.hyper);
  m.inv_opt = nn::AdamState<T>::for_params(m.inv, m.inv_opt.hyper);
  m.disc_opt = nn::AdamState<T>::for_params(m.disc, m.disc_opt.hyper);
}

}  // namespace ltfb::surrogate
