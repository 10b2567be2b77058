// Copyright (c) 2026 The ltfb authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <filesystem>
#include <fstream>
#include <string>

#include "ltfb/core/binio.hpp"
#include "ltfb/surrogate/model.hpp"

// Weight checkpoint: "LBCK" magic, version, ModalityDims header, loss
// weights, then per network (enc, dec, fwd, inv, disc) its layer manifest
// and flat float32 parameter blob, all little-endian. Round-trips are
// bit-exact. Optimizer state is deliberately not stored; a reloaded model
// starts with fresh moments.

namespace ltfb::surrogate {

inline constexpr char kCheckpointMagic[4] = {'L', 'B', 'C', 'K'};
inline constexpr std::uint32_t kCheckpointVersion = 1;

namespace detail {

inline void write_spec(std::ostream& os, const nn::MlpSpec& spec) {
  put_u32(os, static_cast<std::uint32_t>(spec.layer_widths.size()));
  for (std::size_t w : spec.layer_widths)
    put_u32(os, static_cast<std::uint32_t>(w));
  for (const nn::Activation& a : spec.activations) {
    put_u32(os, static_cast<std::uint32_t>(a.kind));
    put_f64(os, a.slope);
  }
  put_u64(os, spec.init_seed);
}

inline nn::MlpSpec read_spec(std::istream& is, const std::string& ctx) {
  nn::MlpSpec spec;
  const std::uint32_t n_widths = get_u32(is, ctx);
  if (n_widths < 2 || n_widths > 1024)
    throw IoError("corrupt checkpoint (layer count) in " + ctx);
  for (std::uint32_t i = 0; i < n_widths; ++i)
    spec.layer_widths.push_back(get_u32(is, ctx));
  for (std::uint32_t i = 0; i + 1 < n_widths; ++i) {
    nn::Activation a;
    a.kind = static_cast<nn::Act>(get_u32(is, ctx));
    a.slope = get_f64(is, ctx);
    spec.activations.push_back(a);
  }
  spec.init_seed = get_u64(is, ctx);
  spec.validate();
  return spec;
}

inline void write_net(std::ostream& os, const nn::MlpSpec& spec,
                      const nn::MlpParams<float>& params) {
  write_spec(os, spec);
  const std::vector<float> blob = params.flatten();
  put_u64(os, blob.size());
  for (float v : blob) put_f32(os, v);
}

inline void read_net(std::istream& is, const std::string& ctx,
                     nn::MlpSpec& spec, nn::MlpParams<float>& params) {
  spec = read_spec(is, ctx);
  const std::uint64_t count = get_u64(is, ctx);
  const nn::BlobManifest manifest = nn::manifest_for(spec);
  if (count != manifest.total)
    throw IoError("checkpoint blob length does not match manifest in " + ctx);
  std::vector<float> blob(count);
  for (std::uint64_t i = 0; i < count; ++i) blob[i] = get_f32(is, ctx);
  params = nn::MlpParams<float>::unflatten(spec, blob);
}

inline void write_dims(std::ostream& os, const ModalityDims& d) {
  put_u32(os, d.input_dim);
  put_u32(os, d.latent_dim);
  put_u32(os, d.scalar_dim);
  put_u32(os, d.image_views);
  put_u32(os, d.image_channels);
  put_u32(os, d.image_h);
  put_u32(os, d.image_w);
}

inline ModalityDims read_dims(std::istream& is, const std::string& ctx) {
  ModalityDims d;
  d.input_dim = get_u32(is, ctx);
  d.latent_dim = get_u32(is, ctx);
  d.scalar_dim = get_u32(is, ctx);
  d.image_views = get_u32(is, ctx);
  d.image_channels = get_u32(is, ctx);
  d.image_h = get_u32(is, ctx);
  d.image_w = get_u32(is, ctx);
  d.validate();
  return d;
}

}  // namespace detail

inline void save_model(const std::filesystem::path& path,
                       const CycleGan<float>& model) {
  const std::filesystem::path tmp = path.string() + ".tmp";
  {
    std::ofstream os(tmp, std::ios::binary);
    if (!os) throw IoError("cannot open " + tmp.string() + " for writing");
    os.write(kCheckpointMagic, 4);
    put_u32(os, kCheckpointVersion);
    detail::write_dims(os, model.dims);
    put_f64(os, static_cast<double>(model.lambda_adv));
    put_f64(os, static_cast<double>(model.lambda_cyc));
    detail::write_net(os, model.enc_spec, model.enc);
    detail::write_net(os, model.dec_spec, model.dec);
    detail::write_net(os, model.fwd_spec, model.fwd);
    detail::write_net(os, model.inv_spec, model.inv);
    detail::write_net(os, model.disc_spec, model.disc);
    if (!os) throw IoError("write failure on " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec)
    throw IoError("cannot move checkpoint into place at " + path.string() +
                  ": " + ec.message());
}

inline CycleGan<float> load_model(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw IoError("cannot open checkpoint " + path.string());
  const std::string ctx = path.string();
  char magic[4];
  is.read(magic, 4);
  if (!is || std::string(magic, 4) != std::string(kCheckpointMagic, 4))
    throw IoError("bad checkpoint magic in " + ctx);
  if (get_u32(is, ctx) != kCheckpointVersion)
    throw IoError("unsupported checkpoint version in " + ctx);

  CycleGan<float> m;
  m.dims = detail::read_dims(is, ctx);
  m.lambda_adv = static_cast<float>(get_f64(is, ctx));
  m.lambda_cyc = static_cast<float>(get_f64(is, ctx));
  detail::read_net(is, ctx, m.enc_spec, m.enc);
  detail::read_net(is, ctx, m.dec_spec, m.dec);
  detail::read_net(is, ctx, m.fwd_spec, m.fwd);
  detail::read_net(is, ctx, m.inv_spec, m.inv);
  detail::read_net(is, ctx, m.disc_spec, m.disc);

  nn::AdamHyper hyper;
  m.enc_opt = nn::AdamState<float>::for_params(m.enc, hyper);
  m.dec_opt = nn::AdamState<float>::for_params(m.dec, hyper);
  m.fwd_opt = nn::AdamState<float>::for_params(m.fwd, hyper);
  m.inv_opt = nn::AdamState<float>::for_params(m.inv, hyper);
  m.disc_opt = nn::AdamState<float>::for_params(m.disc, hyper);
  m.autoencoder_frozen = true;
  return m;
}

}  // namespace ltfb::surrogate
