// Copyright (c) 2026 The ltfb authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <string>

#include "ltfb/nn/loss.hpp"
#include "ltfb/surrogate/model.hpp"

// Training steps for the surrogate. The *_backward functions compute
// gradients without touching any parameter, which is what the data-parallel
// trainer aggregates across shards; the *_step functions are the
// single-worker convenience that applies one Adam update.

namespace ltfb::surrogate {

/// Validation/tournament score. `combined` is the comparison scalar; lower
/// is better. The adversarial term is deliberately not part of it.
struct EvalMetric {
  double forward_mae = 0;
  double inverse_mae = 0;
  double combined = 0;
};

struct GenLosses {
  double total = 0;
  double fwd = 0;
  double adv = 0;
  double cyc = 0;
};

namespace detail {
template <typename T>
void check_xy(const CycleGan<T>& m, const nn::Tensor<T>* x,
              const nn::Tensor<T>* y) {
  if (x && x->cols() != m.dims.input_dim)
    throw DimensionError("batch input width " + std::to_string(x->cols()) +
                         " does not match input_dim " +
                         std::to_string(m.dims.input_dim));
  if (y && y->cols() != m.dims.output_dim())
    throw DimensionError("batch output width " + std::to_string(y->cols()) +
                         " does not match output_dim " +
                         std::to_string(m.dims.output_dim()));
  if (x && y && x->rows() != y->rows())
    throw DimensionError("x and y row counts differ");
}
}  // namespace detail

/// Reconstruction loss MAE(dec(enc(y)), y) and its gradients for the
/// autoencoder pre-training phase.
template <typename T>
double autoencoder_backward(const CycleGan<T>& m, const nn::Tensor<T>& y,
                            nn::MlpParams<T>* enc_grads,
                            nn::MlpParams<T>* dec_grads) {
  detail::check_xy(m, static_cast<const nn::Tensor<T>*>(nullptr), &y);
  auto enc_tape = nn::mlp_forward(m.enc_spec, m.enc, y);
  auto dec_tape = nn::mlp_forward(m.dec_spec, m.dec, enc_tape.output());
  auto mae = nn::mae_loss(dec_tape.output(), y);
  auto dec_back = nn::mlp_backward(m.dec_spec, m.dec, dec_tape, mae.grad);
  auto enc_back =
      nn::mlp_backward(m.enc_spec, m.enc, enc_tape, dec_back.grad_input);
  if (enc_grads) *enc_grads = std::move(enc_back.param_grads);
  if (dec_grads) *dec_grads = std::move(dec_back.param_grads);
  return mae.value;
}

/// One Adam step on enc and dec. Only valid while the autoencoder is
/// unfrozen (the pre-training phase).
template <typename T>
double autoencoder_step(CycleGan<T>& m, const nn::Tensor<T>& y) {
  if (m.autoencoder_frozen)
    throw ContractError("autoencoder_step: autoencoder is frozen");
  nn::MlpParams<T> eg, dg;
  const double loss = autoencoder_backward(m, y, &eg, &dg);
  if (!std::isfinite(loss))
    throw NumericError("autoencoder_step: non-finite loss");
  nn::adam_step(m.enc, eg, m.enc_opt);
  nn::adam_step(m.dec, dg, m.dec_opt);
  return loss;
}

/// Generator losses and gradients:
///   total = MAE(dec(fwd(x)), y)                 (forward prediction)
///         + lambda_adv * (-mean log D(fwd(x)))  (non-saturating adversarial)
///         + lambda_cyc * MAE(inv(fwd(x)), x)    (cycle consistency)
/// Gradients flow into fwd and inv only; enc/dec/disc stay untouched.
template <typename T>
GenLosses generator_backward(const CycleGan<T>& m, const nn::Tensor<T>& x,
                             const nn::Tensor<T>& y,
                             nn::MlpParams<T>* fwd_grads,
                             nn::MlpParams<T>* inv_grads) {
  detail::check_xy(m, &x, &y);
  GenLosses losses;

  auto fwd_tape = nn::mlp_forward(m.fwd_spec, m.fwd, x);
  const nn::Tensor<T>& latent = fwd_tape.output();

  // Forward-prediction path through the frozen decoder.
  auto dec_tape = nn::mlp_forward(m.dec_spec, m.dec, latent);
  auto fwd_mae = nn::mae_loss(dec_tape.output(), y);
  losses.fwd = fwd_mae.value;
  auto dec_back = nn::mlp_backward(m.dec_spec, m.dec, dec_tape, fwd_mae.grad);
  nn::Tensor<T> grad_latent = std::move(dec_back.grad_input);

  // Adversarial path: push D(fwd(x)) toward the "real" label.
  auto disc_tape = nn::mlp_forward(m.disc_spec, m.disc, latent);
  auto probs = nn::sigmoid(disc_tape.output());
  nn::Tensor<T> ones(probs.shape);
  ones.fill(T{1});
  auto adv = nn::bce_loss(probs, ones);
  losses.adv = adv.value;
  for (std::size_t i = 0; i < adv.grad.size(); ++i)
    adv.grad[i] *= m.lambda_adv;
  auto disc_back = nn::mlp_backward(m.disc_spec, m.disc, disc_tape, adv.grad);
  for (std::size_t i = 0; i < grad_latent.size(); ++i)
    grad_latent[i] += disc_back.grad_input[i];

  // Cycle path back to the inputs.
  auto inv_tape = nn::mlp_forward(m.inv_spec, m.inv, latent);
  auto cyc = nn::mae_loss(inv_tape.output(), x);
  losses.cyc = cyc.value;
  for (std::size_t i = 0; i < cyc.grad.size(); ++i)
    cyc.grad[i] *= m.lambda_cyc;
  auto inv_back = nn::mlp_backward(m.inv_spec, m.inv, inv_tape, cyc.grad);
  for (std::size_t i = 0; i < grad_latent.size(); ++i)
    grad_latent[i] += inv_back.grad_input[i];

  auto fwd_back = nn::mlp_backward(m.fwd_spec, m.fwd, fwd_tape, grad_latent);

  if (fwd_grads) *fwd_grads = std::move(fwd_back.param_grads);
  if (inv_grads) *inv_grads = std::move(inv_back.param_grads);
  losses.total = losses.fwd + static_cast<double>(m.lambda_adv) * losses.adv +
                 static_cast<double>(m.lambda_cyc) * losses.cyc;
  return losses;
}

/// One Adam step on fwd and inv. Requires the frozen autoencoder.
template <typename T>
GenLosses generator_step(CycleGan<T>& m, const nn::Tensor<T>& x,
                         const nn::Tensor<T>& y) {
  if (!m.autoencoder_frozen)
    throw ContractError("generator_step: autoencoder must be frozen first");
  nn::MlpParams<T> fg, ig;
  const GenLosses losses = generator_backward(m, x, y, &fg, &ig);
  if (!std::isfinite(losses.total))
    throw NumericError("generator_step: non-finite loss");
  nn::adam_step(m.fwd, fg, m.fwd_opt);
  nn::adam_step(m.inv, ig, m.inv_opt);
  return losses;
}

/// Discriminator loss: BCE over the stacked batch of real latents enc(y)
/// (label 1) and fake latents fwd(x) (label 0). Gradients only for disc.
template <typename T>
double discriminator_backward(const CycleGan<T>& m, const nn::Tensor<T>& x,
                              const nn::Tensor<T>& y,
                              nn::MlpParams<T>* disc_grads) {
  detail::check_xy(m, &x, &y);
  auto real = nn::mlp_apply(m.enc_spec, m.enc, y);
  auto fake = nn::mlp_apply(m.fwd_spec, m.fwd, x);
  auto stacked = nn::vstack(real, fake);

  auto disc_tape = nn::mlp_forward(m.disc_spec, m.disc, stacked);
  auto probs = nn::sigmoid(disc_tape.output());
  nn::Tensor<T> labels(probs.shape);
  for (std::size_t i = 0; i < real.rows(); ++i) labels[i] = T{1};
  auto bce = nn::bce_loss(probs, labels);
  auto disc_back = nn::mlp_backward(m.disc_spec, m.disc, disc_tape, bce.grad);
  if (disc_grads) *disc_grads = std::move(disc_back.param_grads);
  return bce.value;
}

template <typename T>
double discriminator_step(CycleGan<T>& m, const nn::Tensor<T>& x,
                          const nn::Tensor<T>& y) {
  if (!m.autoencoder_frozen)
    throw ContractError(
        "discriminator_step: autoencoder must be frozen first");
  nn::MlpParams<T> dg;
  const double loss = discriminator_backward(m, x, y, &dg);
  if (!std::isfinite(loss))
    throw NumericError("discriminator_step: non-finite loss");
  nn::adam_step(m.disc, dg, m.disc_opt);
  return loss;
}

/// Deterministic evaluation on a data slice:
///   forward_mae = MAE(dec(fwd(x)), y), inverse_mae = MAE(inv(fwd(x)), x),
///   combined = w_f * forward_mae + w_i * inverse_mae.
template <typename T>
EvalMetric evaluate(const CycleGan<T>& m, const nn::Tensor<T>& x,
                    const nn::Tensor<T>& y, double w_f = 1.0,
                    double w_i = 1.0) {
  if (x.rows() == 0) throw ContractError("evaluate: empty data slice");
  detail::check_xy(m, &x, &y);
  auto latent = nn::mlp_apply(m.fwd_spec, m.fwd, x);
  auto predicted = nn::mlp_apply(m.dec_spec, m.dec, latent);
  auto recovered = nn::mlp_apply(m.inv_spec, m.inv, latent);
  EvalMetric metric;
  metric.forward_mae = nn::mae_value(predicted, y);
  metric.inverse_mae = nn::mae_value(recovered, x);
  metric.combined = w_f * metric.forward_mae + w_i * metric.inverse_mae;
  return metric;
}

}  // namespace ltfb::surrogate
