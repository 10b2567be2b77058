// Copyright (c) 2026 The ltfb authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "ltfb/core/hash.hpp"
#include "ltfb/tournament/runner.hpp"

// Experiment configuration as a flat key/value JSON document. Parsing is
// strict: unknown keys and type mismatches are all collected and reported
// together. The config hash covers every field that affects results;
// `threads` is excluded because scheduling never changes the arithmetic,
// which is what makes single-threaded replay of any run byte-exact.

namespace ltfb::bench {

using json = nlohmann::json;

inline json to_json(const tournament::RunConfig& cfg) {
  json j;
  j["data_dir"] = cfg.data_dir;
  j["generate"] = cfg.generate;
  j["gen_n"] = cfg.gen_n;
  j["samples_per_file"] = cfg.samples_per_file;
  j["sampling_seed"] = cfg.sampling_seed;
  j["spec_seed"] = cfg.spec_seed;
  j["noise_level"] = cfg.noise_level;

  j["input_dim"] = cfg.dims.input_dim;
  j["latent_dim"] = cfg.dims.latent_dim;
  j["scalar_dim"] = cfg.dims.scalar_dim;
  j["image_views"] = cfg.dims.image_views;
  j["image_channels"] = cfg.dims.image_channels;
  j["image_h"] = cfg.dims.image_h;
  j["image_w"] = cfg.dims.image_w;

  j["enc_hidden"] = cfg.arch.enc_hidden;
  j["dec_hidden"] = cfg.arch.dec_hidden;
  j["fwd_hidden"] = cfg.arch.fwd_hidden;
  j["inv_hidden"] = cfg.arch.inv_hidden;
  j["disc_hidden"] = cfg.arch.disc_hidden;
  j["hidden_act"] = nn::act_name(cfg.arch.hidden_act.kind);
  j["leaky_slope"] = cfg.arch.hidden_act.slope;
  j["lambda_adv"] = cfg.arch.lambda_adv;
  j["lambda_cyc"] = cfg.arch.lambda_cyc;
  j["lr"] = cfg.arch.adam.lr;
  j["beta1"] = cfg.arch.adam.beta1;
  j["beta2"] = cfg.arch.adam.beta2;
  j["adam_eps"] = cfg.arch.adam.eps;

  j["mode"] = tournament::run_mode_name(cfg.mode);
  j["trainers"] = cfg.trainers;
  j["shards"] = cfg.shards;
  j["batch_size"] = cfg.batch_size;
  j["interval"] = cfg.interval;
  j["step_budget"] = cfg.step_budget;
  j["ae_steps"] = cfg.ae_steps;
  j["data_store"] = data::store_mode_name(cfg.store_mode);
  j["threads"] = cfg.threads;
  j["seed"] = cfg.seed;
  j["validation_fraction"] = cfg.validation_fraction;
  j["tournament_fraction"] = cfg.tournament_fraction;
  j["lr_jitter"] = cfg.lr_jitter;
  j["store_budget_mb"] = cfg.store_budget_mb;
  j["numeric_abort_threshold"] = cfg.numeric_abort_threshold;
  j["prefetch_depth"] = cfg.prefetch_depth;
  j["w_forward"] = cfg.w_f;
  j["w_inverse"] = cfg.w_i;
  return j;
}

inline tournament::RunConfig config_from_json(const json& j) {
  if (!j.is_object())
    throw ConfigError("config root must be a JSON object");
  tournament::RunConfig cfg;
  std::vector<std::string> errors;

  auto take = [&](const char* key, auto&& setter) {
    const auto it = j.find(key);
    if (it == j.end()) return;
    try {
      setter(*it);
    } catch (const std::exception& e) {
      errors.push_back(std::string(key) + " (" + e.what() + ")");
    }
  };

  take("data_dir", [&](const json& v) { cfg.data_dir = v.get<std::string>(); });
  take("generate", [&](const json& v) { cfg.generate = v.get<bool>(); });
  take("gen_n", [&](const json& v) { cfg.gen_n = v.get<std::uint64_t>(); });
  take("samples_per_file",
       [&](const json& v) { cfg.samples_per_file = v.get<std::uint32_t>(); });
  take("sampling_seed",
       [&](const json& v) { cfg.sampling_seed = v.get<std::uint64_t>(); });
  take("spec_seed",
       [&](const json& v) { cfg.spec_seed = v.get<std::uint64_t>(); });
  take("noise_level",
       [&](const json& v) { cfg.noise_level = v.get<double>(); });

  take("input_dim",
       [&](const json& v) { cfg.dims.input_dim = v.get<std::uint32_t>(); });
  take("latent_dim",
       [&](const json& v) { cfg.dims.latent_dim = v.get<std::uint32_t>(); });
  take("scalar_dim",
       [&](const json& v) { cfg.dims.scalar_dim = v.get<std::uint32_t>(); });
  take("image_views",
       [&](const json& v) { cfg.dims.image_views = v.get<std::uint32_t>(); });
  take("image_channels", [&](const json& v) {
    cfg.dims.image_channels = v.get<std::uint32_t>();
  });
  take("image_h",
       [&](const json& v) { cfg.dims.image_h = v.get<std::uint32_t>(); });
  take("image_w",
       [&](const json& v) { cfg.dims.image_w = v.get<std::uint32_t>(); });

  auto widths = [&](const json& v) {
    return v.get<std::vector<std::size_t>>();
  };
  take("enc_hidden", [&](const json& v) { cfg.arch.enc_hidden = widths(v); });
  take("dec_hidden", [&](const json& v) { cfg.arch.dec_hidden = widths(v); });
  take("fwd_hidden", [&](const json& v) { cfg.arch.fwd_hidden = widths(v); });
  take("inv_hidden", [&](const json& v) { cfg.arch.inv_hidden = widths(v); });
  take("disc_hidden",
       [&](const json& v) { cfg.arch.disc_hidden = widths(v); });
  take("hidden_act", [&](const json& v) {
    cfg.arch.hidden_act.kind = nn::act_from_name(v.get<std::string>());
  });
  take("leaky_slope",
       [&](const json& v) { cfg.arch.hidden_act.slope = v.get<double>(); });
  take("lambda_adv",
       [&](const json& v) { cfg.arch.lambda_adv = v.get<double>(); });
  take("lambda_cyc",
       [&](const json& v) { cfg.arch.lambda_cyc = v.get<double>(); });
  take("lr", [&](const json& v) { cfg.arch.adam.lr = v.get<double>(); });
  take("beta1", [&](const json& v) { cfg.arch.adam.beta1 = v.get<double>(); });
  take("beta2", [&](const json& v) { cfg.arch.adam.beta2 = v.get<double>(); });
  take("adam_eps",
       [&](const json& v) { cfg.arch.adam.eps = v.get<double>(); });

  take("mode", [&](const json& v) {
    cfg.mode = tournament::run_mode_from_name(v.get<std::string>());
  });
  take("trainers", [&](const json& v) { cfg.trainers = v.get<int>(); });
  take("shards", [&](const json& v) { cfg.shards = v.get<int>(); });
  take("batch_size",
       [&](const json& v) { cfg.batch_size = v.get<std::size_t>(); });
  take("interval",
       [&](const json& v) { cfg.interval = v.get<std::uint64_t>(); });
  take("step_budget",
       [&](const json& v) { cfg.step_budget = v.get<std::uint64_t>(); });
  take("ae_steps",
       [&](const json& v) { cfg.ae_steps = v.get<std::uint64_t>(); });
  take("data_store", [&](const json& v) {
    cfg.store_mode = data::store_mode_from_name(v.get<std::string>());
  });
  take("threads", [&](const json& v) { cfg.threads = v.get<int>(); });
  take("seed", [&](const json& v) { cfg.seed = v.get<std::uint64_t>(); });
  take("validation_fraction",
       [&](const json& v) { cfg.validation_fraction = v.get<double>(); });
  take("tournament_fraction",
       [&](const json& v) { cfg.tournament_fraction = v.get<double>(); });
  take("lr_jitter",
       [&](const json& v) { cfg.lr_jitter = v.get<double>(); });
  take("store_budget_mb",
       [&](const json& v) { cfg.store_budget_mb = v.get<std::size_t>(); });
  take("numeric_abort_threshold", [&](const json& v) {
    cfg.numeric_abort_threshold = v.get<int>();
  });
  take("prefetch_depth",
       [&](const json& v) { cfg.prefetch_depth = v.get<int>(); });
  take("w_forward", [&](const json& v) { cfg.w_f = v.get<double>(); });
  take("w_inverse", [&](const json& v) { cfg.w_i = v.get<double>(); });

  static const char* known[] = {
      "data_dir", "generate", "gen_n", "samples_per_file", "sampling_seed",
      "spec_seed", "noise_level", "input_dim", "latent_dim", "scalar_dim",
      "image_views", "image_channels", "image_h", "image_w", "enc_hidden",
      "dec_hidden", "fwd_hidden", "inv_hidden", "disc_hidden", "hidden_act",
      "leaky_slope", "lambda_adv", "lambda_cyc", "lr", "beta1", "beta2",
      "adam_eps", "mode", "trainers", "shards", "batch_size", "interval",
      "step_budget", "ae_steps", "data_store", "threads", "seed",
      "validation_fraction", "tournament_fraction", "lr_jitter",
      "store_budget_mb", "numeric_abort_threshold", "prefetch_depth",
      "w_forward", "w_inverse"};
  for (const auto& [key, value] : j.items()) {
    bool found = false;
    for (const char* k : known)
      if (key == k) {
        found = true;
        break;
      }
    if (!found) errors.push_back(key + " (unknown key)");
  }

  if (!errors.empty()) {
    std::string msg = "invalid config keys:";
    for (const auto& e : errors) msg += " " + e + ";";
    throw ConfigError(msg);
  }
  return cfg;
}

/// Hash of the resolved config, excluding fields that cannot change
/// results (threads).
inline std::string config_hash(const tournament::RunConfig& cfg) {
  json j = to_json(cfg);
  j.erase("threads");
  const std::string canonical = j.dump();
  return hex64(fnv1a64(canonical.data(), canonical.size()));
}

}  // namespace ltfb::bench
