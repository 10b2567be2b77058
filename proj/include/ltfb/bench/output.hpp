// Copyright (c) 2026 The ltfb authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>

#include "ltfb/bench/config.hpp"
#include "ltfb/surrogate/checkpoint.hpp"
#include "ltfb/train/history.hpp"

// Run directory layout:
//   config.json   resolved configuration + its hash (self-describing runs)
//   events.jsonl  every history record, one JSON object per line
//   summary.csv   per-trainer final figures; deterministic fields only, so
//                 a single-threaded replay reproduces it byte for byte
//   timings.csv   per-epoch wall-clock and counters (never replay-compared)
//   best_model.bin  checkpoint of the selected model

namespace ltfb::bench {

/// Shortest exact decimal for a double ("%.17g" round-trips bit-exactly).
inline std::string fmt_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

inline std::string events_jsonl(const train::RunHistory& h) {
  std::string out;
  auto emit = [&](const json& j) {
    out += j.dump();
    out += '\n';
  };

  emit(json{{"type", "run_start"},
            {"config_hash", h.config_hash},
            {"mode", h.mode},
            {"trainers", h.n_trainers}});
  for (const auto& r : h.pretrain)
    emit(json{{"type", "pretrain"}, {"step", r.step}, {"loss", r.loss}});
  for (const auto& r : h.steps)
    emit(json{{"type", "step"},
              {"trainer", r.trainer},
              {"step", r.step},
              {"epoch", r.epoch},
              {"d_loss", r.d_loss},
              {"g_total", r.g_total},
              {"g_fwd", r.g_fwd},
              {"g_adv", r.g_adv},
              {"g_cyc", r.g_cyc},
              {"skipped", r.skipped}});
  for (const auto& r : h.evals)
    emit(json{{"type", "eval"},
              {"trainer", r.trainer},
              {"step", r.step},
              {"slice", r.slice},
              {"forward_mae", r.forward_mae},
              {"inverse_mae", r.inverse_mae},
              {"combined", r.combined}});
  for (const auto& r : h.epochs)
    emit(json{{"type", "epoch"},
              {"trainer", r.trainer},
              {"epoch", r.epoch},
              {"steps", r.steps},
              {"files_opened", r.files_opened},
              {"bytes_read", r.bytes_read},
              {"samples_shuffled", r.samples_shuffled},
              {"seconds", r.seconds},
              {"partial", r.partial}});
  for (const auto& r : h.rounds) {
    json pairs = json::array();
    for (const auto& p : r.pairs) pairs.push_back({p[0], p[1]});
    emit(json{{"type", "round"},
              {"round", r.round},
              {"step", r.step},
              {"pairs", pairs},
              {"bye", r.bye}});
  }
  for (const auto& r : h.trainer_rounds)
    emit(json{{"type", "trainer_round"},
              {"round", r.round},
              {"step", r.step},
              {"trainer", r.trainer},
              {"peer", r.peer},
              {"local_metric", r.local_metric},
              {"incoming_metric", r.incoming_metric},
              {"winner", r.kept_incoming ? "incoming" : "local"},
              {"disc_hash", r.disc_hash}});
  for (const auto& r : h.transfers)
    emit(json{{"type", "transfer"},
              {"round", r.round},
              {"from", r.from_trainer},
              {"to", r.to_trainer},
              {"payload", r.payload},
              {"bytes", r.bytes},
              {"blob_hash", r.blob_hash}});
  emit(json{{"type", "run_end"},
            {"best_trainer", h.best_trainer},
            {"best_forward_mae", h.best_metric.forward_mae},
            {"best_inverse_mae", h.best_metric.inverse_mae},
            {"best_combined", h.best_metric.combined}});
  return out;
}

inline std::string summary_csv(const train::RunHistory& h) {
  std::string out =
      "config_hash,mode,n_trainers,trainer,steps,epochs_completed,"
      "final_d_loss,final_g_total,final_g_fwd,final_g_adv,final_g_cyc,"
      "final_val_forward_mae,final_val_inverse_mae,final_val_combined,"
      "rounds,incoming_adopted,files_opened,bytes_read,samples_shuffled,"
      "skipped_steps,is_best\n";
  for (const auto& s : h.summaries) {
    out += h.config_hash + "," + h.mode + "," +
           std::to_string(h.n_trainers) + "," + std::to_string(s.trainer) +
           "," + std::to_string(s.steps) + "," +
           std::to_string(s.epochs_completed) + "," +
           fmt_double(s.final_d_loss) + "," + fmt_double(s.final_g_total) +
           "," + fmt_double(s.final_g_fwd) + "," + fmt_double(s.final_g_adv) +
           "," + fmt_double(s.final_g_cyc) + "," +
           fmt_double(s.final_val_forward_mae) + "," +
           fmt_double(s.final_val_inverse_mae) + "," +
           fmt_double(s.final_val_combined) + "," + std::to_string(s.rounds) +
           "," + std::to_string(s.incoming_adopted) + "," +
           std::to_string(s.files_opened) + "," +
           std::to_string(s.bytes_read) + "," +
           std::to_string(s.samples_shuffled) + "," +
           std::to_string(s.skipped_steps) + "," +
           (s.is_best ? "1" : "0") + "\n";
  }
  return out;
}

inline std::string timings_csv(const train::RunHistory& h) {
  std::string out =
      "trainer,epoch,steps,seconds,files_opened,bytes_read,"
      "samples_shuffled,partial\n";
  for (const auto& e : h.epochs)
    out += std::to_string(e.trainer) + "," + std::to_string(e.epoch) + "," +
           std::to_string(e.steps) + "," + fmt_double(e.seconds) + "," +
           std::to_string(e.files_opened) + "," +
           std::to_string(e.bytes_read) + "," +
           std::to_string(e.samples_shuffled) + "," +
           (e.partial ? "1" : "0") + "\n";
  return out;
}

inline void write_text_file(const std::filesystem::path& path,
                            const std::string& content) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw IoError("cannot open " + path.string() + " for writing");
  os.write(content.data(),
           static_cast<std::streamsize>(content.size()));
  if (!os) throw IoError("write failure on " + path.string());
}

/// Writes the whole run directory.
inline void write_run_outputs(const std::filesystem::path& out_dir,
                              const tournament::RunConfig& resolved,
                              const train::RunHistory& history,
                              const surrogate::CycleGan<float>* best_model) {
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec && !std::filesystem::exists(out_dir))
    throw IoError("cannot create output directory " + out_dir.string());

  json cfg_json = to_json(resolved);
  cfg_json["config_hash"] = history.config_hash;
  write_text_file(out_dir / "config.json", cfg_json.dump(2) + "\n");
  write_text_file(out_dir / "events.jsonl", events_jsonl(history));
  write_text_file(out_dir / "summary.csv", summary_csv(history));
  write_text_file(out_dir / "timings.csv", timings_csv(history));
  if (best_model) surrogate::save_model(out_dir / "best_model.bin", *best_model);
}

}  // namespace ltfb::bench
