// Copyright (c) 2026 The ltfb authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

// Umbrella header.

#include "ltfb/bench/config.hpp"
#include "ltfb/bench/datastore_bench.hpp"
#include "ltfb/bench/output.hpp"
#include "ltfb/core/binio.hpp"
#include "ltfb/core/error.hpp"
#include "ltfb/core/hash.hpp"
#include "ltfb/core/rng.hpp"
#include "ltfb/data/bundle.hpp"
#include "ltfb/data/epoch_plan.hpp"
#include "ltfb/data/sample.hpp"
#include "ltfb/data/store.hpp"
#include "ltfb/nn/activation.hpp"
#include "ltfb/nn/adam.hpp"
#include "ltfb/nn/loss.hpp"
#include "ltfb/nn/mlp.hpp"
#include "ltfb/nn/tensor.hpp"
#include "ltfb/surrogate/checkpoint.hpp"
#include "ltfb/surrogate/dims.hpp"
#include "ltfb/surrogate/model.hpp"
#include "ltfb/surrogate/train_ops.hpp"
#include "ltfb/synth/generator.hpp"
#include "ltfb/tournament/ltfb.hpp"
#include "ltfb/tournament/runner.hpp"
#include "ltfb/train/allreduce.hpp"
#include "ltfb/train/history.hpp"
#include "ltfb/train/trainer.hpp"
