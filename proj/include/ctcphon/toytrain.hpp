// Copyright 2026 The ctcphon Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "ctcphon/core.hpp"
#include "ctcphon/ctc.hpp"
#include "ctcphon/schedule.hpp"

namespace ctcphon::toy {

struct SyntheticTask {
  std::uint64_t seed = 1;
  std::size_t num_utterances = 2560;
  std::size_t feature_dim = 16;  // D_in
  std::size_t phonemes = 5;      // V - 1
  std::size_t min_labels = 2;
  std::size_t max_labels = 6;
  std::size_t min_frames_per_label = 2;
  std::size_t max_frames_per_label = 4;
  double noise = 0.12;  // std-dev of additive Gaussian feature noise
};

struct Example {
  Matrix features;  // T x D_in
  PhonemeSequence labels;
};

/// Each utterance is a label sequence without adjacent repeats; label k
/// emits a run of frames equal to the one-hot vector e_{k-1} plus noise.
/// Deterministic for a given seed.
std::vector<Example> generate_synthetic(const SyntheticTask& task);

/// x -> tanh(x We) -> tanh(. Wm) -> . Wh + bh
struct ToyModel {
  Matrix encoder;      // D_in x D_h, ParamGroup::kEncoder
  Matrix mid;          // D_h x D_h, ParamGroup::kTransformer
  Matrix head;         // D_h x V,   ParamGroup::kHead
  std::vector<double> head_bias;  // V, ParamGroup::kHead

  static ToyModel init(std::size_t d_in, std::size_t d_hidden, std::size_t classes,
                       std::uint64_t seed);

  std::size_t classes() const noexcept { return head.cols; }
  LogPosteriorGram forward(const Matrix& features) const;

  friend bool operator==(const ToyModel& a, const ToyModel& b) {
    return a.encoder.data == b.encoder.data && a.mid.data == b.mid.data &&
           a.head.data == b.head.data && a.head_bias == b.head_bias;
  }
};

struct ModelGradient {
  Matrix encoder, mid, head;
  std::vector<double> head_bias;
};

/// CTC loss of one example and its gradient with respect to every weight.
/// Groups outside `groups` get zero-sized gradients.
double loss_and_gradient(const ToyModel& model, const Example& ex,
                         const std::set<ParamGroup>& groups, ModelGradient& grad);

double validation_per(const ToyModel& model, std::span<const Example> data);

struct EpochRecord {
  std::uint32_t epoch = 0;
  double train_loss = 0.0;  // mean per-utterance NLL over the epoch
  double val_per = 0.0;
};

struct TrainResult {
  ToyModel final_model;
  ToyModel best_model;  // checkpoint chosen by select_checkpoint
  std::uint32_t best_epoch = 0;
  double initial_val_per = 0.0;
  std::uint64_t steps = 0;
  std::vector<EpochRecord> history;
};

/// Called after every optimizer step with the zero-based step index.
using StepObserver = std::function<void(std::uint64_t step, const ToyModel& model)>;

/// Plain mini-batch gradient descent; groups outside
/// trainable_groups(policy, step) are not touched. Throws DivergenceDetected
/// on a non-finite loss.
TrainResult train(ToyModel model, std::span<const Example> train_data,
                  std::span<const Example> val_data, const FinetunePolicy& policy,
                  const Hyperparameters& hyper, std::uint64_t shuffle_seed,
                  const StepObserver& observer = {});

/// Full toy experiment description, as read from the train-toy JSON config.
struct ToyConfig {
  SyntheticTask task;
  std::size_t validation_utterances = 256;
  std::size_t hidden_dim = 8;  // D_h
  FinetunePolicy policy;
  Hyperparameters hyper;
  std::uint64_t seed = 1;  // model init, shuffling and data

  static ToyConfig defaults(PolicyKind kind);
};

ToyConfig parse_toy_config(const nlohmann::json& j);
/// Starting weights used by run_toy(config).
ToyModel initial_model(const ToyConfig& config);

TrainResult run_toy(const ToyConfig& config, const StepObserver& observer = {});

/// `epoch,loss,val_per` header plus one row per epoch.
std::string history_csv(std::span<const EpochRecord> history);

}  // namespace ctcphon::toy
