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

#include "ctcphon/toytrain.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <random>

#include <nlohmann/json.hpp>

#include "ctcphon/decode.hpp"
#include "ctcphon/metrics.hpp"

namespace ctcphon::toy {

std::vector<Example> generate_synthetic(const SyntheticTask& task) {
  if (task.phonemes == 0 || task.phonemes > task.feature_dim) {
    throw Error(ErrorCode::kInvalidArgument, "need 1 <= phonemes <= feature_dim");
  }
  if (task.min_labels > task.max_labels || task.min_frames_per_label == 0 ||
      task.min_frames_per_label > task.max_frames_per_label) {
    throw Error(ErrorCode::kInvalidArgument, "bad synthetic length ranges");
  }
  if (task.phonemes == 1 && task.max_labels > 1) {
    throw Error(ErrorCode::kInvalidArgument, "one phoneme cannot avoid adjacent repeats");
  }
  std::mt19937_64 rng(task.seed);
  std::uniform_int_distribution<std::size_t> n_labels(task.min_labels, task.max_labels);
  std::uniform_int_distribution<std::size_t> run_len(task.min_frames_per_label,
                                                     task.max_frames_per_label);
  std::uniform_int_distribution<Label> label(1, static_cast<Label>(task.phonemes));
  std::normal_distribution<double> noise(0.0, 1.0);

  std::vector<Example> out;
  out.reserve(task.num_utterances);
  for (std::size_t u = 0; u < task.num_utterances; ++u) {
    std::vector<Label> labels(n_labels(rng));
    std::vector<std::size_t> runs(labels.size());
    for (std::size_t i = 0; i < labels.size(); ++i) {
      do {
        labels[i] = label(rng);
      } while (i > 0 && labels[i] == labels[i - 1]);
      runs[i] = run_len(rng);
    }
    const std::size_t frames = std::accumulate(runs.begin(), runs.end(), std::size_t{0});
    Matrix x(frames, task.feature_dim);
    std::size_t t = 0;
    for (std::size_t i = 0; i < labels.size(); ++i) {
      for (std::size_t r = 0; r < runs[i]; ++r, ++t) {
        for (std::size_t d = 0; d < task.feature_dim; ++d) {
          const double clean = d + 1 == labels[i] ? 1.0 : 0.0;
          x(t, d) = task.noise > 0.0 ? clean + task.noise * noise(rng) : clean;
        }
      }
    }
    out.push_back({std::move(x), PhonemeSequence(std::move(labels))});
  }
  return out;
}

// ---------------------------------------------------------------------------
// Model

ToyModel ToyModel::init(std::size_t d_in, std::size_t d_hidden, std::size_t classes,
                        std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  auto fill = [&](Matrix& m, double scale) {
    std::normal_distribution<double> dist(0.0, scale);
    for (double& w : m.data) w = dist(rng);
  };
  ToyModel m;
  m.encoder = Matrix(d_in, d_hidden);
  m.mid = Matrix(d_hidden, d_hidden);
  m.head = Matrix(d_hidden, classes);
  m.head_bias.assign(classes, 0.0);
  fill(m.encoder, 1.0);
  fill(m.mid, 1.0 / std::sqrt(static_cast<double>(d_hidden)));
  fill(m.head, 0.1);
  return m;
}

namespace {

// out = tanh(in * w), in: T x A, w: A x B
Matrix tanh_layer(const Matrix& in, const Matrix& w) {
  Matrix out(in.rows, w.cols);
  for (std::size_t t = 0; t < in.rows; ++t) {
    for (std::size_t k = 0; k < in.cols; ++k) {
      const double a = in(t, k);
      for (std::size_t j = 0; j < w.cols; ++j) out(t, j) += a * w(k, j);
    }
    for (std::size_t j = 0; j < w.cols; ++j) out(t, j) = std::tanh(out(t, j));
  }
  return out;
}

struct Activations {
  Matrix h1, h2, logits;
};

Activations run_forward(const ToyModel& m, const Matrix& x) {
  if (x.cols != m.encoder.rows) {
    throw Error(ErrorCode::kShapeMismatch, "feature dim " + std::to_string(x.cols) +
                                               " != " + std::to_string(m.encoder.rows));
  }
  Activations a;
  a.h1 = tanh_layer(x, m.encoder);
  a.h2 = tanh_layer(a.h1, m.mid);
  a.logits = Matrix(x.rows, m.head.cols);
  for (std::size_t t = 0; t < x.rows; ++t) {
    for (std::size_t v = 0; v < m.head.cols; ++v) {
      double z = m.head_bias[v];
      for (std::size_t k = 0; k < m.head.rows; ++k) z += a.h2(t, k) * m.head(k, v);
      a.logits(t, v) = z;
    }
  }
  for (double z : a.logits.data) {
    if (!std::isfinite(z)) throw Error(ErrorCode::kDivergenceDetected, "non-finite logits");
  }
  return a;
}

// Accumulates in^T * delta into w_grad.
void outer_accumulate(const Matrix& in, const Matrix& delta, Matrix& w_grad) {
  for (std::size_t t = 0; t < in.rows; ++t) {
    for (std::size_t k = 0; k < in.cols; ++k) {
      const double a = in(t, k);
      if (a == 0.0) continue;
      for (std::size_t j = 0; j < delta.cols; ++j) w_grad(k, j) += a * delta(t, j);
    }
  }
}

// delta_in = (delta * w^T) .* (1 - act^2)
Matrix back_through_tanh(const Matrix& delta, const Matrix& w, const Matrix& act) {
  Matrix out(delta.rows, w.rows);
  for (std::size_t t = 0; t < delta.rows; ++t) {
    for (std::size_t k = 0; k < w.rows; ++k) {
      double s = 0.0;
      for (std::size_t j = 0; j < w.cols; ++j) s += delta(t, j) * w(k, j);
      out(t, k) = s * (1.0 - act(t, k) * act(t, k));
    }
  }
  return out;
}

}  // namespace

LogPosteriorGram ToyModel::forward(const Matrix& features) const {
  const auto a = run_forward(*this, features);
  return LogPosteriorGram::from_logits(a.logits.rows, a.logits.cols, a.logits.data);
}

double loss_and_gradient(const ToyModel& model, const Example& ex,
                         const std::set<ParamGroup>& groups, ModelGradient& grad) {
  const auto act = run_forward(model, ex.features);
  const auto gram =
      LogPosteriorGram::from_logits(act.logits.rows, act.logits.cols, act.logits.data);
  const CtcLoss loss = ctc_nll_with_gradient(gram, ex.labels);
  const Matrix& dz = *loss.per_frame_gradient;

  const bool want_head = groups.contains(ParamGroup::kHead);
  const bool want_mid = groups.contains(ParamGroup::kTransformer);
  const bool want_enc = groups.contains(ParamGroup::kEncoder);

  if (want_head) {
    if (grad.head.data.empty()) {
      grad.head = Matrix(model.head.rows, model.head.cols);
      grad.head_bias.assign(model.head.cols, 0.0);
    }
    outer_accumulate(act.h2, dz, grad.head);
    for (std::size_t t = 0; t < dz.rows; ++t) {
      for (std::size_t v = 0; v < dz.cols; ++v) grad.head_bias[v] += dz(t, v);
    }
  }
  if (want_mid || want_enc) {
    const Matrix d2 = back_through_tanh(dz, model.head, act.h2);
    if (want_mid) {
      if (grad.mid.data.empty()) grad.mid = Matrix(model.mid.rows, model.mid.cols);
      outer_accumulate(act.h1, d2, grad.mid);
    }
    if (want_enc) {
      const Matrix d1 = back_through_tanh(d2, model.mid, act.h1);
      if (grad.encoder.data.empty()) grad.encoder = Matrix(model.encoder.rows, model.encoder.cols);
      outer_accumulate(ex.features, d1, grad.encoder);
    }
  }
  return loss.nll;
}

double validation_per(const ToyModel& model, std::span<const Example> data) {
  std::vector<AlignmentOps> ops;
  ops.reserve(data.size());
  for (const auto& ex : data) ops.push_back(align(ex.labels, greedy_decode(model.forward(ex.features))));
  return corpus_per(ops);
}

// ---------------------------------------------------------------------------
// Training

namespace {

void descend(std::vector<double>& w, const std::vector<double>& g, double step) {
  for (std::size_t i = 0; i < w.size(); ++i) w[i] -= step * g[i];
}

}  // namespace

TrainResult train(ToyModel model, std::span<const Example> train_data,
                  std::span<const Example> val_data, const FinetunePolicy& policy,
                  const Hyperparameters& hyper, std::uint64_t shuffle_seed,
                  const StepObserver& observer) {
  if (train_data.empty()) throw Error(ErrorCode::kEmptyCorpus, "no training data");
  TrainResult result;
  result.initial_val_per = validation_per(model, val_data);

  std::mt19937_64 rng(shuffle_seed);
  std::vector<std::size_t> order(train_data.size());
  std::iota(order.begin(), order.end(), std::size_t{0});

  std::vector<std::pair<std::uint32_t, double>> checkpoints;
  std::uint64_t step = 0;
  for (std::uint32_t epoch = 1; epoch <= hyper.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    double epoch_loss = 0.0;
    for (std::size_t start = 0; start < order.size(); start += hyper.batch_size) {
      const std::size_t stop = std::min(order.size(), start + hyper.batch_size);
      const auto groups = trainable_groups(policy, step);
      ModelGradient grad;
      double batch_loss = 0.0;
      for (std::size_t i = start; i < stop; ++i) {
        batch_loss += loss_and_gradient(model, train_data[order[i]], groups, grad);
      }
      if (!std::isfinite(batch_loss)) {
        throw Error(ErrorCode::kDivergenceDetected,
                    "non-finite loss at step " + std::to_string(step));
      }
      epoch_loss += batch_loss;

      const double lr = hyper.learning_rate / static_cast<double>(stop - start);
      if (groups.contains(ParamGroup::kHead)) {
        descend(model.head.data, grad.head.data, lr);
        descend(model.head_bias, grad.head_bias, lr);
      }
      if (groups.contains(ParamGroup::kTransformer)) descend(model.mid.data, grad.mid.data, lr);
      if (groups.contains(ParamGroup::kEncoder)) {
        descend(model.encoder.data, grad.encoder.data, lr);
      }
      if (observer) observer(step, model);
      ++step;
    }

    EpochRecord rec;
    rec.epoch = epoch;
    rec.train_loss = epoch_loss / static_cast<double>(train_data.size());
    rec.val_per = validation_per(model, val_data);
    result.history.push_back(rec);
    checkpoints.emplace_back(epoch, rec.val_per);
    if (select_checkpoint(checkpoints) == epoch) result.best_model = model;
  }
  result.best_epoch = select_checkpoint(checkpoints);
  result.steps = step;
  result.final_model = std::move(model);
  return result;
}

// ---------------------------------------------------------------------------
// Config

ToyConfig ToyConfig::defaults(PolicyKind kind) {
  ToyConfig c;
  c.policy = kind == PolicyKind::kFrozenHead ? FinetunePolicy::frozen_head()
                                             : FinetunePolicy::staged_full();
  c.hyper = Hyperparameters::defaults_for(kind);
  // The toy model trains with unscaled gradient descent on per-utterance
  // losses; the fine-tuning rate of 5e-4 would barely move it.
  c.hyper.learning_rate = 0.2;
  return c;
}

ToyConfig parse_toy_config(const nlohmann::json& j) {
  FinetunePolicy policy;
  if (j.contains("policy")) policy = j.at("policy").get<FinetunePolicy>();
  ToyConfig c = ToyConfig::defaults(policy.kind);
  c.policy = policy;
  try {
    if (j.contains("hyper")) {
      Hyperparameters h = c.hyper;
      from_json(j.at("hyper"), h);
      c.hyper = h;
    }
    c.seed = j.value("seed", c.seed);
    c.hidden_dim = j.value("hidden_dim", c.hidden_dim);
    c.validation_utterances = j.value("validation_utterances", c.validation_utterances);
    if (j.contains("task")) {
      const auto& t = j.at("task");
      c.task.num_utterances = t.value("num_utterances", c.task.num_utterances);
      c.task.feature_dim = t.value("feature_dim", c.task.feature_dim);
      c.task.phonemes = t.value("phonemes", c.task.phonemes);
      c.task.min_labels = t.value("min_labels", c.task.min_labels);
      c.task.max_labels = t.value("max_labels", c.task.max_labels);
      c.task.min_frames_per_label = t.value("min_frames_per_label", c.task.min_frames_per_label);
      c.task.max_frames_per_label = t.value("max_frames_per_label", c.task.max_frames_per_label);
      c.task.noise = t.value("noise", c.task.noise);
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kFormatError, std::string("toy config: ") + e.what());
  }
  return c;
}

ToyModel initial_model(const ToyConfig& config) {
  return ToyModel::init(config.task.feature_dim, config.hidden_dim, config.task.phonemes + 1,
                        config.seed * 31 + 7);
}

TrainResult run_toy(const ToyConfig& config, const StepObserver& observer) {
  SyntheticTask train_task = config.task;
  train_task.seed = config.seed;
  SyntheticTask val_task = config.task;
  val_task.seed = config.seed + 0x9E3779B97F4A7C15ULL;
  val_task.num_utterances = config.validation_utterances;

  const auto train_data = generate_synthetic(train_task);
  const auto val_data = generate_synthetic(val_task);
  return train(initial_model(config), train_data, val_data, config.policy, config.hyper,
               config.seed * 131 + 17, observer);
}

std::string history_csv(std::span<const EpochRecord> history) {
  std::string out = "epoch,loss,val_per\n";
  char buf[96];
  for (const auto& r : history) {
    std::snprintf(buf, sizeof(buf), "%u,%.6f,%.4f\n", r.epoch, r.train_loss, r.val_per);
    out += buf;
  }
  return out;
}

}  // namespace ctcphon::toy
