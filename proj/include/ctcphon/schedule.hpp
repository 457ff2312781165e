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
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <utility>

#include <nlohmann/json_fwd.hpp>

namespace ctcphon {

/// Parameter groups of a self-supervised encoder with a CTC head: the
/// convolutional feature encoder, the transformer block, and the linear
/// classification layer.
enum class ParamGroup { kEncoder, kTransformer, kHead };

std::string_view to_string(ParamGroup group);

enum class PolicyKind {
  kFrozenHead,  // only the classification layer is ever trained
  kStagedFull,  // head alone until stage_boundary, then head + transformer
};

std::string_view to_string(PolicyKind kind);

inline constexpr std::uint64_t kDefaultStageBoundary = 1000;

struct FinetunePolicy {
  PolicyKind kind = PolicyKind::kStagedFull;
  std::uint64_t stage_boundary = kDefaultStageBoundary;  // optimizer steps

  static FinetunePolicy frozen_head() { return {PolicyKind::kFrozenHead, kDefaultStageBoundary}; }
  static FinetunePolicy staged_full(std::uint64_t boundary = kDefaultStageBoundary) {
    return {PolicyKind::kStagedFull, boundary};
  }
  friend bool operator==(const FinetunePolicy&, const FinetunePolicy&) = default;
};

struct Hyperparameters {
  double learning_rate = 5e-4;
  std::uint32_t batch_size = 128;
  std::uint32_t epochs = 55;

  /// 30 epochs for head-only adaptation, 55 for staged full fine-tuning.
  static Hyperparameters defaults_for(PolicyKind kind);
  friend bool operator==(const Hyperparameters&, const Hyperparameters&) = default;
};

/// `iteration` counts optimizer steps from zero. The encoder is never
/// trainable.
std::set<ParamGroup> trainable_groups(const FinetunePolicy& policy, std::uint64_t iteration);

/// Epoch with the lowest validation PER; ties go to the earliest epoch.
/// Throws NoCheckpoints on an empty history.
std::uint32_t select_checkpoint(std::span<const std::pair<std::uint32_t, double>> history);

void to_json(nlohmann::json& j, const FinetunePolicy& p);
void from_json(const nlohmann::json& j, FinetunePolicy& p);
void to_json(nlohmann::json& j, const Hyperparameters& h);
void from_json(const nlohmann::json& j, Hyperparameters& h);

}  // namespace ctcphon
