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

#include "ctcphon/schedule.hpp"

#include <nlohmann/json.hpp>

#include "ctcphon/error.hpp"

namespace ctcphon {

std::string_view to_string(ParamGroup group) {
  switch (group) {
    case ParamGroup::kEncoder: return "Encoder";
    case ParamGroup::kTransformer: return "Transformer";
    case ParamGroup::kHead: return "Head";
  }
  return "?";
}

std::string_view to_string(PolicyKind kind) {
  switch (kind) {
    case PolicyKind::kFrozenHead: return "FrozenHead";
    case PolicyKind::kStagedFull: return "StagedFull";
  }
  return "?";
}

Hyperparameters Hyperparameters::defaults_for(PolicyKind kind) {
  Hyperparameters h;
  h.epochs = kind == PolicyKind::kFrozenHead ? 30 : 55;
  return h;
}

std::set<ParamGroup> trainable_groups(const FinetunePolicy& policy, std::uint64_t iteration) {
  if (policy.kind == PolicyKind::kStagedFull && iteration >= policy.stage_boundary) {
    return {ParamGroup::kHead, ParamGroup::kTransformer};
  }
  return {ParamGroup::kHead};
}

std::uint32_t select_checkpoint(std::span<const std::pair<std::uint32_t, double>> history) {
  if (history.empty()) throw Error(ErrorCode::kNoCheckpoints, "empty validation history");
  auto best = history.front();
  for (const auto& entry : history) {
    if (entry.second < best.second ||
        (entry.second == best.second && entry.first < best.first)) {
      best = entry;
    }
  }
  return best.first;
}

void to_json(nlohmann::json& j, const FinetunePolicy& p) {
  j = {{"kind", std::string(to_string(p.kind))}, {"stage_boundary", p.stage_boundary}};
}

void from_json(const nlohmann::json& j, FinetunePolicy& p) {
  const auto kind = j.value("kind", std::string(to_string(p.kind)));
  if (kind == "FrozenHead") {
    p.kind = PolicyKind::kFrozenHead;
  } else if (kind == "StagedFull") {
    p.kind = PolicyKind::kStagedFull;
  } else {
    throw Error(ErrorCode::kFormatError, "unknown policy kind '" + kind + "'");
  }
  p.stage_boundary = j.value("stage_boundary", p.stage_boundary);
}

void to_json(nlohmann::json& j, const Hyperparameters& h) {
  j = {{"learning_rate", h.learning_rate}, {"batch_size", h.batch_size}, {"epochs", h.epochs}};
}

void from_json(const nlohmann::json& j, Hyperparameters& h) {
  h.learning_rate = j.value("learning_rate", h.learning_rate);
  h.batch_size = j.value("batch_size", h.batch_size);
  h.epochs = j.value("epochs", h.epochs);
  if (!(h.learning_rate > 0.0) || h.batch_size == 0 || h.epochs == 0) {
    throw Error(ErrorCode::kInvalidArgument, "hyperparameters must be positive");
  }
}

}  // namespace ctcphon
