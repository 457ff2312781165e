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
#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "ctcphon/core.hpp"
#include "ctcphon/metrics.hpp"
#include "ctcphon/snr.hpp"

namespace ctcphon {

struct DecoderConfig {
  enum class Kind { kGreedy, kBeam };
  Kind kind = Kind::kBeam;
  std::size_t width = 10;

  static DecoderConfig greedy() { return {Kind::kGreedy, 1}; }
  static DecoderConfig beam(std::size_t width) { return {Kind::kBeam, width}; }
  friend bool operator==(const DecoderConfig&, const DecoderConfig&) = default;
};

struct StratumStats {
  AlignmentOps ops;
  std::uint64_t utterances = 0;

  std::optional<double> per() const;
  friend bool operator==(const StratumStats&, const StratumStats&) = default;
};

struct UtteranceFailure {
  std::string id;
  std::string message;
  friend bool operator==(const UtteranceFailure&, const UtteranceFailure&) = default;
};

struct EvalReport {
  DecoderConfig decoder;
  StratumStats overall;
  std::map<ReadingTask, StratumStats> by_task;
  std::map<NoiseBand, StratumStats> by_band;
  std::uint64_t band_skipped = 0;  // scored utterances without snr_db
  std::vector<UtteranceFailure> failures;

  friend bool operator==(const EvalReport&, const EvalReport&) = default;
};

/// Outcome of scoring one utterance.
struct ScoredUtterance {
  std::string id;
  ReadingTask task = ReadingTask::kSentence;
  std::optional<double> snr_db;
  std::optional<AlignmentOps> ops;  // empty on failure
  std::string error;
};

/// Decode with `decoder` and align against the reference.
PhonemeSequence decode_with(const LogPosteriorGram& gram, const DecoderConfig& decoder);
ScoredUtterance score_utterance(const Utterance& utt, const PhonemeInventory& inventory,
                                const DecoderConfig& decoder);

/// Pools scored utterances in ascending id order, so the result does not
/// depend on the order of `scored`.
EvalReport aggregate(std::vector<ScoredUtterance> scored, const DecoderConfig& decoder);

/// Scores every utterance on `jobs` OpenMP threads and aggregates.
/// Throws EmptyCorpus for an empty manifest; per-utterance problems are
/// recorded in EvalReport::failures.
EvalReport evaluate(std::span<const Utterance> manifest, const PhonemeInventory& inventory,
                    const DecoderConfig& decoder, int jobs = 1);

/// Single-threaded reference for evaluate().
EvalReport evaluate_serial(std::span<const Utterance> manifest, const PhonemeInventory& inventory,
                           const DecoderConfig& decoder);

enum class ReportFormat { kText, kJson, kCsv };

/// One decimal, round-half-to-even on the exact binary value.
std::string format_percent(double value);
/// One decimal of 100 * errors / ref_len, rounded half-to-even exactly.
std::string format_per(std::uint64_t errors, std::uint64_t ref_len);

std::string render(const EvalReport& report, ReportFormat format);
std::string render_task_row(const EvalReport& report);
std::string render_band_row(const EvalReport& report);

/// `name<TAB>PER` lines for comparing systems on the same test set.
std::string render_per_table(std::span<const std::pair<std::string, AlignmentOps>> rows);

EvalReport report_from_json(std::string_view json_text);

}  // namespace ctcphon
