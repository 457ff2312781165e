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

#include <filesystem>
#include <map>
#include <regex>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "ctcphon/core.hpp"
#include "ctcphon/snr.hpp"

namespace ctcphon {

// ---------------------------------------------------------------------------
// Transcript cleaning

enum class PatternClass { kFilledPause, kNonSpeechEvent, kTruncatedWord, kUnintelligible };

struct CleaningRules {
  /// Any of these (case-insensitive, optionally wrapped in <>, [] or ())
  /// discards the whole utterance.
  std::set<std::string> discard_labels{"DISCARD", "SILENCE", "NO_SIGNAL"};

  bool delete_filled_pauses = true;
  std::set<std::string> filled_pauses{"UM", "UH", "UHM", "ER", "ERM", "AH", "HM", "HMM", "MM"};
  bool delete_non_speech_events = true;  // <breath>, <noise>, ...
  bool delete_truncated_words = true;    // CELL-
  bool delete_unintelligible = true;     // (XX), ((word))

  /// Hook for corpus-specific typo detection: a token fully matching any of
  /// these discards the utterance.
  std::vector<std::regex> reject_patterns;

  static CleaningRules defaults() { return {}; }
};

/// Parses the JSON rules config:
///   {"discard_labels": [...],
///    "filled_pause": {"enabled": true, "tokens": [...]},
///    "non_speech_event": {"enabled": true},
///    "truncated_word": {"enabled": true},
///    "unintelligible": {"enabled": true},
///    "reject_patterns": ["regex", ...]}
/// Missing keys keep their defaults.
CleaningRules parse_cleaning_rules(std::string_view json_text);
CleaningRules load_cleaning_rules(const std::filesystem::path& path);

struct Keep {
  std::vector<std::string> tokens;
  friend bool operator==(const Keep&, const Keep&) = default;
};

struct DiscardUtterance {
  enum class Reason { kDiscardLabel, kRejectPattern, kEmptyAfterCleaning };
  Reason reason;
  std::string token;  // offending token, empty for kEmptyAfterCleaning
  friend bool operator==(const DiscardUtterance&, const DiscardUtterance&) = default;
};

std::string_view to_string(DiscardUtterance::Reason reason);

using CleanResult = std::variant<Keep, DiscardUtterance>;

/// Which deletion class a token falls into, if any (independent of the
/// enable flags).
std::optional<PatternClass> classify_token(std::string_view token, const CleaningRules& rules);

CleanResult clean_transcript(std::span<const std::string> raw, const CleaningRules& rules);

std::vector<std::string> split_tokens(std::string_view line);

// ---------------------------------------------------------------------------
// Phonetization

/// Word -> pronunciations. Keys are case-folded (ASCII and Latin-1 letters).
class Lexicon {
 public:
  /// Appends a pronunciation variant. Throws InvalidLabel for an empty or
  /// blank-containing pronunciation.
  void add(std::string_view word, PhonemeSequence pronunciation);

  const std::vector<PhonemeSequence>* find(std::string_view word) const;
  std::size_t size() const noexcept { return entries_.size(); }

 private:
  std::map<std::string, std::vector<PhonemeSequence>, std::less<>> entries_;
};

std::string fold_case(std::string_view word);

/// `word<TAB>phoneme phoneme ...` lines; repeated words add variants.
/// Phoneme symbols are resolved against `inventory` (UnknownSymbol).
Lexicon parse_lexicon(std::string_view text, const PhonemeInventory& inventory);
Lexicon load_lexicon(const std::filesystem::path& path, const PhonemeInventory& inventory);

struct Phonetized {
  PhonemeSequence phonemes;
  friend bool operator==(const Phonetized&, const Phonetized&) = default;
};
struct NeedsManual {
  std::vector<std::string> oov_words;
  friend bool operator==(const NeedsManual&, const NeedsManual&) = default;
};
using PhonetizeResult = std::variant<Phonetized, NeedsManual>;

/// First-listed pronunciation of each word, concatenated in order.
PhonetizeResult phonetize(std::span<const std::string> words, const Lexicon& lexicon);

// ---------------------------------------------------------------------------
// Manifest

/// JSONL, one utterance per line: id, posterior (relative to the manifest's
/// directory), ref (symbol array), task, optional snr_db and word_correct.
/// Errors carry the 1-based line number.
std::vector<Utterance> parse_manifest(std::string_view text, const PhonemeInventory& inventory,
                                      const std::filesystem::path& base_dir = {});
std::vector<Utterance> load_manifest(const std::filesystem::path& path,
                                     const PhonemeInventory& inventory);

std::string manifest_line(const Utterance& utt, const PhonemeInventory& inventory);

// ---------------------------------------------------------------------------
// Stratification

std::map<ReadingTask, std::vector<Utterance>> stratify_by_task(std::span<const Utterance> utts);

/// Throws MissingSnr(id) if any utterance lacks snr_db.
std::map<NoiseBand, std::vector<Utterance>> stratify_by_noise_band(
    std::span<const Utterance> utts);

}  // namespace ctcphon
