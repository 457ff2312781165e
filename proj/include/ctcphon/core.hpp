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

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "ctcphon/error.hpp"

namespace ctcphon {

using Label = std::uint32_t;

inline constexpr Label kBlank = 0;
inline constexpr std::string_view kBlankSymbol = "<blank>";

/// Closed label set. Index 0 is always the CTC blank; indices 1..size-1 are
/// phoneme symbols in file order.
class PhonemeInventory {
 public:
  /// `symbols` excludes the blank. Throws DuplicateSymbol on repeats or if
  /// `<blank>` appears among them.
  explicit PhonemeInventory(std::vector<std::string> symbols);

  std::size_t size() const noexcept { return symbols_.size(); }
  Label blank_index() const noexcept { return kBlank; }
  const std::string& symbol(Label index) const;
  std::optional<Label> find(std::string_view symbol) const;
  const std::vector<std::string>& symbols() const noexcept { return symbols_; }

  /// One symbol per line, `<blank>` first.
  std::string serialize() const;

 private:
  std::vector<std::string> symbols_;  // including blank at 0
  std::unordered_map<std::string, Label> index_;
};

PhonemeInventory load_inventory(const std::filesystem::path& path);
PhonemeInventory parse_inventory(std::string_view text);

/// Blank-free label sequence, used for both references and hypotheses.
class PhonemeSequence {
 public:
  PhonemeSequence() = default;
  /// Throws InvalidLabel if any label is blank or >= `inventory_size`.
  PhonemeSequence(std::vector<Label> labels, std::size_t inventory_size);

  /// Rejects blanks only; range is checked where an inventory is known.
  explicit PhonemeSequence(std::vector<Label> labels);

  std::size_t size() const noexcept { return labels_.size(); }
  bool empty() const noexcept { return labels_.empty(); }
  Label operator[](std::size_t i) const { return labels_[i]; }
  std::span<const Label> labels() const noexcept { return labels_; }
  auto begin() const noexcept { return labels_.begin(); }
  auto end() const noexcept { return labels_.end(); }

  friend bool operator==(const PhonemeSequence&, const PhonemeSequence&) = default;
  friend auto operator<=>(const PhonemeSequence&, const PhonemeSequence&) = default;

 private:
  std::vector<Label> labels_;
};

std::string to_symbols(const PhonemeSequence& seq, const PhonemeInventory& inv);

/// T x V row-major matrix of natural-log class probabilities. Every row is
/// validated on construction: logsumexp within kRowTolerance of zero and no
/// entry above kEntryTolerance.
class LogPosteriorGram {
 public:
  static constexpr double kRowTolerance = 1e-4;
  static constexpr double kEntryTolerance = 1e-6;

  LogPosteriorGram() = default;
  /// Throws NotNormalized or ShapeMismatch.
  LogPosteriorGram(std::size_t frames, std::size_t classes, std::vector<double> data);

  /// Row-wise log-softmax of arbitrary finite logits.
  static LogPosteriorGram from_logits(std::size_t frames, std::size_t classes,
                                      std::span<const double> logits);
  /// Row-wise log of linear probabilities (rows must sum to one).
  static LogPosteriorGram from_probabilities(std::size_t frames, std::size_t classes,
                                             std::span<const double> probs);

  std::size_t frames() const noexcept { return frames_; }
  std::size_t classes() const noexcept { return classes_; }
  bool empty() const noexcept { return frames_ == 0; }

  double operator()(std::size_t t, std::size_t v) const { return data_[t * classes_ + v]; }
  std::span<const double> row(std::size_t t) const {
    return {data_.data() + t * classes_, classes_};
  }
  std::span<const double> data() const noexcept { return data_; }

 private:
  std::size_t frames_ = 0;
  std::size_t classes_ = 0;
  std::vector<double> data_;
};

double log_sum_exp(std::span<const double> values);
double log_add(double a, double b);

// PGRM binary format (little-endian): "PGRM", u32 version=1, u32 T, u32 V,
// T*V float32 row-major.
inline constexpr std::uint32_t kPgrmVersion = 1;

LogPosteriorGram decode_posteriorgram(std::span<const std::byte> bytes);
std::vector<std::byte> encode_posteriorgram(const LogPosteriorGram& gram);
LogPosteriorGram read_posteriorgram(const std::filesystem::path& path);
void write_posteriorgram(const LogPosteriorGram& gram, const std::filesystem::path& path);

enum class ReadingTask { kWord, kSentence, kWordList, kPseudowordList };

inline constexpr ReadingTask kAllTasks[] = {ReadingTask::kSentence, ReadingTask::kWord,
                                            ReadingTask::kWordList,
                                            ReadingTask::kPseudowordList};

std::string_view to_string(ReadingTask task);
std::optional<ReadingTask> parse_task(std::string_view tag);

struct Utterance {
  std::string id;
  std::filesystem::path posterior_path;
  PhonemeSequence reference;
  ReadingTask task = ReadingTask::kSentence;
  std::optional<double> snr_db;
  std::optional<std::vector<bool>> word_correct;
};

}  // namespace ctcphon
