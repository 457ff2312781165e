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

#include "ctcphon/core.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>
#include <limits>
#include <sstream>

namespace ctcphon {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kIo: return "IoError";
    case ErrorCode::kDuplicateSymbol: return "DuplicateSymbol";
    case ErrorCode::kMissingBlank: return "MissingBlank";
    case ErrorCode::kFormatError: return "FormatError";
    case ErrorCode::kNotNormalized: return "NotNormalized";
    case ErrorCode::kInvalidLabel: return "InvalidLabel";
    case ErrorCode::kInfeasibleTarget: return "InfeasibleTarget";
    case ErrorCode::kOracleTooLarge: return "OracleTooLarge";
    case ErrorCode::kInvalidWidth: return "InvalidWidth";
    case ErrorCode::kEmptyReference: return "EmptyReference";
    case ErrorCode::kEmptyCorpus: return "EmptyCorpus";
    case ErrorCode::kTooShort: return "TooShort";
    case ErrorCode::kSilentSignal: return "SilentSignal";
    case ErrorCode::kUnknownSymbol: return "UnknownSymbol";
    case ErrorCode::kBadTask: return "BadTask";
    case ErrorCode::kDuplicateId: return "DuplicateId";
    case ErrorCode::kMissingSnr: return "MissingSnr";
    case ErrorCode::kNoCheckpoints: return "NoCheckpoints";
    case ErrorCode::kDivergenceDetected: return "DivergenceDetected";
    case ErrorCode::kShapeMismatch: return "ShapeMismatch";
    case ErrorCode::kInvalidArgument: return "InvalidArgument";
  }
  return "Unknown";
}

// ---------------------------------------------------------------------------
// Inventory

PhonemeInventory::PhonemeInventory(std::vector<std::string> symbols) {
  symbols_.reserve(symbols.size() + 1);
  symbols_.emplace_back(kBlankSymbol);
  index_.emplace(std::string(kBlankSymbol), kBlank);
  for (auto& s : symbols) {
    if (s.empty()) throw Error(ErrorCode::kFormatError, "empty phoneme symbol");
    auto [it, inserted] = index_.emplace(s, static_cast<Label>(symbols_.size()));
    if (!inserted) throw Error(ErrorCode::kDuplicateSymbol, "'" + s + "'");
    symbols_.push_back(std::move(s));
  }
  if (symbols_.size() < 2) {
    throw Error(ErrorCode::kFormatError, "inventory needs at least one phoneme");
  }
}

const std::string& PhonemeInventory::symbol(Label index) const {
  if (index >= symbols_.size()) {
    throw Error(ErrorCode::kInvalidLabel, "label " + std::to_string(index));
  }
  return symbols_[index];
}

std::optional<Label> PhonemeInventory::find(std::string_view symbol) const {
  auto it = index_.find(std::string(symbol));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

std::string PhonemeInventory::serialize() const {
  std::string out;
  for (const auto& s : symbols_) {
    out += s;
    out += '\n';
  }
  return out;
}

PhonemeInventory parse_inventory(std::string_view text) {
  std::vector<std::string> lines;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t nl = text.find('\n', pos);
    if (nl == std::string_view::npos) nl = text.size();
    std::string_view line = text.substr(pos, nl - pos);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    lines.emplace_back(line);
    pos = nl + 1;
  }
  // Trailing blank lines are tolerated; interior ones are not.
  while (!lines.empty() && lines.back().empty()) lines.pop_back();
  if (lines.empty() || lines.front() != kBlankSymbol) {
    throw Error(ErrorCode::kMissingBlank, "first line must be <blank>");
  }
  lines.erase(lines.begin());
  return PhonemeInventory(std::move(lines));
}

namespace {

std::string slurp(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot open " + path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

}  // namespace

PhonemeInventory load_inventory(const std::filesystem::path& path) {
  return parse_inventory(slurp(path));
}

// ---------------------------------------------------------------------------
// Sequences

PhonemeSequence::PhonemeSequence(std::vector<Label> labels, std::size_t inventory_size)
    : labels_(std::move(labels)) {
  for (Label l : labels_) {
    if (l == kBlank || l >= inventory_size) {
      throw Error(ErrorCode::kInvalidLabel, "label " + std::to_string(l));
    }
  }
}

PhonemeSequence::PhonemeSequence(std::vector<Label> labels) : labels_(std::move(labels)) {
  for (Label l : labels_) {
    if (l == kBlank) throw Error(ErrorCode::kInvalidLabel, "blank in phoneme sequence");
  }
}

std::string to_symbols(const PhonemeSequence& seq, const PhonemeInventory& inv) {
  std::string out;
  for (std::size_t i = 0; i < seq.size(); ++i) {
    if (i) out += ' ';
    out += inv.symbol(seq[i]);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Log-domain helpers

double log_add(double a, double b) {
  if (a == -std::numeric_limits<double>::infinity()) return b;
  if (b == -std::numeric_limits<double>::infinity()) return a;
  if (a < b) std::swap(a, b);
  return a + std::log1p(std::exp(b - a));
}

double log_sum_exp(std::span<const double> values) {
  double hi = -std::numeric_limits<double>::infinity();
  for (double v : values) hi = std::max(hi, v);
  if (!std::isfinite(hi)) return hi;
  double sum = 0.0;
  for (double v : values) sum += std::exp(v - hi);
  return hi + std::log(sum);
}

// ---------------------------------------------------------------------------
// Posteriorgram

LogPosteriorGram::LogPosteriorGram(std::size_t frames, std::size_t classes,
                                   std::vector<double> data)
    : frames_(frames), classes_(classes), data_(std::move(data)) {
  if (data_.size() != frames_ * classes_) {
    throw Error(ErrorCode::kShapeMismatch, "data size " + std::to_string(data_.size()) +
                                               " != " + std::to_string(frames_) + "x" +
                                               std::to_string(classes_));
  }
  if (frames_ > 0 && classes_ == 0) throw Error(ErrorCode::kShapeMismatch, "zero classes");
  for (std::size_t t = 0; t < frames_; ++t) {
    auto r = row(t);
    for (double v : r) {
      if (std::isnan(v) || v > kEntryTolerance) {
        throw Error(ErrorCode::kNotNormalized,
                    "frame " + std::to_string(t) + " has entry above zero or NaN");
      }
    }
    double lse = log_sum_exp(r);
    if (!(std::abs(lse) <= kRowTolerance)) {
      throw Error(ErrorCode::kNotNormalized,
                  "frame " + std::to_string(t) + " logsumexp " + std::to_string(lse));
    }
  }
}

LogPosteriorGram LogPosteriorGram::from_logits(std::size_t frames, std::size_t classes,
                                               std::span<const double> logits) {
  if (logits.size() != frames * classes) {
    throw Error(ErrorCode::kShapeMismatch, "logit matrix size");
  }
  std::vector<double> out(logits.begin(), logits.end());
  for (std::size_t t = 0; t < frames; ++t) {
    std::span<double> r(out.data() + t * classes, classes);
    double lse = log_sum_exp(r);
    for (double& v : r) v -= lse;
  }
  return LogPosteriorGram(frames, classes, std::move(out));
}

LogPosteriorGram LogPosteriorGram::from_probabilities(std::size_t frames, std::size_t classes,
                                                      std::span<const double> probs) {
  std::vector<double> out(probs.size());
  std::transform(probs.begin(), probs.end(), out.begin(), [](double p) { return std::log(p); });
  return LogPosteriorGram(frames, classes, std::move(out));
}

// ---------------------------------------------------------------------------
// PGRM codec

namespace {

constexpr char kMagic[4] = {'P', 'G', 'R', 'M'};
constexpr std::size_t kHeaderSize = 16;

void put_u32(std::vector<std::byte>& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::byte>((v >> (8 * i)) & 0xFF));
}

std::uint32_t get_u32(std::span<const std::byte> in, std::size_t off) {
  std::uint32_t v = 0;
  for (int i = 0; i < 4; ++i) v |= std::to_integer<std::uint32_t>(in[off + i]) << (8 * i);
  return v;
}

}  // namespace

std::vector<std::byte> encode_posteriorgram(const LogPosteriorGram& gram) {
  if (gram.frames() > UINT32_MAX || gram.classes() > UINT32_MAX) {
    throw Error(ErrorCode::kFormatError, "dimensions exceed u32");
  }
  std::vector<std::byte> out;
  out.reserve(kHeaderSize + 4 * gram.data().size());
  for (char c : kMagic) out.push_back(static_cast<std::byte>(c));
  put_u32(out, kPgrmVersion);
  put_u32(out, static_cast<std::uint32_t>(gram.frames()));
  put_u32(out, static_cast<std::uint32_t>(gram.classes()));
  for (double v : gram.data()) put_u32(out, std::bit_cast<std::uint32_t>(static_cast<float>(v)));
  return out;
}

LogPosteriorGram decode_posteriorgram(std::span<const std::byte> bytes) {
  if (bytes.size() < kHeaderSize ||
      std::memcmp(bytes.data(), kMagic, sizeof(kMagic)) != 0) {
    throw Error(ErrorCode::kFormatError, "bad PGRM magic");
  }
  const std::uint32_t version = get_u32(bytes, 4);
  if (version != kPgrmVersion) {
    throw Error(ErrorCode::kFormatError, "unsupported PGRM version " + std::to_string(version));
  }
  const std::uint64_t frames = get_u32(bytes, 8);
  const std::uint64_t classes = get_u32(bytes, 12);
  const std::uint64_t count = frames * classes;
  if (bytes.size() != kHeaderSize + 4 * count) {
    throw Error(ErrorCode::kFormatError, "PGRM payload is " +
                                             std::to_string(bytes.size() - kHeaderSize) +
                                             " bytes, expected " + std::to_string(4 * count));
  }
  std::vector<double> data(count);
  for (std::size_t i = 0; i < count; ++i) {
    data[i] = std::bit_cast<float>(get_u32(bytes, kHeaderSize + 4 * i));
  }
  return LogPosteriorGram(frames, classes, std::move(data));
}

LogPosteriorGram read_posteriorgram(const std::filesystem::path& path) {
  std::string raw = slurp(path);
  return decode_posteriorgram(std::as_bytes(std::span(raw.data(), raw.size())));
}

void write_posteriorgram(const LogPosteriorGram& gram, const std::filesystem::path& path) {
  auto bytes = encode_posteriorgram(gram);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::kIo, "cannot write " + path.string());
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error(ErrorCode::kIo, "short write to " + path.string());
}

// ---------------------------------------------------------------------------
// Reading tasks

std::string_view to_string(ReadingTask task) {
  switch (task) {
    case ReadingTask::kWord: return "W";
    case ReadingTask::kSentence: return "S";
    case ReadingTask::kWordList: return "WL";
    case ReadingTask::kPseudowordList: return "PWL";
  }
  return "?";
}

std::optional<ReadingTask> parse_task(std::string_view tag) {
  if (tag == "W") return ReadingTask::kWord;
  if (tag == "S") return ReadingTask::kSentence;
  if (tag == "WL") return ReadingTask::kWordList;
  if (tag == "PWL") return ReadingTask::kPseudowordList;
  return std::nullopt;
}

}  // namespace ctcphon
