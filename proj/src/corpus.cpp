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

#include "ctcphon/corpus.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <iterator>
#include <set>

#include <nlohmann/json.hpp>

namespace ctcphon {

using nlohmann::json;

namespace {

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot open " + path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

std::vector<std::string_view> split_lines(std::string_view text) {
  std::vector<std::string_view> lines;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t nl = text.find('\n', pos);
    if (nl == std::string_view::npos) nl = text.size();
    std::string_view line = text.substr(pos, nl - pos);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    lines.push_back(line);
    pos = nl + 1;
  }
  return lines;
}

std::string upper_ascii(std::string_view s) {
  std::string out(s);
  for (char& c : out) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  return out;
}

bool wrapped(std::string_view tok, char open, char close) {
  return tok.size() >= 2 && tok.front() == open && tok.back() == close;
}

std::string_view unwrap(std::string_view tok) {
  while (wrapped(tok, '<', '>') || wrapped(tok, '[', ']') || wrapped(tok, '(', ')')) {
    tok = tok.substr(1, tok.size() - 2);
  }
  return tok;
}

}  // namespace

// ---------------------------------------------------------------------------
// Cleaning

std::string_view to_string(DiscardUtterance::Reason reason) {
  switch (reason) {
    case DiscardUtterance::Reason::kDiscardLabel: return "discard_label";
    case DiscardUtterance::Reason::kRejectPattern: return "reject_pattern";
    case DiscardUtterance::Reason::kEmptyAfterCleaning: return "empty_after_cleaning";
  }
  return "?";
}

CleaningRules parse_cleaning_rules(std::string_view json_text) {
  CleaningRules rules;
  json cfg;
  try {
    cfg = json::parse(json_text);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kFormatError, std::string("cleaning rules: ") + e.what());
  }
  try {
    if (cfg.contains("discard_labels")) {
      rules.discard_labels.clear();
      for (const auto& l : cfg.at("discard_labels")) {
        rules.discard_labels.insert(upper_ascii(l.get<std::string>()));
      }
    }
    auto flag = [&](const char* key, bool& enabled) -> const json* {
      if (!cfg.contains(key)) return nullptr;
      const json& sec = cfg.at(key);
      if (sec.is_boolean()) {
        enabled = sec.get<bool>();
        return nullptr;
      }
      enabled = sec.value("enabled", enabled);
      return &sec;
    };
    if (const json* sec = flag("filled_pause", rules.delete_filled_pauses);
        sec && sec->contains("tokens")) {
      rules.filled_pauses.clear();
      for (const auto& t : sec->at("tokens")) {
        rules.filled_pauses.insert(upper_ascii(t.get<std::string>()));
      }
    }
    flag("non_speech_event", rules.delete_non_speech_events);
    flag("truncated_word", rules.delete_truncated_words);
    flag("unintelligible", rules.delete_unintelligible);
    if (cfg.contains("reject_patterns")) {
      for (const auto& p : cfg.at("reject_patterns")) {
        rules.reject_patterns.emplace_back(p.get<std::string>());
      }
    }
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kFormatError, std::string("cleaning rules: ") + e.what());
  } catch (const std::regex_error& e) {
    throw Error(ErrorCode::kFormatError, std::string("cleaning rules regex: ") + e.what());
  }
  return rules;
}

CleaningRules load_cleaning_rules(const std::filesystem::path& path) {
  return parse_cleaning_rules(read_text(path));
}

std::optional<PatternClass> classify_token(std::string_view token, const CleaningRules& rules) {
  if (wrapped(token, '<', '>')) return PatternClass::kNonSpeechEvent;
  if (wrapped(token, '(', ')')) return PatternClass::kUnintelligible;
  if (token.size() >= 2 && token.back() == '-') return PatternClass::kTruncatedWord;
  if (rules.filled_pauses.contains(upper_ascii(token))) return PatternClass::kFilledPause;
  return std::nullopt;
}

CleanResult clean_transcript(std::span<const std::string> raw, const CleaningRules& rules) {
  for (const auto& tok : raw) {
    if (rules.discard_labels.contains(upper_ascii(unwrap(tok)))) {
      return DiscardUtterance{DiscardUtterance::Reason::kDiscardLabel, tok};
    }
    for (const auto& re : rules.reject_patterns) {
      if (std::regex_match(tok, re)) {
        return DiscardUtterance{DiscardUtterance::Reason::kRejectPattern, tok};
      }
    }
  }
  Keep kept;
  for (const auto& tok : raw) {
    const auto cls = classify_token(tok, rules);
    bool drop = false;
    if (cls) {
      switch (*cls) {
        case PatternClass::kFilledPause: drop = rules.delete_filled_pauses; break;
        case PatternClass::kNonSpeechEvent: drop = rules.delete_non_speech_events; break;
        case PatternClass::kTruncatedWord: drop = rules.delete_truncated_words; break;
        case PatternClass::kUnintelligible: drop = rules.delete_unintelligible; break;
      }
    }
    if (!drop) kept.tokens.push_back(tok);
  }
  if (kept.tokens.empty()) {
    return DiscardUtterance{DiscardUtterance::Reason::kEmptyAfterCleaning, {}};
  }
  return kept;
}

std::vector<std::string> split_tokens(std::string_view line) {
  std::vector<std::string> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
    std::size_t j = i;
    while (j < line.size() && !std::isspace(static_cast<unsigned char>(line[j]))) ++j;
    if (j > i) out.emplace_back(line.substr(i, j - i));
    i = j;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Lexicon

std::string fold_case(std::string_view word) {
  std::string out;
  out.reserve(word.size());
  for (std::size_t i = 0; i < word.size(); ++i) {
    const auto c = static_cast<unsigned char>(word[i]);
    if (c < 0x80) {
      out.push_back(static_cast<char>(std::tolower(c)));
    } else if (c == 0xC3 && i + 1 < word.size()) {
      // U+00C0..U+00DE (except U+00D7) fold to U+00E0..U+00FE.
      auto next = static_cast<unsigned char>(word[i + 1]);
      if (next >= 0x80 && next <= 0x9E && next != 0x97) next += 0x20;
      out.push_back(static_cast<char>(c));
      out.push_back(static_cast<char>(next));
      ++i;
    } else if (c == 0xC5 && i + 1 < word.size() && static_cast<unsigned char>(word[i + 1]) == 0x92) {
      out += "\xC5\x93";  // Œ -> œ
      ++i;
    } else {
      out.push_back(static_cast<char>(c));
    }
  }
  return out;
}

void Lexicon::add(std::string_view word, PhonemeSequence pronunciation) {
  if (pronunciation.empty()) {
    throw Error(ErrorCode::kInvalidLabel, "empty pronunciation for '" + std::string(word) + "'");
  }
  entries_[fold_case(word)].push_back(std::move(pronunciation));
}

const std::vector<PhonemeSequence>* Lexicon::find(std::string_view word) const {
  auto it = entries_.find(fold_case(word));
  return it == entries_.end() ? nullptr : &it->second;
}

Lexicon parse_lexicon(std::string_view text, const PhonemeInventory& inventory) {
  Lexicon lex;
  std::size_t line_no = 0;
  for (std::string_view line : split_lines(text)) {
    ++line_no;
    if (line.empty()) continue;
    const std::size_t tab = line.find('\t');
    if (tab == std::string_view::npos || tab == 0) {
      throw Error(ErrorCode::kFormatError,
                  "lexicon line " + std::to_string(line_no) + ": expected word<TAB>phonemes");
    }
    std::vector<Label> labels;
    for (const auto& sym : split_tokens(line.substr(tab + 1))) {
      auto l = inventory.find(sym);
      if (!l || *l == kBlank) {
        throw Error(ErrorCode::kUnknownSymbol,
                    "lexicon line " + std::to_string(line_no) + ": '" + sym + "'");
      }
      labels.push_back(*l);
    }
    lex.add(line.substr(0, tab), PhonemeSequence(std::move(labels), inventory.size()));
  }
  return lex;
}

Lexicon load_lexicon(const std::filesystem::path& path, const PhonemeInventory& inventory) {
  return parse_lexicon(read_text(path), inventory);
}

PhonetizeResult phonetize(std::span<const std::string> words, const Lexicon& lexicon) {
  std::vector<Label> out;
  NeedsManual manual;
  for (const auto& w : words) {
    const auto* prons = lexicon.find(w);
    if (!prons) {
      manual.oov_words.push_back(w);
      continue;
    }
    const auto& first = prons->front();
    out.insert(out.end(), first.begin(), first.end());
  }
  if (!manual.oov_words.empty()) return manual;
  return Phonetized{PhonemeSequence(std::move(out))};
}

// ---------------------------------------------------------------------------
// Manifest

std::vector<Utterance> parse_manifest(std::string_view text, const PhonemeInventory& inventory,
                                      const std::filesystem::path& base_dir) {
  std::vector<Utterance> out;
  std::set<std::string> seen;
  std::size_t line_no = 0;
  for (std::string_view line : split_lines(text)) {
    ++line_no;
    if (line.find_first_not_of(" \t") == std::string_view::npos) continue;
    const std::string where = "line " + std::to_string(line_no);
    Utterance u;
    try {
      const json rec = json::parse(line);
      u.id = rec.at("id").get<std::string>();
      if (u.id.empty()) throw Error(ErrorCode::kFormatError, where + ": empty id");
      u.posterior_path = base_dir / rec.at("posterior").get<std::string>();

      const auto tag = rec.at("task").get<std::string>();
      const auto task = parse_task(tag);
      if (!task) throw Error(ErrorCode::kBadTask, where + ": task '" + tag + "'");
      u.task = *task;

      std::vector<Label> labels;
      for (const auto& sym : rec.at("ref")) {
        const auto s = sym.get<std::string>();
        const auto l = inventory.find(s);
        if (!l || *l == kBlank) {
          throw Error(ErrorCode::kUnknownSymbol, where + ": symbol '" + s + "'");
        }
        labels.push_back(*l);
      }
      u.reference = PhonemeSequence(std::move(labels), inventory.size());

      if (rec.contains("snr_db") && !rec.at("snr_db").is_null()) {
        u.snr_db = rec.at("snr_db").get<double>();
      }
      if (rec.contains("word_correct") && !rec.at("word_correct").is_null()) {
        u.word_correct = rec.at("word_correct").get<std::vector<bool>>();
      }
    } catch (const json::exception& e) {
      throw Error(ErrorCode::kFormatError, where + ": " + e.what());
    }
    if (!seen.insert(u.id).second) {
      throw Error(ErrorCode::kDuplicateId, where + ": id '" + u.id + "'");
    }
    out.push_back(std::move(u));
  }
  return out;
}

std::vector<Utterance> load_manifest(const std::filesystem::path& path,
                                     const PhonemeInventory& inventory) {
  return parse_manifest(read_text(path), inventory, path.parent_path());
}

std::string manifest_line(const Utterance& utt, const PhonemeInventory& inventory) {
  json rec;
  rec["id"] = utt.id;
  rec["posterior"] = utt.posterior_path.generic_string();
  json ref = json::array();
  for (Label l : utt.reference) ref.push_back(inventory.symbol(l));
  rec["ref"] = std::move(ref);
  rec["task"] = std::string(to_string(utt.task));
  if (utt.snr_db) rec["snr_db"] = *utt.snr_db;
  if (utt.word_correct) rec["word_correct"] = *utt.word_correct;
  return rec.dump();
}

// ---------------------------------------------------------------------------
// Stratification

std::map<ReadingTask, std::vector<Utterance>> stratify_by_task(std::span<const Utterance> utts) {
  std::map<ReadingTask, std::vector<Utterance>> out;
  for (const auto& u : utts) out[u.task].push_back(u);
  return out;
}

std::map<NoiseBand, std::vector<Utterance>> stratify_by_noise_band(
    std::span<const Utterance> utts) {
  std::map<NoiseBand, std::vector<Utterance>> out;
  for (const auto& u : utts) {
    if (!u.snr_db) throw Error(ErrorCode::kMissingSnr, u.id);
    out[noise_band(*u.snr_db)].push_back(u);
  }
  return out;
}

}  // namespace ctcphon
