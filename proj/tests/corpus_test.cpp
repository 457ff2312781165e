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

#include <gtest/gtest.h>

#include "test_util.hpp"

namespace ctcphon {
namespace {

using Tokens = std::vector<std::string>;

ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no ctcphon::Error thrown";
  return ErrorCode::kIo;
}

const CleaningRules kDefaults = CleaningRules::defaults();

TEST(CleanTest, DiscardLabelDropsUtterance) {
  const Tokens raw{"THE", "DISCARD", "CELL"};
  const auto r = clean_transcript(raw, kDefaults);
  ASSERT_TRUE(std::holds_alternative<DiscardUtterance>(r));
  EXPECT_EQ(std::get<DiscardUtterance>(r).reason, DiscardUtterance::Reason::kDiscardLabel);
  EXPECT_EQ(std::get<DiscardUtterance>(r).token, "DISCARD");
}

TEST(CleanTest, BracketedAndLowercaseDiscardLabels) {
  for (const char* tok : {"<SILENCE>", "<no_signal>", "[silence]", "(DISCARD)"}) {
    const Tokens raw{"HELLO", tok};
    EXPECT_TRUE(std::holds_alternative<DiscardUtterance>(clean_transcript(raw, kDefaults))) << tok;
  }
}

TEST(CleanTest, EachDeletionClassOnce) {
  const Tokens raw{"UM", "THE", "<breath>", "CELL-", "(XX)", "WALL"};
  EXPECT_EQ(clean_transcript(raw, kDefaults), CleanResult(Keep{{"THE", "WALL"}}));
}

TEST(CleanTest, EmptyAfterCleaning) {
  const DiscardUtterance empty{DiscardUtterance::Reason::kEmptyAfterCleaning, {}};
  EXPECT_EQ(clean_transcript(Tokens{}, kDefaults), CleanResult(empty));
  EXPECT_EQ(clean_transcript(Tokens{"uh", "<noise>"}, kDefaults), CleanResult(empty));
}

TEST(CleanTest, DisabledClassesKeepTokens) {
  CleaningRules rules;
  rules.delete_truncated_words = false;
  rules.delete_filled_pauses = false;
  const Tokens raw{"UM", "CELL-", "<breath>"};
  EXPECT_EQ(clean_transcript(raw, rules), CleanResult(Keep{{"UM", "CELL-"}}));
}

TEST(CleanTest, RejectPatternHook) {
  CleaningRules rules;
  rules.reject_patterns.emplace_back(".*[0-9].*");
  const auto r = clean_transcript(Tokens{"THE", "C3LL"}, rules);
  ASSERT_TRUE(std::holds_alternative<DiscardUtterance>(r));
  EXPECT_EQ(std::get<DiscardUtterance>(r).reason, DiscardUtterance::Reason::kRejectPattern);
}

TEST(CleanTest, RulesFromJson) {
  const auto rules = parse_cleaning_rules(R"({
    "discard_labels": ["noise_only"],
    "filled_pause": {"enabled": true, "tokens": ["euh"]},
    "truncated_word": {"enabled": false},
    "reject_patterns": ["x+"]
  })");
  EXPECT_EQ(rules.discard_labels, (std::set<std::string>{"NOISE_ONLY"}));
  EXPECT_TRUE(rules.filled_pauses.contains("EUH"));
  EXPECT_FALSE(rules.delete_truncated_words);
  EXPECT_TRUE(rules.delete_unintelligible);
  EXPECT_EQ(rules.reject_patterns.size(), 1u);
  EXPECT_EQ(clean_transcript(Tokens{"EUH", "CHAT-", "SILENCE"}, rules),
            CleanResult(Keep{{"CHAT-", "SILENCE"}}));
  EXPECT_EQ(code_of([] { parse_cleaning_rules("{not json"); }), ErrorCode::kFormatError);
  EXPECT_EQ(code_of([] { parse_cleaning_rules(R"({"reject_patterns": ["("]})"); }),
            ErrorCode::kFormatError);
}

TEST(CleanTest, IdempotentOnRandomTokenLists) {
  const std::vector<std::string> pool = {"THE",   "CELL",     "WALL", "UM",      "uh",
                                         "<breath>", "<laugh>", "CELL-", "WA-",   "(XX)",
                                         "((THE))", "SILENCE",  "plant", "-",      "()"};
  std::mt19937_64 rng(31);
  std::uniform_int_distribution<std::size_t> pick(0, pool.size() - 1), len(0, 8);
  int kept = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    Tokens raw(len(rng));
    for (auto& t : raw) t = pool[pick(rng)];
    const auto once = clean_transcript(raw, kDefaults);
    if (const auto* k = std::get_if<Keep>(&once)) {
      ++kept;
      EXPECT_EQ(clean_transcript(k->tokens, kDefaults), once);
    }
  }
  EXPECT_GT(kept, 100);
}

TEST(SplitTokensTest, Whitespace) {
  EXPECT_EQ(split_tokens("  a\tb  c \n"), (Tokens{"a", "b", "c"}));
  EXPECT_TRUE(split_tokens("   ").empty());
}

class LexiconFixture : public ::testing::Test {
 protected:
  PhonemeInventory inv = parse_inventory("<blank>\nʃ\na\nj\nɛ̃\nl\ne\nɛ\n");
};

TEST_F(LexiconFixture, SingleLookup) {
  const auto lex = parse_lexicon("chat\tʃ a\n", inv);
  const auto r = phonetize(Tokens{"chat"}, lex);
  ASSERT_TRUE(std::holds_alternative<Phonetized>(r));
  EXPECT_EQ(to_symbols(std::get<Phonetized>(r).phonemes, inv), "ʃ a");
}

TEST_F(LexiconFixture, OovNeedsManual) {
  const auto lex = parse_lexicon("chat\tʃ a\n", inv);
  EXPECT_EQ(phonetize(Tokens{"chat", "blorp", "zut"}, lex),
            PhonetizeResult(NeedsManual{{"blorp", "zut"}}));
}

TEST_F(LexiconFixture, FirstPronunciationWins) {
  const auto lex = parse_lexicon("les\tl e\nles\tl ɛ\n", inv);
  ASSERT_EQ(lex.find("les")->size(), 2u);
  const auto r = phonetize(Tokens{"les"}, lex);
  EXPECT_EQ(to_symbols(std::get<Phonetized>(r).phonemes, inv), "l e");
}

TEST_F(LexiconFixture, CaseFoldingAndOrder) {
  const auto lex = parse_lexicon("chat\tʃ a\nchien\tʃ j ɛ̃\nÉlan\te l a\n", inv);
  const auto r = phonetize(Tokens{"Chien", "CHAT", "élan"}, lex);
  ASSERT_TRUE(std::holds_alternative<Phonetized>(r));
  const auto& seq = std::get<Phonetized>(r).phonemes;
  EXPECT_EQ(seq.size(), 3u + 2u + 3u);
  EXPECT_EQ(to_symbols(seq, inv), "ʃ j ɛ̃ ʃ a e l a");
}

TEST_F(LexiconFixture, Errors) {
  EXPECT_EQ(code_of([&] { parse_lexicon("chat\tʃ q\n", inv); }), ErrorCode::kUnknownSymbol);
  EXPECT_EQ(code_of([&] { parse_lexicon("chat\t\n", inv); }), ErrorCode::kInvalidLabel);
  EXPECT_EQ(code_of([&] { parse_lexicon("chat ʃ a\n", inv); }), ErrorCode::kFormatError);
  EXPECT_EQ(code_of([&] { parse_lexicon("chat\t<blank>\n", inv); }), ErrorCode::kUnknownSymbol);
}

class ManifestFixture : public ::testing::Test {
 protected:
  PhonemeInventory inv = parse_inventory("<blank>\na\nb\nc\n");
};

TEST_F(ManifestFixture, ValidTwoLines) {
  const auto utts = parse_manifest(
      R"({"id":"u1","posterior":"g/u1.pgrm","ref":["a","b"],"task":"W","snr_db":21.0}
{"id":"u2","posterior":"g/u2.pgrm","ref":["c"],"task":"PWL","word_correct":[true,false]}
)",
      inv, "/data");
  ASSERT_EQ(utts.size(), 2u);
  EXPECT_EQ(utts[0].posterior_path, std::filesystem::path("/data/g/u1.pgrm"));
  EXPECT_EQ(utts[0].reference, PhonemeSequence({1, 2}));
  EXPECT_EQ(utts[0].task, ReadingTask::kWord);
  EXPECT_EQ(utts[0].snr_db, 21.0);
  EXPECT_FALSE(utts[1].snr_db);
  EXPECT_EQ(utts[1].word_correct, (std::vector<bool>{true, false}));
}

TEST_F(ManifestFixture, Errors) {
  EXPECT_EQ(code_of([&] {
              parse_manifest(R"({"id":"u","posterior":"p","ref":["a"],"task":"X"})", inv);
            }),
            ErrorCode::kBadTask);
  EXPECT_EQ(code_of([&] {
              parse_manifest(R"({"id":"u","posterior":"p","ref":["zz"],"task":"S"})", inv);
            }),
            ErrorCode::kUnknownSymbol);
  EXPECT_EQ(code_of([&] {
              parse_manifest(R"({"id":"u","posterior":"p","ref":["a"],"task":"S"}
{"id":"u","posterior":"q","ref":["b"],"task":"S"})",
                             inv);
            }),
            ErrorCode::kDuplicateId);
  EXPECT_EQ(code_of([&] { parse_manifest("{bad", inv); }), ErrorCode::kFormatError);
  try {
    parse_manifest("\n" R"({"id":"u","posterior":"p","ref":["a"],"task":"Q"})", inv);
  } catch (const Error& e) {
    EXPECT_NE(std::string(e.what()).find("line 2"), std::string::npos);
  }
}

TEST_F(ManifestFixture, LineRoundTrip) {
  Utterance u{"x", "p.pgrm", PhonemeSequence({3, 1}), ReadingTask::kWordList, 12.5, {{true}}};
  const auto back = parse_manifest(manifest_line(u, inv), inv);
  ASSERT_EQ(back.size(), 1u);
  EXPECT_EQ(back[0].id, "x");
  EXPECT_EQ(back[0].reference, u.reference);
  EXPECT_EQ(back[0].task, u.task);
  EXPECT_EQ(back[0].snr_db, u.snr_db);
  EXPECT_EQ(back[0].word_correct, u.word_correct);
}

Utterance utt(std::string id, ReadingTask task, std::optional<double> snr) {
  return {std::move(id), "p", PhonemeSequence({1}), task, snr, std::nullopt};
}

TEST(StratifyTest, ByTask) {
  const std::vector<Utterance> utts = {utt("1", ReadingTask::kWord, {}),
                                       utt("2", ReadingTask::kSentence, {}),
                                       utt("3", ReadingTask::kWord, {})};
  const auto s = stratify_by_task(utts);
  ASSERT_EQ(s.size(), 2u);
  EXPECT_EQ(s.at(ReadingTask::kWord).size(), 2u);
  EXPECT_EQ(s.at(ReadingTask::kSentence).size(), 1u);
}

TEST(StratifyTest, ByNoiseBand) {
  const std::vector<Utterance> utts = {utt("1", ReadingTask::kWord, 30.0),
                                       utt("2", ReadingTask::kWord, 21.0),
                                       utt("3", ReadingTask::kWord, 5.0)};
  const auto s = stratify_by_noise_band(utts);
  EXPECT_EQ(s.at(NoiseBand::kLow).size(), 1u);
  EXPECT_EQ(s.at(NoiseBand::kMedium).size(), 1u);
  EXPECT_EQ(s.at(NoiseBand::kHigh).size(), 1u);
  EXPECT_EQ(s.at(NoiseBand::kLow)[0].id, "1");
}

TEST(StratifyTest, MissingSnr) {
  const std::vector<Utterance> utts = {utt("1", ReadingTask::kWord, 30.0),
                                       utt("2", ReadingTask::kWord, std::nullopt)};
  try {
    stratify_by_noise_band(utts);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kMissingSnr);
    EXPECT_NE(std::string(e.what()).find('2'), std::string::npos);
  }
}

TEST(StratifyTest, PartitionProperty) {
  std::mt19937_64 rng(41);
  std::uniform_int_distribution<int> task(0, 3);
  std::uniform_real_distribution<double> snr(-10.0, 60.0);
  std::vector<Utterance> utts;
  for (int i = 0; i < 300; ++i) {
    utts.push_back(utt(std::to_string(i), static_cast<ReadingTask>(task(rng)), snr(rng)));
  }
  std::set<std::string> seen;
  std::size_t total = 0;
  for (const auto& [k, v] : stratify_by_task(utts)) {
    total += v.size();
    for (const auto& u : v) {
      EXPECT_EQ(u.task, k);
      EXPECT_TRUE(seen.insert(u.id).second);
    }
  }
  EXPECT_EQ(total, utts.size());
  total = 0;
  for (const auto& [k, v] : stratify_by_noise_band(utts)) total += v.size();
  EXPECT_EQ(total, utts.size());
}

}  // namespace
}  // namespace ctcphon
