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

#include "ctcphon/report.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <random>

#include "ctcphon/error.hpp"
#include "report_fixtures.hpp"
#include "test_util.hpp"

namespace ctcphon {
namespace {

using testing::golden_report;
using testing::golden_system_rows;
using testing::peaked_gram;
using testing::TempDir;

TEST(FormatTest, PercentOneDecimal) {
  EXPECT_EQ(format_percent(26.0999), "26.1");
  EXPECT_EQ(format_percent(0.0), "0.0");
  EXPECT_EQ(format_percent(200.0), "200.0");
  // 0.25 is exact in binary and ties to even; 0.35 is stored just below.
  EXPECT_EQ(format_percent(0.25), "0.2");
  EXPECT_EQ(format_percent(0.35), "0.3");
}

TEST(FormatTest, PerRoundsHalfToEvenOnExactRatio) {
  EXPECT_EQ(format_per(1, 16), "6.2");    // 6.25
  EXPECT_EQ(format_per(3, 16), "18.8");   // 18.75
  EXPECT_EQ(format_per(1, 3), "33.3");
  EXPECT_EQ(format_per(2, 3), "66.7");
  EXPECT_EQ(format_per(0, 7), "0.0");
  EXPECT_EQ(format_per(2, 1), "200.0");
  EXPECT_EQ(format_per(5, 0), "-");
}

TEST(FormatTest, PerWithinHalfTenthOfRatio) {
  std::mt19937_64 rng(11);
  std::uniform_int_distribution<std::uint64_t> n(1, 100000);
  for (int i = 0; i < 2000; ++i) {
    const std::uint64_t ref_len = n(rng);
    const std::uint64_t errors = n(rng) % (2 * ref_len);
    const double shown = std::stod(format_per(errors, ref_len));
    EXPECT_LE(std::abs(shown - 100.0 * errors / ref_len), 0.05 + 1e-9);
  }
}

TEST(GoldenTest, OverallAndStrata) {
  const auto r = golden_report();
  EXPECT_EQ(format_per(r.overall.ops.errors(), r.overall.ops.ref_len), "26.1");
  EXPECT_EQ(render_task_row(r), "S 16.4 | W 25.5 | WL 28.3 | PWL 32.9");
  EXPECT_EQ(render_band_row(r), "Low 13.4 | Medium 21.7 | High 31.6");
}

TEST(GoldenTest, SystemTable) {
  const auto rows = golden_system_rows();
  EXPECT_EQ(render_per_table(rows), testing::kGoldenSystemTable);
}

TEST(GoldenTest, TextLayout) {
  EXPECT_EQ(render(golden_report(), ReportFormat::kText),
            "decoder\tbeam 10\n"
            "overall\t26.1\tutterances=2443\tref_len=16505\tsub=2581\tins=646\tdel=1075\n"
            "task\tS 16.4 | W 25.5 | WL 28.3 | PWL 32.9\n"
            "band\tLow 13.4 | Medium 21.7 | High 31.6\n"
            "band_skipped\t0\n"
            "failures\t0\n");
}

TEST(GoldenTest, StrataPoolToOverall) {
  const auto r = golden_report();
  AlignmentOps bands;
  for (const auto& [band, s] : r.by_band) bands += s.ops;
  EXPECT_EQ(bands, r.overall.ops);
}

TEST(RenderTest, MissingStratumPrintsDash) {
  EvalReport r;
  r.by_task[ReadingTask::kWord] = {AlignmentOps{1, 0, 0, 3, 4}, 1};
  EXPECT_EQ(render_task_row(r), "S - | W 25.0 | WL - | PWL -");
  EXPECT_EQ(render_band_row(r), "Low - | Medium - | High -");
}

TEST(RenderTest, CsvOneRowPerStratum) {
  EXPECT_EQ(render(golden_report(), ReportFormat::kCsv),
            "stratum,per,utterances,ref_len\n"
            "overall,26.1,2443,16505\n"
            "task:S,16.4,160,3449\n"
            "task:W,25.5,1987,5958\n"
            "task:WL,28.3,107,2568\n"
            "task:PWL,32.9,189,4530\n"
            "band:Low,13.4,400,2616\n"
            "band:Medium,21.7,700,4441\n"
            "band:High,31.6,1343,9448\n");
}

TEST(RenderTest, JsonRoundTrips) {
  auto r = golden_report();
  r.band_skipped = 4;
  r.failures.push_back({"u7", "Io: cannot open"});
  r.decoder = DecoderConfig::greedy();
  EXPECT_EQ(report_from_json(render(r, ReportFormat::kJson)), r);
}

TEST(RenderTest, BadJsonIsFormatError) {
  try {
    report_from_json("{\"decoder\": 3}");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kFormatError);
  }
}

// Three utterances whose greedy decode is fixed by construction:
//   u1 ref [a b c]   hyp [a b c]   0 errors / 3
//   u2 ref [a b c d] hyp [a e c]   S + D    / 4
//   u3 ref [b]       hyp [b c d]   2 I      / 1
class EvaluateTest : public ::testing::Test {
 protected:
  void SetUp() override {
    auto add = [&](std::string id, std::vector<Label> ref, std::vector<Label> hyp,
                   ReadingTask task, std::optional<double> snr) {
      const auto path = dir_ / (id + ".pgrm");
      write_posteriorgram(peaked_gram(PhonemeSequence(hyp), inv_.size()), path);
      manifest_.push_back({id, path, PhonemeSequence(ref), task, snr, std::nullopt});
    };
    add("u3", {2}, {2, 3, 4}, ReadingTask::kWordList, 5.0);
    add("u1", {1, 2, 3}, {1, 2, 3}, ReadingTask::kSentence, 30.0);
    add("u2", {1, 2, 3, 4}, {1, 5, 3}, ReadingTask::kWord, std::nullopt);
  }

  TempDir dir_;
  PhonemeInventory inv_{{"a", "b", "c", "d", "e"}};
  std::vector<Utterance> manifest_;
};

TEST_F(EvaluateTest, OverallEqualsHandPooledValue) {
  for (const auto decoder : {DecoderConfig::greedy(), DecoderConfig::beam(10)}) {
    const auto r = evaluate(manifest_, inv_, decoder);
    EXPECT_EQ(r.overall.ops, (AlignmentOps{1, 2, 1, 6, 8}));
    EXPECT_EQ(r.overall.utterances, 3u);
    EXPECT_DOUBLE_EQ(*r.overall.per(), 50.0);
    EXPECT_EQ(render_task_row(r), "S 0.0 | W 50.0 | WL 200.0 | PWL -");
    EXPECT_EQ(render_band_row(r), "Low 0.0 | Medium - | High 200.0");
    EXPECT_EQ(r.band_skipped, 1u);
    EXPECT_TRUE(r.failures.empty());
  }
}

TEST_F(EvaluateTest, PerUtteranceFailuresAreCollected) {
  manifest_.push_back({"u0", dir_ / "missing.pgrm", PhonemeSequence({1}),
                       ReadingTask::kWord, 20.0, std::nullopt});
  const auto wide = PhonemeInventory({"a", "b", "c", "d", "e", "f"});
  write_posteriorgram(peaked_gram(PhonemeSequence({1}), wide.size()), dir_ / "wide.pgrm");
  manifest_.push_back({"u9", dir_ / "wide.pgrm", PhonemeSequence({1}),
                       ReadingTask::kWord, 20.0, std::nullopt});
  const auto r = evaluate(manifest_, inv_, DecoderConfig::greedy());
  ASSERT_EQ(r.failures.size(), 2u);
  EXPECT_EQ(r.failures[0].id, "u0");
  EXPECT_NE(r.failures[0].message.find("Io"), std::string::npos);
  EXPECT_EQ(r.failures[1].id, "u9");
  EXPECT_NE(r.failures[1].message.find("ShapeMismatch"), std::string::npos);
  EXPECT_EQ(r.overall.ops, (AlignmentOps{1, 2, 1, 6, 8}));
}

TEST(EvaluateEmptyTest, EmptyManifestThrows) {
  const PhonemeInventory inv({"a"});
  try {
    evaluate({}, inv, DecoderConfig::greedy());
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kEmptyCorpus);
  }
  EXPECT_THROW(evaluate_serial({}, inv, DecoderConfig::greedy()), Error);
}

class SyntheticCorpusTest : public ::testing::Test {
 protected:
  void SetUp() override {
    manifest_ = load_manifest(testing::write_synthetic_corpus(dir_.path(), 40, 5, inv_), inv_);
  }
  TempDir dir_;
  PhonemeInventory inv_{{"a", "b", "c", "d", "e", "f", "g"}};
  std::vector<Utterance> manifest_;
};

TEST_F(SyntheticCorpusTest, StrataPoolToOverall) {
  const auto r = evaluate(manifest_, inv_, DecoderConfig::beam(4));
  AlignmentOps tasks;
  std::uint64_t utts = 0;
  for (const auto& [task, s] : r.by_task) {
    tasks += s.ops;
    utts += s.utterances;
  }
  EXPECT_EQ(tasks, r.overall.ops);
  EXPECT_EQ(utts, r.overall.utterances);

  // Bands cover exactly the utterances with an SNR.
  std::uint64_t banded = 0;
  for (const auto& [band, s] : r.by_band) banded += s.utterances;
  EXPECT_EQ(banded + r.band_skipped, r.overall.utterances);
  EXPECT_GT(r.band_skipped, 0u);
  EXPECT_GT(r.overall.ops.errors(), 0u);
}

TEST_F(SyntheticCorpusTest, ParallelMatchesSerial) {
  for (const auto decoder : {DecoderConfig::greedy(), DecoderConfig::beam(8)}) {
    const auto serial = evaluate_serial(manifest_, inv_, decoder);
    for (int jobs : {1, 2, 8}) {
      const auto par = evaluate(manifest_, inv_, decoder, jobs);
      EXPECT_EQ(par, serial);
      EXPECT_EQ(render(par, ReportFormat::kText), render(serial, ReportFormat::kText));
      EXPECT_EQ(render(par, ReportFormat::kJson), render(serial, ReportFormat::kJson));
    }
  }
}

TEST_F(SyntheticCorpusTest, AggregateIgnoresInputOrder) {
  std::vector<ScoredUtterance> scored;
  for (const auto& u : manifest_) scored.push_back(score_utterance(u, inv_, DecoderConfig::greedy()));
  const auto ref = aggregate(scored, DecoderConfig::greedy());
  std::mt19937_64 rng(2);
  std::shuffle(scored.begin(), scored.end(), rng);
  EXPECT_EQ(aggregate(scored, DecoderConfig::greedy()), ref);
}

}  // namespace
}  // namespace ctcphon
