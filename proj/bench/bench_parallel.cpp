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

// Serial reference vs OpenMP kernels for corpus evaluation and batched CTC loss.

#include <benchmark/benchmark.h>

#include <random>
#include <vector>

#include "ctcphon/ctc.hpp"
#include "ctcphon/report.hpp"
#include "test_util.hpp"

namespace ctcphon {
namespace {

constexpr std::size_t kUtterances = 200;

struct Corpus {
  testing::TempDir dir;
  PhonemeInventory inventory{{"i", "e", "a", "o", "u", "p", "t", "k", "s", "m", "n", "l"}};
  std::vector<Utterance> manifest;

  Corpus() {
    manifest = load_manifest(testing::write_synthetic_corpus(dir.path(), kUtterances, 17, inventory),
                             inventory);
  }
};

const Corpus& corpus() {
  static const Corpus c;
  return c;
}

struct Batch {
  std::vector<LogPosteriorGram> grams;
  std::vector<PhonemeSequence> targets;
};

const Batch& batch() {
  static const Batch b = [] {
    Batch out;
    std::mt19937_64 rng(23);
    for (int i = 0; i < 256; ++i) {
      out.grams.push_back(testing::random_gram(rng, 150, 36));
      out.targets.push_back(testing::random_sequence(rng, 40, 36, 20));
    }
    return out;
  }();
  return b;
}

void BM_EvaluateSerial(benchmark::State& state) {
  const auto& c = corpus();
  const auto decoder = DecoderConfig::beam(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(evaluate_serial(c.manifest, c.inventory, decoder));
  state.SetItemsProcessed(state.iterations() * kUtterances);
}
BENCHMARK(BM_EvaluateSerial)->Arg(1)->Arg(10)->Unit(benchmark::kMillisecond);

void BM_EvaluateParallel(benchmark::State& state) {
  const auto& c = corpus();
  const auto decoder = DecoderConfig::beam(static_cast<std::size_t>(state.range(0)));
  const int jobs = static_cast<int>(state.range(1));
  for (auto _ : state) benchmark::DoNotOptimize(evaluate(c.manifest, c.inventory, decoder, jobs));
  state.SetItemsProcessed(state.iterations() * kUtterances);
}
BENCHMARK(BM_EvaluateParallel)
    ->ArgsProduct({{1, 10}, {1, 2, 4, 8}})
    ->Unit(benchmark::kMillisecond)
    ->UseRealTime();

void BM_BatchCtcSerial(benchmark::State& state) {
  const auto& b = batch();
  for (auto _ : state) benchmark::DoNotOptimize(batch_ctc_nll_serial(b.grams, b.targets));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(b.grams.size()));
}
BENCHMARK(BM_BatchCtcSerial)->Unit(benchmark::kMillisecond);

void BM_BatchCtcParallel(benchmark::State& state) {
  const auto& b = batch();
  const int jobs = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(batch_ctc_nll(b.grams, b.targets, jobs));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(b.grams.size()));
}
BENCHMARK(BM_BatchCtcParallel)->Arg(1)->Arg(2)->Arg(4)->Arg(8)->Unit(benchmark::kMillisecond)
    ->UseRealTime();

}  // namespace
}  // namespace ctcphon

BENCHMARK_MAIN();
