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

#include "ctcphon/metrics.hpp"

#include <algorithm>
#include <vector>

namespace ctcphon {

AlignmentOps align(const PhonemeSequence& ref, const PhonemeSequence& hyp) {
  const std::size_t n = ref.size();
  const std::size_t m = hyp.size();
  // cost[i][j]: edit distance between ref[:i] and hyp[:j].
  std::vector<std::uint32_t> cost((n + 1) * (m + 1));
  auto at = [&](std::size_t i, std::size_t j) -> std::uint32_t& { return cost[i * (m + 1) + j]; };
  for (std::size_t i = 0; i <= n; ++i) at(i, 0) = static_cast<std::uint32_t>(i);
  for (std::size_t j = 0; j <= m; ++j) at(0, j) = static_cast<std::uint32_t>(j);
  for (std::size_t i = 1; i <= n; ++i) {
    for (std::size_t j = 1; j <= m; ++j) {
      const std::uint32_t diag = at(i - 1, j - 1) + (ref[i - 1] == hyp[j - 1] ? 0 : 1);
      at(i, j) = std::min({diag, at(i - 1, j) + 1, at(i, j - 1) + 1});
    }
  }

  AlignmentOps ops;
  ops.ref_len = n;
  std::size_t i = n, j = m;
  while (i > 0 || j > 0) {
    if (i > 0 && j > 0) {
      const bool same = ref[i - 1] == hyp[j - 1];
      if (at(i, j) == at(i - 1, j - 1) + (same ? 0 : 1)) {
        ++(same ? ops.hits : ops.substitutions);
        --i;
        --j;
        continue;
      }
    }
    if (i > 0 && at(i, j) == at(i - 1, j) + 1) {
      ++ops.deletions;
      --i;
    } else {
      ++ops.insertions;
      --j;
    }
  }
  return ops;
}

double per(const AlignmentOps& ops) {
  if (ops.ref_len == 0) throw Error(ErrorCode::kEmptyReference, "reference length is zero");
  return 100.0 * static_cast<double>(ops.errors()) / static_cast<double>(ops.ref_len);
}

double corpus_per(std::span<const AlignmentOps> utterances) {
  AlignmentOps pooled;
  for (const auto& u : utterances) pooled += u;
  if (utterances.empty() || pooled.ref_len == 0) {
    throw Error(ErrorCode::kEmptyCorpus, "no reference phonemes to score");
  }
  return per(pooled);
}

}  // namespace ctcphon
