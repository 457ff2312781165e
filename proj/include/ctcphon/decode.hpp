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
#include <span>
#include <utility>
#include <vector>

#include "ctcphon/core.hpp"

namespace ctcphon {

inline constexpr std::size_t kDefaultBeamWidth = 10;

/// Merge consecutive duplicates, then drop blanks.
PhonemeSequence collapse(std::span<const Label> frame_labels);

/// collapse(argmax per frame); ties go to the lowest class index.
PhonemeSequence greedy_decode(const LogPosteriorGram& gram);

struct Hypothesis {
  PhonemeSequence labels;
  double log_prob = 0.0;  // total CTC mass of the prefix

  friend bool operator==(const Hypothesis&, const Hypothesis&) = default;
};

/// CTC prefix beam search without a language model. Each prefix tracks the
/// mass of alignments ending in blank and in its last label separately;
/// identical prefixes are merged and the beam is pruned to `width` by total
/// mass after every frame. Returns prefixes by descending mass, ties broken
/// lexicographically by label indices. Throws InvalidWidth for width 0.
std::vector<Hypothesis> beam_decode(const LogPosteriorGram& gram,
                                    std::size_t width = kDefaultBeamWidth);

/// Test oracle: enumerate all V^T paths, pool mass per collapsed sequence and
/// return the argmax (lexicographic tie-break). Throws OracleTooLarge when
/// V^T > 1e6.
Hypothesis exhaustive_decode(const LogPosteriorGram& gram);

/// Every collapsed sequence with its pooled log mass, sorted like
/// beam_decode. Same size guard as exhaustive_decode.
std::vector<Hypothesis> exhaustive_distribution(const LogPosteriorGram& gram);

}  // namespace ctcphon
