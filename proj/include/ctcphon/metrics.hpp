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
#include <span>

#include "ctcphon/core.hpp"

namespace ctcphon {

struct AlignmentOps {
  std::uint64_t substitutions = 0;
  std::uint64_t insertions = 0;
  std::uint64_t deletions = 0;
  std::uint64_t hits = 0;
  std::uint64_t ref_len = 0;

  std::uint64_t errors() const noexcept { return substitutions + insertions + deletions; }

  AlignmentOps& operator+=(const AlignmentOps& o) noexcept {
    substitutions += o.substitutions;
    insertions += o.insertions;
    deletions += o.deletions;
    hits += o.hits;
    ref_len += o.ref_len;
    return *this;
  }

  friend bool operator==(const AlignmentOps&, const AlignmentOps&) = default;
};

/// Unit-cost Levenshtein alignment. Among minimal alignments the backtrace
/// (from the end of both sequences) prefers hit/substitution, then deletion,
/// then insertion.
AlignmentOps align(const PhonemeSequence& ref, const PhonemeSequence& hyp);

/// 100 * (S + I + D) / N. Throws EmptyReference when N = 0.
double per(const AlignmentOps& ops);

/// Pooled PER over utterances. Throws EmptyCorpus when the list is empty or
/// the total reference length is zero.
double corpus_per(std::span<const AlignmentOps> utterances);

}  // namespace ctcphon
