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

#include "ctcphon/decode.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

namespace ctcphon {
namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

struct PrefixMass {
  double blank = kNegInf;
  double nonblank = kNegInf;
  double total() const { return log_add(blank, nonblank); }
};

bool ranks_before(const Hypothesis& a, const Hypothesis& b) {
  if (a.log_prob != b.log_prob) return a.log_prob > b.log_prob;
  return a.labels < b.labels;
}

std::size_t guarded_path_count(const LogPosteriorGram& gram, double limit) {
  double paths = 1.0;
  for (std::size_t t = 0; t < gram.frames(); ++t) paths *= static_cast<double>(gram.classes());
  if (paths > limit) {
    throw Error(ErrorCode::kOracleTooLarge, std::to_string(gram.classes()) + "^" +
                                                std::to_string(gram.frames()) + " paths");
  }
  return static_cast<std::size_t>(paths);
}

}  // namespace

PhonemeSequence collapse(std::span<const Label> frame_labels) {
  std::vector<Label> out;
  for (std::size_t t = 0; t < frame_labels.size(); ++t) {
    const Label l = frame_labels[t];
    if (t > 0 && l == frame_labels[t - 1]) continue;
    if (l != kBlank) out.push_back(l);
  }
  return PhonemeSequence(std::move(out));
}

PhonemeSequence greedy_decode(const LogPosteriorGram& gram) {
  std::vector<Label> best(gram.frames());
  for (std::size_t t = 0; t < gram.frames(); ++t) {
    auto row = gram.row(t);
    // max_element returns the first maximum, i.e. the lowest index on ties.
    best[t] = static_cast<Label>(std::max_element(row.begin(), row.end()) - row.begin());
  }
  return collapse(best);
}

std::vector<Hypothesis> beam_decode(const LogPosteriorGram& gram, std::size_t width) {
  if (width == 0) throw Error(ErrorCode::kInvalidWidth, "beam width must be >= 1");

  using Beam = std::map<std::vector<Label>, PrefixMass>;
  Beam beam;
  beam[{}] = PrefixMass{0.0, kNegInf};

  std::vector<std::pair<std::vector<Label>, PrefixMass>> ranked;
  for (std::size_t t = 0; t < gram.frames(); ++t) {
    auto row = gram.row(t);
    Beam next;
    for (const auto& [prefix, mass] : beam) {
      const double total = mass.total();
      // Stay on the same prefix via blank.
      {
        auto& dst = next[prefix];
        dst.blank = log_add(dst.blank, total + row[kBlank]);
      }
      for (Label c = 1; c < row.size(); ++c) {
        const double p = row[c];
        if (!prefix.empty() && prefix.back() == c) {
          // Repeat without an intervening blank merges into the same prefix;
          // after a blank it starts a new copy of the label.
          auto& same = next[prefix];
          same.nonblank = log_add(same.nonblank, mass.nonblank + p);
          auto ext = prefix;
          ext.push_back(c);
          auto& grown = next[ext];
          grown.nonblank = log_add(grown.nonblank, mass.blank + p);
        } else {
          auto ext = prefix;
          ext.push_back(c);
          auto& grown = next[ext];
          grown.nonblank = log_add(grown.nonblank, total + p);
        }
      }
    }

    ranked.clear();
    for (auto& entry : next) {
      if (entry.second.total() != kNegInf) ranked.push_back(std::move(entry));
    }
    if (ranked.empty()) ranked.assign(next.begin(), next.end());
    // std::map iteration is already lexicographic, so a stable sort by mass
    // keeps the lexicographic tie-break.
    std::stable_sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
      return a.second.total() > b.second.total();
    });
    if (ranked.size() > width) ranked.resize(width);
    beam.clear();
    for (auto& [prefix, mass] : ranked) beam.emplace(std::move(prefix), mass);
  }

  std::vector<Hypothesis> out;
  out.reserve(beam.size());
  for (const auto& [prefix, mass] : beam) {
    out.push_back({PhonemeSequence(prefix), mass.total()});
  }
  std::sort(out.begin(), out.end(), ranks_before);
  return out;
}

std::vector<Hypothesis> exhaustive_distribution(const LogPosteriorGram& gram) {
  const std::size_t T = gram.frames();
  const std::size_t V = gram.classes();
  const std::size_t total = guarded_path_count(gram, 1e6);

  std::map<std::vector<Label>, double> mass;
  std::vector<Label> path(T);
  for (std::size_t n = 0; n < total; ++n) {
    std::size_t code = n;
    double logp = 0.0;
    for (std::size_t t = 0; t < T; ++t) {
      path[t] = static_cast<Label>(code % V);
      code /= V;
      logp += gram(t, path[t]);
    }
    const auto seq = collapse(path);
    auto [it, inserted] = mass.try_emplace({seq.begin(), seq.end()}, 0.0);
    it->second += std::exp(logp);
  }

  std::vector<Hypothesis> out;
  out.reserve(mass.size());
  for (const auto& [labels, p] : mass) {
    out.push_back({PhonemeSequence(labels), std::log(p)});
  }
  std::sort(out.begin(), out.end(), ranks_before);
  return out;
}

Hypothesis exhaustive_decode(const LogPosteriorGram& gram) {
  return exhaustive_distribution(gram).front();
}

}  // namespace ctcphon
