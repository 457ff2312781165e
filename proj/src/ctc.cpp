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

#include "ctcphon/ctc.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace ctcphon {
namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();
constexpr double kInf = std::numeric_limits<double>::infinity();

void check_labels(const LogPosteriorGram& gram, const PhonemeSequence& target) {
  for (Label l : target) {
    if (l >= gram.classes()) {
      throw Error(ErrorCode::kInvalidLabel,
                  "label " + std::to_string(l) + " >= V=" + std::to_string(gram.classes()));
    }
  }
}

// Blank-interleaved target: b l1 b l2 ... lN b.
std::vector<Label> extend(const PhonemeSequence& target) {
  std::vector<Label> ext(2 * target.size() + 1, kBlank);
  for (std::size_t i = 0; i < target.size(); ++i) ext[2 * i + 1] = target[i];
  return ext;
}

// Whether state s may be entered from s-2 (skipping a blank).
bool can_skip(const std::vector<Label>& ext, std::size_t s) {
  return s >= 2 && ext[s] != kBlank && ext[s] != ext[s - 2];
}

struct Lattice {
  std::size_t states = 0;
  std::vector<double> alpha;  // T x S, includes emission at t
  std::vector<double> beta;   // T x S, excludes emission at t
  double log_likelihood = kNegInf;
};

Lattice forward_backward(const LogPosteriorGram& gram, const std::vector<Label>& ext,
                         bool want_beta) {
  const std::size_t T = gram.frames();
  const std::size_t S = ext.size();
  Lattice lat;
  lat.states = S;
  if (T == 0) {
    lat.log_likelihood = S == 1 ? 0.0 : kNegInf;
    return lat;
  }
  lat.alpha.assign(T * S, kNegInf);
  auto a = [&](std::size_t t, std::size_t s) -> double& { return lat.alpha[t * S + s]; };

  a(0, 0) = gram(0, ext[0]);
  if (S > 1) a(0, 1) = gram(0, ext[1]);
  for (std::size_t t = 1; t < T; ++t) {
    // States that cannot reach the final two in the remaining frames are
    // left at -inf implicitly; the recursion stays exact without pruning.
    for (std::size_t s = 0; s < S; ++s) {
      double acc = a(t - 1, s);
      if (s >= 1) acc = log_add(acc, a(t - 1, s - 1));
      if (can_skip(ext, s)) acc = log_add(acc, a(t - 1, s - 2));
      a(t, s) = acc == kNegInf ? kNegInf : acc + gram(t, ext[s]);
    }
  }
  lat.log_likelihood = a(T - 1, S - 1);
  if (S > 1) lat.log_likelihood = log_add(lat.log_likelihood, a(T - 1, S - 2));

  if (!want_beta) return lat;

  lat.beta.assign(T * S, kNegInf);
  auto b = [&](std::size_t t, std::size_t s) -> double& { return lat.beta[t * S + s]; };
  b(T - 1, S - 1) = 0.0;
  if (S > 1) b(T - 1, S - 2) = 0.0;
  for (std::size_t t = T - 1; t-- > 0;) {
    for (std::size_t s = 0; s < S; ++s) {
      double acc = b(t + 1, s) == kNegInf ? kNegInf : b(t + 1, s) + gram(t + 1, ext[s]);
      if (s + 1 < S && b(t + 1, s + 1) != kNegInf) {
        acc = log_add(acc, b(t + 1, s + 1) + gram(t + 1, ext[s + 1]));
      }
      if (s + 2 < S && can_skip(ext, s + 2) && b(t + 1, s + 2) != kNegInf) {
        acc = log_add(acc, b(t + 1, s + 2) + gram(t + 1, ext[s + 2]));
      }
      b(t, s) = acc;
    }
  }
  return lat;
}

Matrix gradient_from_lattice(const LogPosteriorGram& gram, const std::vector<Label>& ext,
                             const Lattice& lat) {
  const std::size_t T = gram.frames();
  const std::size_t V = gram.classes();
  const std::size_t S = lat.states;
  Matrix grad(T, V);
  std::vector<double> occupancy(V);
  for (std::size_t t = 0; t < T; ++t) {
    // softmax of the row, renormalized so the row sums to exactly one even
    // when the stored log-probabilities are only normalized to tolerance.
    auto row = gram.row(t);
    const double lse = log_sum_exp(row);
    std::fill(occupancy.begin(), occupancy.end(), kNegInf);
    for (std::size_t s = 0; s < S; ++s) {
      const double a = lat.alpha[t * S + s];
      const double b = lat.beta[t * S + s];
      if (a == kNegInf || b == kNegInf) continue;
      occupancy[ext[s]] = log_add(occupancy[ext[s]], a + b);
    }
    for (std::size_t v = 0; v < V; ++v) {
      const double gamma = std::exp(occupancy[v] - lat.log_likelihood);
      grad(t, v) = std::exp(row[v] - lse) - gamma;
    }
  }
  return grad;
}

// Renormalizes rows exactly so the likelihood used for gamma matches the
// softmax used for the gradient.
LogPosteriorGram renormalized(const LogPosteriorGram& gram) {
  return LogPosteriorGram::from_logits(gram.frames(), gram.classes(), gram.data());
}

}  // namespace

std::size_t ctc_min_frames(const PhonemeSequence& target) {
  std::size_t n = target.size();
  for (std::size_t i = 1; i < target.size(); ++i) {
    if (target[i] == target[i - 1]) ++n;
  }
  return n;
}

CtcLoss ctc_nll(const LogPosteriorGram& gram, const PhonemeSequence& target) {
  check_labels(gram, target);
  if (gram.frames() < ctc_min_frames(target)) return {kInf, std::nullopt};
  const auto ext = extend(target);
  const Lattice lat = forward_backward(gram, ext, false);
  return {-lat.log_likelihood, std::nullopt};
}

CtcLoss ctc_nll_with_gradient(const LogPosteriorGram& gram, const PhonemeSequence& target) {
  check_labels(gram, target);
  if (gram.frames() < ctc_min_frames(target)) {
    throw Error(ErrorCode::kInfeasibleTarget,
                std::to_string(target.size()) + " labels need " +
                    std::to_string(ctc_min_frames(target)) + " frames, have " +
                    std::to_string(gram.frames()));
  }
  const LogPosteriorGram norm = renormalized(gram);
  const auto ext = extend(target);
  const Lattice lat = forward_backward(norm, ext, true);
  if (!std::isfinite(lat.log_likelihood)) {
    throw Error(ErrorCode::kInfeasibleTarget, "zero-probability target");
  }
  return {-lat.log_likelihood, gradient_from_lattice(norm, ext, lat)};
}

Matrix ctc_gradient(const LogPosteriorGram& gram, const PhonemeSequence& target) {
  return *ctc_nll_with_gradient(gram, target).per_frame_gradient;
}

double ctc_nll_bruteforce(const LogPosteriorGram& gram, const PhonemeSequence& target) {
  check_labels(gram, target);
  const std::size_t T = gram.frames();
  const std::size_t V = gram.classes();
  double paths = 1.0;
  for (std::size_t t = 0; t < T; ++t) paths *= static_cast<double>(V);
  if (paths > 1e7) {
    throw Error(ErrorCode::kOracleTooLarge, std::to_string(V) + "^" + std::to_string(T));
  }
  const auto total = static_cast<std::size_t>(paths);

  // Neumaier summation.
  double sum = 0.0, comp = 0.0;
  std::vector<Label> path(T, 0);
  std::vector<Label> collapsed;
  collapsed.reserve(T);
  for (std::size_t n = 0; n < total; ++n) {
    std::size_t code = n;
    for (std::size_t t = 0; t < T; ++t) {
      path[t] = static_cast<Label>(code % V);
      code /= V;
    }
    collapsed.clear();
    Label prev = kBlank;
    for (std::size_t t = 0; t < T; ++t) {
      if (path[t] != kBlank && (t == 0 || path[t] != prev)) collapsed.push_back(path[t]);
      prev = path[t];
    }
    if (!std::equal(collapsed.begin(), collapsed.end(), target.begin(), target.end())) continue;
    double logp = 0.0;
    for (std::size_t t = 0; t < T; ++t) logp += gram(t, path[t]);
    const double p = std::exp(logp);
    const double s = sum + p;
    comp += std::abs(sum) >= std::abs(p) ? (sum - s) + p : (p - s) + sum;
    sum = s;
  }
  const double prob = sum + comp;
  return prob > 0.0 ? -std::log(prob) : kInf;
}

std::vector<double> batch_ctc_nll(std::span<const LogPosteriorGram> grams,
                                  std::span<const PhonemeSequence> targets, int jobs) {
  if (grams.size() != targets.size()) throw Error(ErrorCode::kShapeMismatch, "batch sizes");
  std::vector<double> out(grams.size());
  const auto n = static_cast<std::ptrdiff_t>(grams.size());
#pragma omp parallel for schedule(dynamic) num_threads(std::max(1, jobs))
  for (std::ptrdiff_t i = 0; i < n; ++i) out[i] = ctc_nll(grams[i], targets[i]).nll;
  return out;
}

std::vector<double> batch_ctc_nll_serial(std::span<const LogPosteriorGram> grams,
                                         std::span<const PhonemeSequence> targets) {
  if (grams.size() != targets.size()) throw Error(ErrorCode::kShapeMismatch, "batch sizes");
  std::vector<double> out;
  out.reserve(grams.size());
  for (std::size_t i = 0; i < grams.size(); ++i) out.push_back(ctc_nll(grams[i], targets[i]).nll);
  return out;
}

}  // namespace ctcphon
