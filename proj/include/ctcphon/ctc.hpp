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

#include <optional>
#include <span>
#include <vector>

#include "ctcphon/core.hpp"

namespace ctcphon {

/// Row-major T x V matrix of real values (gradients, logits).
struct Matrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> data;

  Matrix() = default;
  Matrix(std::size_t r, std::size_t c, double fill = 0.0) : rows(r), cols(c), data(r * c, fill) {}

  double& operator()(std::size_t r, std::size_t c) { return data[r * cols + c]; }
  double operator()(std::size_t r, std::size_t c) const { return data[r * cols + c]; }
};

struct CtcLoss {
  double nll = 0.0;  // nats; +inf when no alignment exists
  std::optional<Matrix> per_frame_gradient;
};

/// Minimum frame count for `target`: one frame per label plus one blank
/// between each pair of equal adjacent labels.
std::size_t ctc_min_frames(const PhonemeSequence& target);

/// Negative log-likelihood of `target` under `gram`, summed over every
/// alignment that collapses to it. Log-domain alpha recursion over the
/// blank-interleaved label sequence. Infeasible targets give +inf.
CtcLoss ctc_nll(const LogPosteriorGram& gram, const PhonemeSequence& target);

/// Gradient of the NLL with respect to the pre-softmax logits whose
/// log-softmax is `gram`: softmax(row) - gamma, with gamma the posterior
/// occupancy of each class from alpha-beta. To get the gradient with respect
/// to log-probabilities instead, use -gamma.
/// Throws InfeasibleTarget when the loss is infinite.
Matrix ctc_gradient(const LogPosteriorGram& gram, const PhonemeSequence& target);

/// Loss and gradient in one forward-backward pass.
CtcLoss ctc_nll_with_gradient(const LogPosteriorGram& gram, const PhonemeSequence& target);

/// Test oracle: enumerates all V^T frame paths, keeps those that collapse to
/// `target` and sums their probabilities with compensated summation.
/// Throws OracleTooLarge when V^T > 1e7.
double ctc_nll_bruteforce(const LogPosteriorGram& gram, const PhonemeSequence& target);

/// CTC loss over a batch of (gram, target) pairs, OpenMP-parallel; the serial
/// variant is the reference.
std::vector<double> batch_ctc_nll(std::span<const LogPosteriorGram> grams,
                                  std::span<const PhonemeSequence> targets, int jobs);
std::vector<double> batch_ctc_nll_serial(std::span<const LogPosteriorGram> grams,
                                         std::span<const PhonemeSequence> targets);

}  // namespace ctcphon
