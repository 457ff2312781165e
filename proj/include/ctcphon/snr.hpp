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

#include <filesystem>
#include <span>
#include <string_view>
#include <vector>

#include "ctcphon/error.hpp"

namespace ctcphon {

enum class NoiseBand { kLow, kMedium, kHigh };

inline constexpr NoiseBand kAllBands[] = {NoiseBand::kLow, NoiseBand::kMedium, NoiseBand::kHigh};

std::string_view to_string(NoiseBand band);

/// Low above 25 dB, High below 10 dB, Medium on the closed interval between.
NoiseBand noise_band(double snr_db);

inline constexpr double kSnrFloorDb = -10.0;
inline constexpr double kSnrCeilingDb = 60.0;

/// Percentile frame-power SNR. Frames are 25 ms rectangular windows with a
/// 10 ms hop; the noise floor is the 10th percentile of frame mean power and
/// the loud-frame power the 90th. Since loud frames carry signal plus noise,
/// the signal power is the difference of the two:
///
///   snr = 10 log10((p90 - p10) / p10), clamped to [-10, 60] dB.
///
/// Percentiles use linear interpolation between order statistics.
/// Throws TooShort below 400 ms or 8 kHz, SilentSignal for an all-zero input.
double estimate_snr(std::span<const float> samples, double sample_rate);

struct Waveform {
  double sample_rate = 0.0;
  std::vector<float> samples;  // mono, nominally in [-1, 1]
};

/// RIFF/WAVE reader for 16-bit PCM and 32-bit IEEE float. Multi-channel input
/// is averaged to mono.
Waveform read_wav(const std::filesystem::path& path);
Waveform decode_wav(std::span<const std::byte> bytes);

/// Mono 16-bit PCM writer (test fixtures).
void write_wav_pcm16(const Waveform& wave, const std::filesystem::path& path);

}  // namespace ctcphon
