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

#include "ctcphon/snr.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <iterator>
#include <string>

namespace ctcphon {

std::string_view to_string(NoiseBand band) {
  switch (band) {
    case NoiseBand::kLow: return "Low";
    case NoiseBand::kMedium: return "Medium";
    case NoiseBand::kHigh: return "High";
  }
  return "?";
}

NoiseBand noise_band(double snr_db) {
  if (snr_db > 25.0) return NoiseBand::kLow;
  if (snr_db < 10.0) return NoiseBand::kHigh;
  return NoiseBand::kMedium;
}

namespace {

double percentile(std::vector<double> sorted_copy, double q) {
  std::sort(sorted_copy.begin(), sorted_copy.end());
  const double pos = q * static_cast<double>(sorted_copy.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, sorted_copy.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return sorted_copy[lo] + frac * (sorted_copy[hi] - sorted_copy[lo]);
}

}  // namespace

double estimate_snr(std::span<const float> samples, double sample_rate) {
  if (sample_rate < 8000.0) {
    throw Error(ErrorCode::kTooShort, "sample rate below 8 kHz");
  }
  if (static_cast<double>(samples.size()) < 0.4 * sample_rate) {
    throw Error(ErrorCode::kTooShort, "need at least 400 ms of audio");
  }
  const auto window = static_cast<std::size_t>(std::lround(0.025 * sample_rate));
  const auto hop = static_cast<std::size_t>(std::lround(0.010 * sample_rate));
  const std::size_t frames = 1 + (samples.size() - window) / hop;

  std::vector<double> power(frames);
  for (std::size_t f = 0; f < frames; ++f) {
    double acc = 0.0;
    for (std::size_t i = f * hop; i < f * hop + window; ++i) {
      acc += static_cast<double>(samples[i]) * samples[i];
    }
    power[f] = acc / static_cast<double>(window);
  }
  if (std::all_of(power.begin(), power.end(), [](double p) { return p == 0.0; })) {
    throw Error(ErrorCode::kSilentSignal, "all frames have zero power");
  }

  const double noise = percentile(power, 0.10);
  const double loud = percentile(power, 0.90);
  if (noise <= 0.0) return kSnrCeilingDb;
  const double signal = loud - noise;
  if (signal <= 0.0) return kSnrFloorDb;
  return std::clamp(10.0 * std::log10(signal / noise), kSnrFloorDb, kSnrCeilingDb);
}

// ---------------------------------------------------------------------------
// WAV

namespace {

std::uint32_t le32(std::span<const std::byte> b, std::size_t off) {
  std::uint32_t v = 0;
  for (int i = 0; i < 4; ++i) v |= std::to_integer<std::uint32_t>(b[off + i]) << (8 * i);
  return v;
}

std::uint16_t le16(std::span<const std::byte> b, std::size_t off) {
  return static_cast<std::uint16_t>(std::to_integer<unsigned>(b[off]) |
                                    (std::to_integer<unsigned>(b[off + 1]) << 8));
}

bool tag_is(std::span<const std::byte> b, std::size_t off, const char* tag) {
  return std::memcmp(b.data() + off, tag, 4) == 0;
}

constexpr std::uint16_t kFormatPcm = 1;
constexpr std::uint16_t kFormatFloat = 3;
constexpr std::uint16_t kFormatExtensible = 0xFFFE;

}  // namespace

Waveform decode_wav(std::span<const std::byte> bytes) {
  if (bytes.size() < 12 || !tag_is(bytes, 0, "RIFF") || !tag_is(bytes, 8, "WAVE")) {
    throw Error(ErrorCode::kFormatError, "not a RIFF/WAVE file");
  }
  std::uint16_t format = 0, channels = 0, bits = 0;
  std::uint32_t rate = 0;
  bool have_fmt = false;
  std::span<const std::byte> payload;

  std::size_t off = 12;
  while (off + 8 <= bytes.size()) {
    const std::uint32_t size = le32(bytes, off + 4);
    const std::size_t body = off + 8;
    if (body + size > bytes.size()) {
      // Streaming writers sometimes leave a bogus data size; take the rest.
      if (tag_is(bytes, off, "data")) {
        payload = bytes.subspan(body);
        break;
      }
      throw Error(ErrorCode::kFormatError, "truncated chunk");
    }
    if (tag_is(bytes, off, "fmt ")) {
      if (size < 16) throw Error(ErrorCode::kFormatError, "short fmt chunk");
      format = le16(bytes, body);
      channels = le16(bytes, body + 2);
      rate = le32(bytes, body + 4);
      bits = le16(bytes, body + 14);
      if (format == kFormatExtensible && size >= 26) format = le16(bytes, body + 24);
      have_fmt = true;
    } else if (tag_is(bytes, off, "data")) {
      payload = bytes.subspan(body, size);
    }
    off = body + size + (size & 1);
  }
  if (!have_fmt || channels == 0) throw Error(ErrorCode::kFormatError, "missing fmt chunk");

  const bool pcm16 = format == kFormatPcm && bits == 16;
  const bool float32 = format == kFormatFloat && bits == 32;
  if (!pcm16 && !float32) {
    throw Error(ErrorCode::kFormatError, "unsupported WAV encoding (format " +
                                             std::to_string(format) + ", " +
                                             std::to_string(bits) + " bits)");
  }
  const std::size_t width = bits / 8;
  const std::size_t frames = payload.size() / (width * channels);

  Waveform wave;
  wave.sample_rate = rate;
  wave.samples.resize(frames);
  for (std::size_t f = 0; f < frames; ++f) {
    double acc = 0.0;
    for (std::size_t c = 0; c < channels; ++c) {
      const std::size_t at = (f * channels + c) * width;
      if (pcm16) {
        acc += static_cast<std::int16_t>(le16(payload, at)) / 32768.0;
      } else {
        acc += std::bit_cast<float>(le32(payload, at));
      }
    }
    wave.samples[f] = static_cast<float>(acc / channels);
  }
  return wave;
}

Waveform read_wav(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot open " + path.string());
  std::string raw{std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
  return decode_wav(std::as_bytes(std::span(raw.data(), raw.size())));
}

void write_wav_pcm16(const Waveform& wave, const std::filesystem::path& path) {
  std::string out;
  auto u32 = [&](std::uint32_t v) {
    for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
  };
  auto u16 = [&](std::uint16_t v) {
    out.push_back(static_cast<char>(v & 0xFF));
    out.push_back(static_cast<char>(v >> 8));
  };
  const auto rate = static_cast<std::uint32_t>(wave.sample_rate);
  const auto data_size = static_cast<std::uint32_t>(2 * wave.samples.size());
  out += "RIFF";
  u32(36 + data_size);
  out += "WAVEfmt ";
  u32(16);
  u16(kFormatPcm);
  u16(1);
  u32(rate);
  u32(rate * 2);
  u16(2);
  u16(16);
  out += "data";
  u32(data_size);
  for (float s : wave.samples) {
    const double clipped = std::clamp(static_cast<double>(s), -1.0, 32767.0 / 32768.0);
    u16(static_cast<std::uint16_t>(static_cast<std::int16_t>(std::lround(clipped * 32768.0))));
  }
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw Error(ErrorCode::kIo, "cannot write " + path.string());
  f.write(out.data(), static_cast<std::streamsize>(out.size()));
}

}  // namespace ctcphon
