// src/audio.cc

// Copyright 2026 The drivestate Authors.
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

#include "drivestate/audio.h"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <iterator>
#include <numbers>

#include "drivestate/error.h"

namespace drivestate {
namespace {

uint16_t ReadU16(const unsigned char *p) {
  return static_cast<uint16_t>(p[0] | (p[1] << 8));
}

uint32_t ReadU32(const unsigned char *p) {
  return static_cast<uint32_t>(p[0]) | (static_cast<uint32_t>(p[1]) << 8) |
         (static_cast<uint32_t>(p[2]) << 16) |
         (static_cast<uint32_t>(p[3]) << 24);
}

void PutU16(std::vector<unsigned char> *out, uint16_t v) {
  out->push_back(v & 0xff);
  out->push_back((v >> 8) & 0xff);
}

void PutU32(std::vector<unsigned char> *out, uint32_t v) {
  for (int i = 0; i < 4; ++i) out->push_back((v >> (8 * i)) & 0xff);
}

constexpr uint16_t kFormatPcm = 1;
constexpr uint16_t kFormatFloat = 3;
constexpr uint16_t kFormatExtensible = 0xfffe;

double DecodeSample(const unsigned char *p, uint16_t format, int bits) {
  if (format == kFormatFloat) {
    float f;
    std::memcpy(&f, p, sizeof(f));
    if (!std::isfinite(f)) throw Error(ErrorCode::kBadFormat, "non-finite float sample");
    return std::clamp(static_cast<double>(f), -1.0, 1.0);
  }
  switch (bits) {
    case 8:
      return (static_cast<int>(p[0]) - 128) / 128.0;
    case 16:
      return static_cast<int16_t>(ReadU16(p)) / 32768.0;
    case 24: {
      int32_t v = static_cast<int32_t>(p[0] | (p[1] << 8) | (p[2] << 16));
      if (v & 0x800000) v -= 0x1000000;
      return v / 8388608.0;
    }
    case 32:
      return static_cast<int32_t>(ReadU32(p)) / 2147483648.0;
  }
  throw Error(ErrorCode::kBadFormat, "unsupported bit depth");
}

}  // namespace

WavData ParseWav(std::span<const unsigned char> bytes) {
  if (bytes.size() < 12 || std::memcmp(bytes.data(), "RIFF", 4) != 0 ||
      std::memcmp(bytes.data() + 8, "WAVE", 4) != 0) {
    throw Error(ErrorCode::kBadFormat, "not a RIFF/WAVE file");
  }
  bool have_fmt = false;
  uint16_t format = 0;
  int channels = 0, rate = 0, bits = 0, block_align = 0;
  const unsigned char *data = nullptr;
  size_t data_size = 0;

  size_t pos = 12;
  while (pos + 8 <= bytes.size()) {
    const unsigned char *chunk = bytes.data() + pos;
    const size_t size = ReadU32(chunk + 4);
    const size_t body = pos + 8;
    const size_t avail = std::min(size, bytes.size() - body);
    if (std::memcmp(chunk, "fmt ", 4) == 0) {
      if (avail < 16) throw Error(ErrorCode::kBadFormat, "short fmt chunk");
      format = ReadU16(chunk + 8);
      channels = ReadU16(chunk + 10);
      rate = static_cast<int>(ReadU32(chunk + 12));
      block_align = ReadU16(chunk + 20);
      bits = ReadU16(chunk + 22);
      if (format == kFormatExtensible) {
        if (avail < 40) throw Error(ErrorCode::kBadFormat, "short extensible fmt chunk");
        format = ReadU16(chunk + 8 + 24);
      }
      have_fmt = true;
    } else if (std::memcmp(chunk, "data", 4) == 0) {
      data = chunk + 8;
      // Truncated files are tolerated; only whole frames are decoded.
      data_size = avail;
    }
    pos = body + size + (size & 1);
  }
  if (!have_fmt || data == nullptr) {
    throw Error(ErrorCode::kBadFormat, "missing fmt or data chunk");
  }
  const bool int_ok = format == kFormatPcm &&
                      (bits == 8 || bits == 16 || bits == 24 || bits == 32);
  const bool float_ok = format == kFormatFloat && bits == 32;
  if (!int_ok && !float_ok) {
    throw Error(ErrorCode::kBadFormat,
                "unsupported encoding (format " + std::to_string(format) +
                    ", " + std::to_string(bits) + " bits)");
  }
  if (channels < 1 || channels > 2) {
    throw Error(ErrorCode::kBadFormat,
                "unsupported channel count " + std::to_string(channels));
  }
  if (rate <= 0) throw Error(ErrorCode::kBadFormat, "invalid sample rate");
  const int bytes_per_sample = bits / 8;
  if (block_align != bytes_per_sample * channels) {
    throw Error(ErrorCode::kBadFormat, "inconsistent block alignment");
  }
  const size_t frames = data_size / block_align;
  if (frames == 0) throw Error(ErrorCode::kEmptyAudio, "no audio frames");

  WavData wav;
  wav.sample_rate_hz = rate;
  wav.num_channels = channels;
  wav.channels.assign(channels, std::vector<double>(frames));
  for (size_t f = 0; f < frames; ++f) {
    for (int c = 0; c < channels; ++c) {
      const unsigned char *p = data + f * block_align + c * bytes_per_sample;
      wav.channels[c][f] = DecodeSample(p, format, bits);
    }
  }
  return wav;
}

WavData ReadWav(const std::filesystem::path &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot open " + path.string());
  std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(in)),
                                   std::istreambuf_iterator<char>());
  return ParseWav(bytes);
}

std::vector<double> Downmix(const std::vector<std::vector<double>> &channels) {
  if (channels.empty()) return {};
  if (channels.size() == 1) return channels[0];
  const size_t n = channels[0].size();
  std::vector<double> mono(n, 0.0);
  for (const auto &ch : channels) {
    for (size_t i = 0; i < n; ++i) mono[i] += ch[i];
  }
  const double scale = 1.0 / static_cast<double>(channels.size());
  for (double &v : mono) v *= scale;
  return mono;
}

std::vector<double> Resample(std::span<const double> input, int src_rate,
                             int dst_rate) {
  if (src_rate == dst_rate) return {input.begin(), input.end()};
  const int64_t n = static_cast<int64_t>(input.size());
  const int64_t m = static_cast<int64_t>(
      std::llround(static_cast<double>(n) * dst_rate / src_rate));
  if (n == 0 || m == 0) return {};

  // Low-pass at the source rate; cutoff in cycles per source sample.
  const double cutoff =
      std::min(0.45 * src_rate, 0.45 * dst_rate) / static_cast<double>(src_rate);
  const int half = static_cast<int>(std::ceil(16.0 / (2.0 * cutoff)));
  std::vector<double> taps(2 * half + 1);
  double sum = 0.0;
  for (int k = -half; k <= half; ++k) {
    const double x = 2.0 * cutoff * k;
    const double sinc =
        k == 0 ? 1.0 : std::sin(std::numbers::pi * x) / (std::numbers::pi * x);
    const double window =
        0.5 + 0.5 * std::cos(std::numbers::pi * k / (half + 1.0));
    taps[k + half] = 2.0 * cutoff * sinc * window;
    sum += taps[k + half];
  }
  for (double &t : taps) t /= sum;

  std::vector<double> filtered(n, 0.0);
  for (int64_t i = 0; i < n; ++i) {
    const int64_t lo = std::max<int64_t>(0, i - half);
    const int64_t hi = std::min<int64_t>(n - 1, i + half);
    double acc = 0.0;
    for (int64_t j = lo; j <= hi; ++j) acc += input[j] * taps[i - j + half];
    filtered[i] = acc;
  }

  std::vector<double> out(m);
  for (int64_t j = 0; j < m; ++j) {
    // Exact rational position j * src / dst.
    const int64_t num = j * src_rate;
    const int64_t idx = num / dst_rate;
    const double frac = static_cast<double>(num % dst_rate) / dst_rate;
    const double a = filtered[std::min(idx, n - 1)];
    const double b = filtered[std::min(idx + 1, n - 1)];
    out[j] = std::clamp(a + frac * (b - a), -1.0, 1.0);
  }
  return out;
}

AudioClip Standardize(const WavData &wav, const std::string &clip_id) {
  AudioClip clip;
  clip.clip_id = clip_id;
  clip.sample_rate_hz = kStandardRate;
  const std::vector<double> mono = Downmix(wav.channels);
  clip.samples = Resample(mono, wav.sample_rate_hz, kStandardRate);
  if (clip.samples.empty()) throw Error(ErrorCode::kEmptyAudio, "no samples after resampling");
  return clip;
}

AudioClip LoadAudio(const std::filesystem::path &path,
                    const std::string &clip_id) {
  return Standardize(ReadWav(path), clip_id);
}

std::vector<unsigned char> EncodeWav16(const AudioClip &clip) {
  const uint32_t data_bytes = static_cast<uint32_t>(clip.samples.size() * 2);
  std::vector<unsigned char> out;
  out.reserve(44 + data_bytes);
  const char *riff = "RIFF";
  out.insert(out.end(), riff, riff + 4);
  PutU32(&out, 36 + data_bytes);
  const char *wave_fmt = "WAVEfmt ";
  out.insert(out.end(), wave_fmt, wave_fmt + 8);
  PutU32(&out, 16);
  PutU16(&out, kFormatPcm);
  PutU16(&out, 1);
  PutU32(&out, static_cast<uint32_t>(clip.sample_rate_hz));
  PutU32(&out, static_cast<uint32_t>(clip.sample_rate_hz) * 2);
  PutU16(&out, 2);
  PutU16(&out, 16);
  const char *data = "data";
  out.insert(out.end(), data, data + 4);
  PutU32(&out, data_bytes);
  for (double s : clip.samples) {
    const double scaled = std::clamp(std::round(s * 32768.0), -32768.0, 32767.0);
    PutU16(&out, static_cast<uint16_t>(static_cast<int16_t>(scaled)));
  }
  return out;
}

void WriteWav16(const std::filesystem::path &path, const AudioClip &clip) {
  const std::vector<unsigned char> bytes = EncodeWav16(clip);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::kIo, "cannot write " + path.string());
  out.write(reinterpret_cast<const char *>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error(ErrorCode::kIo, "write failed for " + path.string());
}

}  // namespace drivestate
