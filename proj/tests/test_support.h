// tests/test_support.h

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

#ifndef DRIVESTATE_TESTS_TEST_SUPPORT_H_
#define DRIVESTATE_TESTS_TEST_SUPPORT_H_

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <random>
#include <string>
#include <vector>

#include "drivestate/segmenter.h"

namespace drivestate::testing {

// Scratch directory removed on scope exit.
class TempDir {
 public:
  explicit TempDir(const std::string &tag = "t") {
    std::random_device rd;
    path_ = std::filesystem::temp_directory_path() /
            ("drivestate_" + tag + "_" + std::to_string(rd()) + std::to_string(rd()));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir &) = delete;
  TempDir &operator=(const TempDir &) = delete;
  const std::filesystem::path &path() const { return path_; }
  std::filesystem::path operator/(const std::string &name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

inline void PutU16(std::vector<unsigned char> &b, uint32_t v) {
  b.push_back(v & 0xff);
  b.push_back((v >> 8) & 0xff);
}
inline void PutU32(std::vector<unsigned char> &b, uint32_t v) {
  for (int i = 0; i < 4; ++i) b.push_back((v >> (8 * i)) & 0xff);
}
inline void PutTag(std::vector<unsigned char> &b, const char *tag) {
  b.insert(b.end(), tag, tag + 4);
}

struct WavSpec {
  int format = 1;  // 1 PCM, 3 float, anything else is passed through
  int bits = 16;
  int rate = 16000;
  bool extensible = false;
};

// Independent RIFF writer: channels[c][f] in [-1, 1].
inline std::vector<unsigned char> BuildWav(const WavSpec &spec,
                                           const std::vector<std::vector<double>> &channels) {
  const int nch = static_cast<int>(channels.size());
  const size_t frames = nch ? channels[0].size() : 0;
  const int bps = spec.bits / 8;
  std::vector<unsigned char> data;
  for (size_t f = 0; f < frames; ++f) {
    for (int c = 0; c < nch; ++c) {
      const double v = channels[c][f];
      if (spec.format == 3) {
        float x = static_cast<float>(v);
        uint32_t u;
        std::memcpy(&u, &x, 4);
        PutU32(data, u);
      } else if (spec.bits == 8) {
        const long q = std::clamp(std::lround(v * 128.0), -128L, 127L);
        data.push_back(static_cast<unsigned char>(q + 128));
      } else {
        const double full = std::ldexp(1.0, spec.bits - 1);
        const long long top = static_cast<long long>(full);
        const long long q = std::clamp(std::llround(v * full), -top, top - 1);
        const uint64_t u = static_cast<uint64_t>(q);
        for (int i = 0; i < bps; ++i) data.push_back((u >> (8 * i)) & 0xff);
      }
    }
  }
  std::vector<unsigned char> fmt;
  PutU16(fmt, spec.extensible ? 0xFFFE : spec.format);
  PutU16(fmt, nch);
  PutU32(fmt, spec.rate);
  PutU32(fmt, spec.rate * nch * bps);
  PutU16(fmt, nch * bps);
  PutU16(fmt, spec.bits);
  if (spec.extensible) {
    PutU16(fmt, 22);
    PutU16(fmt, spec.bits);
    PutU32(fmt, 0);
    // Sub-format GUID: format code followed by the standard suffix.
    static const unsigned char kSuffix[14] = {0x00, 0x00, 0x00, 0x00, 0x10, 0x00, 0x80,
                                              0x00, 0x00, 0xAA, 0x00, 0x38, 0x9B, 0x71};
    PutU16(fmt, spec.format);
    fmt.insert(fmt.end(), kSuffix, kSuffix + 14);
  }
  std::vector<unsigned char> out;
  PutTag(out, "RIFF");
  PutU32(out, static_cast<uint32_t>(4 + 8 + fmt.size() + 8 + data.size()));
  PutTag(out, "WAVE");
  PutTag(out, "fmt ");
  PutU32(out, static_cast<uint32_t>(fmt.size()));
  out.insert(out.end(), fmt.begin(), fmt.end());
  PutTag(out, "data");
  PutU32(out, static_cast<uint32_t>(data.size()));
  out.insert(out.end(), data.begin(), data.end());
  return out;
}

inline void WriteBytes(const std::filesystem::path &path, const std::vector<unsigned char> &b) {
  std::ofstream out(path, std::ios::binary);
  out.write(reinterpret_cast<const char *>(b.data()), static_cast<std::streamsize>(b.size()));
}

inline std::string ReadText(const std::filesystem::path &path) {
  std::ifstream in(path, std::ios::binary);
  return std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

inline std::vector<double> Sine(size_t n, double hz, double amp, int rate = 16000) {
  std::vector<double> x(n);
  for (size_t i = 0; i < n; ++i) x[i] = amp * std::sin(2.0 * M_PI * hz * i / rate);
  return x;
}

// Word tokens for phrases read back to back with fixed word and gap lengths.
struct Session {
  std::vector<WordToken> tokens;
  std::vector<std::pair<double, double>> spans;  // per phrase, in input order
};

inline Session BuildSession(const PhraseSet &phrases, double word_s = 0.3,
                            double gap_s = 0.6) {
  Session session;
  double t = 0.5;
  for (const Phrase &p : phrases.phrases()) {
    const double start = t;
    for (const std::string &w : NormalizeText(p.text)) {
      session.tokens.push_back({w, t, t + word_s});
      t += word_s + 0.05;
    }
    session.spans.emplace_back(start, session.tokens.back().end_s);
    t += gap_s;
  }
  return session;
}

}  // namespace drivestate::testing

#endif  // DRIVESTATE_TESTS_TEST_SUPPORT_H_
