// include/drivestate/audio.h

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

#ifndef DRIVESTATE_AUDIO_H_
#define DRIVESTATE_AUDIO_H_

#include <filesystem>
#include <span>
#include <string>
#include <vector>

namespace drivestate {

// Every clip is standardized to this rate on load.
inline constexpr int kStandardRate = 16000;

struct AudioClip {
  std::vector<double> samples;  // in [-1, 1]
  int sample_rate_hz = kStandardRate;
  std::string clip_id;

  double DurationSeconds() const {
    return static_cast<double>(samples.size()) / sample_rate_hz;
  }
};

// Raw decoded RIFF/WAVE content before standardization.
struct WavData {
  int sample_rate_hz = 0;
  int num_channels = 0;
  std::vector<std::vector<double>> channels;  // one vector per channel
};

// Decodes 8/16/24/32-bit integer PCM or 32-bit IEEE float WAVE data.
// Throws kBadFormat for anything else and kEmptyAudio for zero frames.
WavData ReadWav(const std::filesystem::path &path);
WavData ParseWav(std::span<const unsigned char> bytes);

// Loads, downmixes (channel mean) and resamples to kStandardRate.
AudioClip LoadAudio(const std::filesystem::path &path,
                    const std::string &clip_id = "");

// Standardizes already-decoded data; shared by LoadAudio and tests.
AudioClip Standardize(const WavData &wav, const std::string &clip_id = "");

// Unweighted mean across channels.
std::vector<double> Downmix(const std::vector<std::vector<double>> &channels);

// Anti-aliased linear-interpolation resampler. Output length is
// round(N * dst_rate / src_rate). Identity when the rates match.
std::vector<double> Resample(std::span<const double> input, int src_rate,
                             int dst_rate);

// 16-bit PCM mono writer. Samples are scaled by 32768 and clamped, which is
// the inverse of the reader's scaling, so 16-bit content round-trips exactly.
void WriteWav16(const std::filesystem::path &path, const AudioClip &clip);
std::vector<unsigned char> EncodeWav16(const AudioClip &clip);

}  // namespace drivestate

#endif  // DRIVESTATE_AUDIO_H_
