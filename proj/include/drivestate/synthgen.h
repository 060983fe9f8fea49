// include/drivestate/synthgen.h

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

#ifndef DRIVESTATE_SYNTHGEN_H_
#define DRIVESTATE_SYNTHGEN_H_

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "drivestate/audio.h"
#include "drivestate/manifest.h"
#include "drivestate/rng.h"
#include "drivestate/segmenter.h"
#include "json.hpp"

namespace drivestate {

struct SynthEffect {
  double f0_drop_frac = 0.0;
  double jitter_mult = 1.0;
  double shimmer_mult = 1.0;
  double rate_slowdown_frac = 0.0;

  static SynthEffect Null() { return {}; }
  static SynthEffect Strong() { return {0.15, 4.0, 4.0, 0.3}; }
};

struct SynthSpec {
  int n_subjects = 12;
  int clips_per_condition = 12;
  SynthEffect effect;
  double subject_variability_sd = 0.25;
  // Sober-condition perturbation levels before per-subject scaling.
  double base_jitter = 0.006;
  double base_shimmer = 0.04;
  uint64_t seed = 0;
  double snr_db = 20.0;
  // Surrogate embedding files for the two pretrained-model feature sets.
  bool write_embeddings = true;

  // Throws kConfig on counts < 1, multipliers < 1, f0 drop outside [0, 1)
  // or negative slowdown.
  void Validate() const;
  nlohmann::json ToJson() const;
};

// Per-period perturbation levels are relative standard deviations.
struct VoiceParams {
  double f0_hz = 120.0;
  double jitter = 0.0;
  double shimmer = 0.0;
  // Linear f0 glide over the signal, as end/start ratio.
  double f0_glide = 1.0;
};

struct VoicedSignal {
  std::vector<double> samples;
  std::vector<double> periods;     // generated periods in samples
  std::vector<double> amplitudes;  // generated pulse amplitudes
};

// Impulse train with fractional pulse positions, per-period jitter and
// amplitude shimmer, through a glottal tilt and two resonators
// (500 Hz / 80 Hz and 1500 Hz / 120 Hz). Noise free.
VoicedSignal SynthesizeVoiced(size_t num_samples, const VoiceParams &params, Rng &rng,
                              int sample_rate_hz = kStandardRate);

// Kellet-filtered Gaussian noise.
std::vector<double> PinkNoise(size_t num_samples, Rng &rng);

// Adds noise scaled to the requested SNR relative to the signal power.
void AddNoise(std::vector<double> &signal, const std::vector<double> &noise, double snr_db);

struct SynthUtterance {
  AudioClip audio;
  std::vector<WordToken> words;
};

// Speaks a phrase over 'speech_s' seconds: one uniform slot per word, voiced
// for the first 80% of the slot, with 0.2 s of padding on both sides.
SynthUtterance SynthesizeUtterance(const Phrase &phrase, const VoiceParams &voice,
                                   double speech_s, double snr_db, Rng &rng,
                                   const std::string &clip_id);

struct SubjectVoice {
  double f0_hz = 0.0;
  double jitter = 0.0;
  double shimmer = 0.0;
};

SubjectVoice DrawSubjectVoice(const SynthSpec &spec, int subject_index);

struct SubjectData {
  std::vector<ManifestEntry> entries;  // audio/transcript paths relative
  std::vector<SynthUtterance> clips;
};

std::string SubjectId(int subject_index);

// Sober clips first, then impaired. Clip k speaks phrase k mod 12.
SubjectData GenerateSubject(const SynthSpec &spec, int subject_index);

// Random-projection stand-in for a pretrained encoder: log-mel frames
// averaged in 50 ms steps, projected with a seeded matrix and squashed by
// tanh. Returns T x dim.
Eigen::MatrixXd SurrogateEmbeddingFrames(const AudioClip &clip, int dim,
                                         uint64_t projection_seed);

// Writes manifest.csv, audio/, transcripts/ and (optionally)
// embeddings/wav2vec2_large.txt (pooled) and embeddings/wavlm_large.txt
// (frame blocks). Both embedding files hold clip-level entries and
// "<clip>@w<k>" window entries. Returns the manifest.
Manifest GenerateDataset(const SynthSpec &spec, const std::filesystem::path &out_dir,
                         int workers = 1);

}  // namespace drivestate

#endif  // DRIVESTATE_SYNTHGEN_H_
