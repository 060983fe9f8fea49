// include/drivestate/features_voice.h

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

#ifndef DRIVESTATE_FEATURES_VOICE_H_
#define DRIVESTATE_FEATURES_VOICE_H_

#include <vector>

#include "drivestate/audio.h"
#include "drivestate/feature_matrix.h"

namespace drivestate {

struct PitchOptions {
  double min_f0_hz = 50.0;
  double max_f0_hz = 400.0;
  double voicing_threshold = 0.3;
  double peak_ratio = 0.75;        // earliest lag peak within this fraction of the best wins
  double confident_clarity = 0.7;  // frames that set the reference period
  double octave_cost = 0.6;        // clarity penalty per octave from the reference
  int frame_len = 640;             // 40 ms
  int hop = 160;                   // 10 ms
};

struct PitchTrack {
  std::vector<double> f0_hz;    // 0 when unvoiced, else within [min, max]
  std::vector<double> clarity;  // normalized autocorrelation peak, [0, 1]
  std::vector<bool> voiced;     // clarity >= voicing threshold
  int frame_len = 640;
  int hop = 160;

  size_t size() const { return f0_hz.size(); }
};

PitchTrack EstimateF0Track(const AudioClip &clip, const PitchOptions &options = {});

struct Perturbations {
  double jitter_local = 0.0;
  double shimmer_local = 0.0;
  double hnr_db = 0.0;
  bool insufficient_voicing = false;
};

// Cycle marks are peak-picked within voiced runs of at least three frames,
// guided by the local f0. Jitter and shimmer are mean absolute consecutive
// differences of cycle period / peak amplitude over their means. HNR comes
// from the mean voiced clarity r as 10 log10(r / (1 - r)).
Perturbations ComputePerturbations(const AudioClip &clip, const PitchTrack &pitch);

// Cycle marks (sample positions, sub-sample refined) and peak amplitudes of
// each voiced run. Exposed for tests.
struct CycleRun {
  std::vector<double> positions;
  std::vector<double> amplitudes;
};
std::vector<CycleRun> FindCycleMarks(const AudioClip &clip, const PitchTrack &pitch);

double HnrFromClarity(double clarity);

// Least-squares slope of log magnitude against log frequency in
// [200, 5000] Hz, averaged over non-silent frames.
double SpectralSlope(const AudioClip &clip);
// 10 log10(energy 50-1000 Hz / energy 1000-5000 Hz) over the whole clip.
double AlphaRatioDb(const AudioClip &clip);

// f0_mean, f0_std, voiced_fraction, jitter_local, shimmer_local, hnr_db,
// rms_mean, rms_std, spectral_slope, alpha_ratio_db.
FeatureVector VoiceQualityVector(const AudioClip &clip);

inline constexpr int kVoiceQualityDim = 10;
const std::vector<std::string> &VoiceQualityNames();

}  // namespace drivestate

#endif  // DRIVESTATE_FEATURES_VOICE_H_
