// include/drivestate/features_dsp.h

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

#ifndef DRIVESTATE_FEATURES_DSP_H_
#define DRIVESTATE_FEATURES_DSP_H_

#include <vector>

#include <Eigen/Dense>

#include "drivestate/audio.h"
#include "drivestate/feature_matrix.h"

namespace drivestate {

// 25 ms / 10 ms framing at 16 kHz, Hann window, 512-point FFT.
struct FrameSpec {
  int frame_len = 400;
  int hop = 160;
  int fft_size = 512;
};

struct Spectrogram {
  Eigen::MatrixXd magnitude;  // frames x (fft_size / 2 + 1), |X|, not power
  int sample_rate_hz = kStandardRate;
  int fft_size = 512;

  double BinHz() const { return static_cast<double>(sample_rate_hz) / fft_size; }
};

// Number of frames: 1 + floor((N - frame_len) / hop) when N >= frame_len,
// otherwise a single zero-padded frame.
int NumFrames(size_t num_samples, const FrameSpec &spec);

// Periodic Hann window of length n.
std::vector<double> HannWindow(int n);

Spectrogram ComputeStft(const AudioClip &clip, const FrameSpec &spec = {});

// HTK mel scale.
double HzToMel(double hz);
double MelToHz(double mel);

// Triangular filters with edges equally spaced on the mel scale between
// fmin and fmax; rows are filters, columns FFT bins.
Eigen::MatrixXd MelFilterbank(int n_mels, int fft_size, int sample_rate_hz,
                              double fmin_hz = 0.0, double fmax_hz = 8000.0);

struct MfccOptions {
  int n_mels = 26;
  int n_ceps = 13;  // c0..c12
  int delta_window = 2;
  double log_floor = 1e-10;
};

// Regression deltas over +/-window frames, edges replicated.
Eigen::MatrixXd Deltas(const Eigen::MatrixXd &frames, int window);

// Orthonormal DCT-II matrix (n_out x n_in).
Eigen::MatrixXd DctMatrix(int n_out, int n_in);

// c0..c12 followed by their deltas and delta-deltas: 39 columns.
FeatureTrack ComputeMfccTrack(const Spectrogram &spec, const MfccOptions &options = {});

// Centroid (Hz), bandwidth (Hz) and six octave-band contrasts per frame.
// Frames whose magnitude sum is below 1e-12 are all zero.
FeatureTrack ComputeSpectralDescriptors(const Spectrogram &spec);

// Per column mean and population std, interleaved as <name>_mean, <name>_std.
FeatureVector SummarizeTrack(const FeatureTrack &track);

// MFCC statistics (78) followed by spectral descriptor statistics (16).
FeatureVector ClassicalFeatureVector(const AudioClip &clip, const FrameSpec &spec = {});

inline constexpr int kClassicalDim = 94;

}  // namespace drivestate

#endif  // DRIVESTATE_FEATURES_DSP_H_
