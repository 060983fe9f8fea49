// src/features_dsp.cc

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

#include "drivestate/features_dsp.h"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "drivestate/fft.h"

namespace drivestate {
namespace {

constexpr double kSilenceMagnitude = 1e-12;

// Octave bands for spectral contrast; the last one is closed at Nyquist.
constexpr double kContrastEdges[] = {200.0, 400.0, 800.0, 1600.0, 3200.0, 6400.0, 8000.0};
constexpr int kContrastBands = 6;

}  // namespace

int NumFrames(size_t num_samples, const FrameSpec &spec) {
  if (num_samples < static_cast<size_t>(spec.frame_len)) return 1;
  return 1 + static_cast<int>((num_samples - spec.frame_len) / spec.hop);
}

std::vector<double> HannWindow(int n) {
  std::vector<double> w(n);
  for (int i = 0; i < n; ++i) {
    w[i] = 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * i / n);
  }
  return w;
}

Spectrogram ComputeStft(const AudioClip &clip, const FrameSpec &spec) {
  const int frames = NumFrames(clip.samples.size(), spec);
  const int bins = spec.fft_size / 2 + 1;
  const std::vector<double> window = HannWindow(spec.frame_len);

  Spectrogram out;
  out.sample_rate_hz = clip.sample_rate_hz;
  out.fft_size = spec.fft_size;
  out.magnitude.resize(frames, bins);

  std::vector<std::complex<double>> buf(spec.fft_size);
  for (int t = 0; t < frames; ++t) {
    std::fill(buf.begin(), buf.end(), std::complex<double>());
    const size_t start = static_cast<size_t>(t) * spec.hop;
    for (int i = 0; i < spec.frame_len; ++i) {
      const size_t idx = start + i;
      if (idx >= clip.samples.size()) break;
      buf[i] = clip.samples[idx] * window[i];
    }
    Fft(buf);
    for (int k = 0; k < bins; ++k) out.magnitude(t, k) = std::abs(buf[k]);
  }
  return out;
}

double HzToMel(double hz) { return 2595.0 * std::log10(1.0 + hz / 700.0); }
double MelToHz(double mel) { return 700.0 * (std::pow(10.0, mel / 2595.0) - 1.0); }

Eigen::MatrixXd MelFilterbank(int n_mels, int fft_size, int sample_rate_hz,
                              double fmin_hz, double fmax_hz) {
  const int bins = fft_size / 2 + 1;
  const double mel_lo = HzToMel(fmin_hz);
  const double mel_hi = HzToMel(fmax_hz);
  std::vector<double> edges(n_mels + 2);
  for (int i = 0; i < n_mels + 2; ++i) {
    edges[i] = MelToHz(mel_lo + (mel_hi - mel_lo) * i / (n_mels + 1));
  }
  Eigen::MatrixXd fb = Eigen::MatrixXd::Zero(n_mels, bins);
  const double bin_hz = static_cast<double>(sample_rate_hz) / fft_size;
  for (int m = 0; m < n_mels; ++m) {
    const double left = edges[m], center = edges[m + 1], right = edges[m + 2];
    for (int k = 0; k < bins; ++k) {
      const double f = k * bin_hz;
      if (f > left && f < center) {
        fb(m, k) = (f - left) / (center - left);
      } else if (f >= center && f < right) {
        fb(m, k) = (right - f) / (right - center);
      }
    }
  }
  return fb;
}

Eigen::MatrixXd DctMatrix(int n_out, int n_in) {
  Eigen::MatrixXd d(n_out, n_in);
  for (int k = 0; k < n_out; ++k) {
    const double scale = k == 0 ? std::sqrt(1.0 / n_in) : std::sqrt(2.0 / n_in);
    for (int m = 0; m < n_in; ++m) {
      d(k, m) = scale * std::cos(std::numbers::pi * k * (2.0 * m + 1.0) / (2.0 * n_in));
    }
  }
  return d;
}

Eigen::MatrixXd Deltas(const Eigen::MatrixXd &frames, int window) {
  const Eigen::Index t_count = frames.rows();
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(t_count, frames.cols());
  double denom = 0.0;
  for (int n = 1; n <= window; ++n) denom += 2.0 * n * n;
  for (Eigen::Index t = 0; t < t_count; ++t) {
    for (int n = 1; n <= window; ++n) {
      const Eigen::Index ahead = std::min<Eigen::Index>(t + n, t_count - 1);
      const Eigen::Index behind = std::max<Eigen::Index>(t - n, 0);
      out.row(t) += n * (frames.row(ahead) - frames.row(behind));
    }
  }
  return out / denom;
}

FeatureTrack ComputeMfccTrack(const Spectrogram &spec, const MfccOptions &options) {
  const Eigen::MatrixXd fb = MelFilterbank(options.n_mels, spec.fft_size, spec.sample_rate_hz,
                                           0.0, spec.sample_rate_hz / 2.0);
  const Eigen::MatrixXd power = spec.magnitude.array().square();
  Eigen::MatrixXd log_mel = (power * fb.transpose()).array().max(options.log_floor).log();
  const Eigen::MatrixXd ceps = log_mel * DctMatrix(options.n_ceps, options.n_mels).transpose();
  const Eigen::MatrixXd d1 = Deltas(ceps, options.delta_window);
  const Eigen::MatrixXd d2 = Deltas(d1, options.delta_window);

  FeatureTrack track;
  track.frames.resize(ceps.rows(), 3 * options.n_ceps);
  track.frames << ceps, d1, d2;
  for (const char *prefix : {"mfcc_", "d_mfcc_", "dd_mfcc_"}) {
    for (int c = 0; c < options.n_ceps; ++c) track.names.push_back(prefix + std::to_string(c));
  }
  return track;
}

FeatureTrack ComputeSpectralDescriptors(const Spectrogram &spec) {
  const Eigen::Index frames = spec.magnitude.rows();
  const Eigen::Index bins = spec.magnitude.cols();
  const double bin_hz = spec.BinHz();

  // Bin ranges per contrast band.
  std::vector<std::pair<Eigen::Index, Eigen::Index>> bands;
  for (int b = 0; b < kContrastBands; ++b) {
    const bool last = b == kContrastBands - 1;
    Eigen::Index lo = bins, hi = 0;
    for (Eigen::Index k = 0; k < bins; ++k) {
      const double f = k * bin_hz;
      const bool inside = f >= kContrastEdges[b] &&
                          (last ? f <= kContrastEdges[b + 1] : f < kContrastEdges[b + 1]);
      if (inside) {
        lo = std::min(lo, k);
        hi = std::max(hi, k + 1);
      }
    }
    bands.emplace_back(lo, std::max(lo, hi));
  }

  FeatureTrack track;
  track.frames = Eigen::MatrixXd::Zero(frames, 2 + kContrastBands);
  track.names = {"spectral_centroid", "spectral_bandwidth"};
  for (int b = 0; b < kContrastBands; ++b) {
    track.names.push_back("spectral_contrast_" + std::to_string(b));
  }

  std::vector<double> band_values;
  for (Eigen::Index t = 0; t < frames; ++t) {
    const auto row = spec.magnitude.row(t);
    const double total = row.sum();
    if (total < kSilenceMagnitude) continue;
    double centroid = 0.0;
    for (Eigen::Index k = 0; k < bins; ++k) centroid += k * bin_hz * row(k);
    centroid /= total;
    double spread = 0.0;
    for (Eigen::Index k = 0; k < bins; ++k) {
      const double d = k * bin_hz - centroid;
      spread += d * d * row(k);
    }
    track.frames(t, 0) = centroid;
    track.frames(t, 1) = std::sqrt(spread / total);

    for (int b = 0; b < kContrastBands; ++b) {
      const auto [lo, hi] = bands[b];
      if (hi <= lo) continue;
      band_values.assign(row.data() + lo, row.data() + hi);
      std::sort(band_values.begin(), band_values.end());
      const size_t q = std::max<size_t>(1, band_values.size() / 5);
      double valley = 0.0, peak = 0.0;
      for (size_t i = 0; i < q; ++i) {
        valley += band_values[i];
        peak += band_values[band_values.size() - 1 - i];
      }
      valley = std::max(valley / q, 1e-10);
      peak = std::max(peak / q, 1e-10);
      track.frames(t, 2 + b) = std::log(peak) - std::log(valley);
    }
  }
  return track;
}

FeatureVector SummarizeTrack(const FeatureTrack &track) {
  FeatureVector out;
  const Eigen::Index t_count = track.frames.rows();
  for (Eigen::Index c = 0; c < track.frames.cols(); ++c) {
    const auto col = track.frames.col(c);
    const double mean = col.mean();
    const double var = t_count > 1 ? (col.array() - mean).square().mean() : 0.0;
    out.values.push_back(mean);
    out.values.push_back(std::sqrt(var));
    const std::string &name =
        static_cast<size_t>(c) < track.names.size() ? track.names[c] : "f" + std::to_string(c);
    out.names.push_back(name + "_mean");
    out.names.push_back(name + "_std");
  }
  return out;
}

FeatureVector ClassicalFeatureVector(const AudioClip &clip, const FrameSpec &spec) {
  const Spectrogram s = ComputeStft(clip, spec);
  FeatureVector out = SummarizeTrack(ComputeMfccTrack(s));
  const FeatureVector extra = SummarizeTrack(ComputeSpectralDescriptors(s));
  out.values.insert(out.values.end(), extra.values.begin(), extra.values.end());
  out.names.insert(out.names.end(), extra.names.begin(), extra.names.end());
  out.clip_id = clip.clip_id;
  return out;
}

}  // namespace drivestate
