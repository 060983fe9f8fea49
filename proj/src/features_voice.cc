// src/features_voice.cc

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

#include "drivestate/features_voice.h"

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>

#include "drivestate/features_dsp.h"
#include "drivestate/fft.h"

namespace drivestate {
namespace {

constexpr double kSilentEnergy = 1e-20;
constexpr double kSilenceMagnitude = 1e-12;
// Cycle pairs beyond these ratios are treated as marking errors.
constexpr double kMaxPeriodFactor = 1.3;
constexpr double kMaxAmplitudeFactor = 1.6;
constexpr double kMinPitchHz = 50.0;
constexpr double kMaxPitchHz = 400.0;

size_t NextPowerOfTwo(size_t n) {
  size_t p = 1;
  while (p < n) p <<= 1;
  return p;
}

}  // namespace

PitchTrack EstimateF0Track(const AudioClip &clip, const PitchOptions &options) {
  const int rate = clip.sample_rate_hz;
  const int min_lag = static_cast<int>(std::ceil(rate / options.max_f0_hz));
  const int max_lag = std::min(static_cast<int>(std::floor(rate / options.min_f0_hz)),
                               options.frame_len - 2);
  const FrameSpec framing{options.frame_len, options.hop, options.frame_len};
  const int frames = NumFrames(clip.samples.size(), framing);
  const size_t nfft = NextPowerOfTwo(static_cast<size_t>(options.frame_len + max_lag + 1));

  PitchTrack track;
  track.frame_len = options.frame_len;
  track.hop = options.hop;
  track.f0_hz.assign(frames, 0.0);
  track.clarity.assign(frames, 0.0);
  track.voiced.assign(frames, false);

  std::vector<double> x(options.frame_len);
  std::vector<double> prefix(options.frame_len + 1);
  std::vector<std::complex<double>> buf(nfft);
  const int len = options.frame_len;
  // Normalized autocorrelation per frame; empty for silent frames.
  std::vector<std::vector<double>> acf(frames);

  for (int t = 0; t < frames; ++t) {
    const size_t start = static_cast<size_t>(t) * options.hop;
    double mean = 0.0;
    for (int i = 0; i < len; ++i) {
      const size_t idx = start + i;
      x[i] = idx < clip.samples.size() ? clip.samples[idx] : 0.0;
      mean += x[i];
    }
    mean /= len;
    double energy = 0.0;
    prefix[0] = 0.0;
    for (int i = 0; i < len; ++i) {
      x[i] -= mean;
      energy += x[i] * x[i];
      prefix[i + 1] = prefix[i] + x[i] * x[i];
    }
    if (energy < kSilentEnergy) continue;

    std::fill(buf.begin(), buf.end(), std::complex<double>());
    for (int i = 0; i < len; ++i) buf[i] = x[i];
    Fft(buf);
    for (auto &v : buf) v = std::norm(v);
    Fft(buf, true);

    // Normalized by the energies of the two overlapping segments.
    std::vector<double> &r = acf[t];
    r.assign(max_lag + 2, 0.0);
    for (int lag = min_lag - 1; lag <= max_lag + 1 && lag < len; ++lag) {
      const double cross = buf[lag].real() / static_cast<double>(nfft);
      const double e1 = prefix[len - lag];
      const double e2 = prefix[len] - prefix[lag];
      const double denom = std::sqrt(e1 * e2);
      r[lag] = denom > 0.0 ? cross / denom : 0.0;
    }
  }

  auto is_peak = [&](const std::vector<double> &r, int lag) {
    return r[lag] >= r[lag - 1] && r[lag] >= r[lag + 1];
  };
  // Earliest strong peak, to avoid locking onto period multiples.
  auto first_pass = [&](const std::vector<double> &r) {
    double global = -1.0;
    for (int lag = min_lag; lag <= max_lag; ++lag) {
      if (is_peak(r, lag)) global = std::max(global, r[lag]);
    }
    if (global <= 0.0) return -1;
    for (int lag = min_lag; lag <= max_lag; ++lag) {
      if (is_peak(r, lag) && r[lag] >= options.peak_ratio * global) return lag;
    }
    return -1;
  };

  std::vector<int> chosen(frames, -1);
  std::vector<double> confident;
  for (int t = 0; t < frames; ++t) {
    if (acf[t].empty()) continue;
    chosen[t] = first_pass(acf[t]);
    if (chosen[t] > 0 && acf[t][chosen[t]] >= options.confident_clarity) {
      confident.push_back(chosen[t]);
    }
  }
  // Second pass: weak frames (onsets, offsets) pick the peak that best trades
  // height against octave distance from the clip's confident median period.
  if (!confident.empty()) {
    std::nth_element(confident.begin(), confident.begin() + confident.size() / 2,
                     confident.end());
    const double ref = confident[confident.size() / 2];
    for (int t = 0; t < frames; ++t) {
      if (chosen[t] <= 0) continue;
      const std::vector<double> &r = acf[t];
      double best_score = -1e300;
      for (int lag = min_lag; lag <= max_lag; ++lag) {
        if (!is_peak(r, lag) || r[lag] <= 0.0) continue;
        const double score = r[lag] - options.octave_cost * std::abs(std::log2(lag / ref));
        if (score > best_score) {
          best_score = score;
          chosen[t] = lag;
        }
      }
    }
  }

  for (int t = 0; t < frames; ++t) {
    const int best = chosen[t];
    if (best <= 0) continue;
    const std::vector<double> &r = acf[t];
    const double a = r[best - 1], b = r[best], c = r[best + 1];
    const double curvature = a - 2.0 * b + c;
    double offset = 0.0, peak = b;
    if (curvature < 0.0) {
      offset = std::clamp(0.5 * (a - c) / curvature, -0.5, 0.5);
      peak = b - 0.25 * (a - c) * offset;
    }
    const double clarity = std::clamp(peak, 0.0, 1.0);
    track.clarity[t] = clarity;
    if (clarity >= options.voicing_threshold) {
      track.voiced[t] = true;
      track.f0_hz[t] = std::clamp(rate / (best + offset), options.min_f0_hz, options.max_f0_hz);
    }
  }
  return track;
}

std::vector<CycleRun> FindCycleMarks(const AudioClip &clip, const PitchTrack &pitch) {
  std::vector<CycleRun> runs;
  const auto &x = clip.samples;
  const long total = static_cast<long>(x.size());
  const size_t frames = pitch.size();

  size_t t = 0;
  while (t < frames) {
    if (!pitch.voiced[t]) {
      ++t;
      continue;
    }
    size_t end = t;
    while (end < frames && pitch.voiced[end]) ++end;
    if (end - t >= 3) {
      const long region_lo = static_cast<long>(t) * pitch.hop;
      const long region_hi =
          std::min(total, static_cast<long>(end - 1) * pitch.hop + pitch.frame_len);
      // Local period: median f0 of the five voiced frames nearest to s, so an
      // isolated octave error in the track cannot double the search step.
      auto period_at = [&](double s) {
        long f = std::lround((s - pitch.frame_len / 2.0) / pitch.hop);
        f = std::clamp<long>(f, static_cast<long>(t), static_cast<long>(end) - 1);
        const long lo = std::max<long>(static_cast<long>(t), f - 2);
        const long hi = std::min<long>(static_cast<long>(end) - 1, f + 2);
        std::array<double, 5> near{};
        size_t count = 0;
        for (long k = lo; k <= hi; ++k) near[count++] = pitch.f0_hz[k];
        std::nth_element(near.begin(), near.begin() + count / 2, near.begin() + count);
        return clip.sample_rate_hz / near[count / 2];
      };
      auto argmax = [&](long lo, long hi) {
        long best = lo;
        for (long i = lo + 1; i < hi; ++i) {
          if (x[i] > x[best]) best = i;
        }
        return best;
      };
      auto refine = [&](long i, CycleRun *run) {
        double pos = static_cast<double>(i), amp = x[i];
        if (i > 0 && i + 1 < total) {
          const double a = x[i - 1], b = x[i], c = x[i + 1];
          const double curvature = a - 2.0 * b + c;
          if (curvature < 0.0) {
            const double d = std::clamp(0.5 * (a - c) / curvature, -0.5, 0.5);
            pos += d;
            amp = b - 0.25 * (a - c) * d;
          }
        }
        run->positions.push_back(pos);
        run->amplitudes.push_back(amp);
      };

      CycleRun run;
      const double first_period = period_at(static_cast<double>(region_lo));
      const long first_hi =
          std::min(region_hi, region_lo + static_cast<long>(std::ceil(first_period)));
      long mark = argmax(region_lo, first_hi);
      refine(mark, &run);
      while (true) {
        const double period = period_at(static_cast<double>(mark));
        const long lo = mark + static_cast<long>(std::ceil(0.7 * period));
        const long hi = mark + static_cast<long>(std::floor(1.3 * period)) + 1;
        if (hi > region_hi) break;
        mark = argmax(lo, hi);
        refine(mark, &run);
      }
      if (run.positions.size() >= 3) runs.push_back(std::move(run));
    }
    t = end;
  }
  return runs;
}

double HnrFromClarity(double clarity) {
  const double r = std::clamp(clarity, 1e-4, 1.0 - 1e-4);
  return 10.0 * std::log10(r / (1.0 - r));
}

Perturbations ComputePerturbations(const AudioClip &clip, const PitchTrack &pitch) {
  Perturbations out;
  const std::vector<CycleRun> runs = FindCycleMarks(clip, pitch);
  const double min_period = clip.sample_rate_hz / kMaxPitchHz;
  const double max_period = clip.sample_rate_hz / kMinPitchHz;
  auto valid = [&](double p) { return p >= min_period && p <= max_period; };
  auto within = [](double a, double b, double factor) {
    return a > 0.0 && b > 0.0 && std::max(a, b) <= factor * std::min(a, b);
  };
  double period_diff = 0.0, period_sum = 0.0, amp_diff = 0.0, amp_sum = 0.0;
  size_t period_pairs = 0, periods = 0, amp_pairs = 0, amps = 0;
  for (const auto &run : runs) {
    const auto &pos = run.positions;
    const auto &amp = run.amplitudes;
    for (size_t i = 1; i < pos.size(); ++i) {
      const double p = pos[i] - pos[i - 1];
      if (!valid(p)) continue;
      period_sum += p;
      ++periods;
      amp_sum += amp[i];
      ++amps;
      if (i < 2) continue;
      const double prev = pos[i - 1] - pos[i - 2];
      if (!valid(prev) || !within(p, prev, kMaxPeriodFactor)) continue;
      period_diff += std::abs(p - prev);
      ++period_pairs;
      if (within(amp[i], amp[i - 1], kMaxAmplitudeFactor)) {
        amp_diff += std::abs(amp[i] - amp[i - 1]);
        ++amp_pairs;
      }
    }
  }
  if (period_pairs == 0 || amp_pairs == 0 || amp_sum <= 0.0) {
    out.insufficient_voicing = true;
    return out;
  }
  out.jitter_local = (period_diff / period_pairs) / (period_sum / periods);
  out.shimmer_local = (amp_diff / amp_pairs) / (amp_sum / amps);

  double clarity = 0.0;
  size_t voiced = 0;
  for (size_t t = 0; t < pitch.size(); ++t) {
    if (pitch.voiced[t]) {
      clarity += pitch.clarity[t];
      ++voiced;
    }
  }
  out.hnr_db = HnrFromClarity(clarity / voiced);
  return out;
}

double SpectralSlope(const AudioClip &clip) {
  const Spectrogram s = ComputeStft(clip);
  const double bin_hz = s.BinHz();
  std::vector<double> logf;
  std::vector<Eigen::Index> bins;
  for (Eigen::Index k = 1; k < s.magnitude.cols(); ++k) {
    const double f = k * bin_hz;
    if (f >= 200.0 && f <= 5000.0) {
      bins.push_back(k);
      logf.push_back(std::log(f));
    }
  }
  double mean_x = 0.0;
  for (double v : logf) mean_x += v;
  mean_x /= static_cast<double>(logf.size());
  double sxx = 0.0;
  for (double v : logf) sxx += (v - mean_x) * (v - mean_x);

  double slope_sum = 0.0;
  size_t counted = 0;
  for (Eigen::Index t = 0; t < s.magnitude.rows(); ++t) {
    if (s.magnitude.row(t).sum() < kSilenceMagnitude) continue;
    double mean_y = 0.0;
    std::vector<double> y(bins.size());
    for (size_t i = 0; i < bins.size(); ++i) {
      y[i] = std::log(std::max(s.magnitude(t, bins[i]), 1e-10));
      mean_y += y[i];
    }
    mean_y /= static_cast<double>(y.size());
    double sxy = 0.0;
    for (size_t i = 0; i < y.size(); ++i) sxy += (logf[i] - mean_x) * (y[i] - mean_y);
    slope_sum += sxy / sxx;
    ++counted;
  }
  return counted ? slope_sum / counted : 0.0;
}

double AlphaRatioDb(const AudioClip &clip) {
  const Spectrogram s = ComputeStft(clip);
  const double bin_hz = s.BinHz();
  double low = 0.0, high = 0.0;
  for (Eigen::Index k = 0; k < s.magnitude.cols(); ++k) {
    const double f = k * bin_hz;
    const double e = s.magnitude.col(k).squaredNorm();
    if (f >= 50.0 && f < 1000.0) low += e;
    if (f >= 1000.0 && f <= 5000.0) high += e;
  }
  if (low < 1e-30 || high < 1e-30) return 0.0;
  return 10.0 * std::log10(low / high);
}

const std::vector<std::string> &VoiceQualityNames() {
  static const std::vector<std::string> kNames = {
      "f0_mean",       "f0_std", "voiced_fraction", "jitter_local",   "shimmer_local",
      "hnr_db",        "rms_mean", "rms_std",       "spectral_slope", "alpha_ratio_db"};
  return kNames;
}

FeatureVector VoiceQualityVector(const AudioClip &clip) {
  const PitchTrack pitch = EstimateF0Track(clip);
  const Perturbations pert = ComputePerturbations(clip, pitch);

  double f0_sum = 0.0, f0_sq = 0.0;
  size_t voiced = 0;
  for (size_t t = 0; t < pitch.size(); ++t) {
    if (!pitch.voiced[t]) continue;
    f0_sum += pitch.f0_hz[t];
    f0_sq += pitch.f0_hz[t] * pitch.f0_hz[t];
    ++voiced;
  }
  double f0_mean = 0.0, f0_std = 0.0;
  if (voiced > 0) {
    f0_mean = f0_sum / voiced;
    f0_std = std::sqrt(std::max(0.0, f0_sq / voiced - f0_mean * f0_mean));
  }
  const double voiced_fraction =
      pitch.size() ? static_cast<double>(voiced) / pitch.size() : 0.0;

  const FrameSpec framing;
  const int frames = NumFrames(clip.samples.size(), framing);
  double rms_sum = 0.0, rms_sq = 0.0;
  for (int t = 0; t < frames; ++t) {
    const size_t start = static_cast<size_t>(t) * framing.hop;
    double e = 0.0;
    for (int i = 0; i < framing.frame_len; ++i) {
      const size_t idx = start + i;
      if (idx < clip.samples.size()) e += clip.samples[idx] * clip.samples[idx];
    }
    const double rms = std::sqrt(e / framing.frame_len);
    rms_sum += rms;
    rms_sq += rms * rms;
  }
  const double rms_mean = rms_sum / frames;
  const double rms_std = std::sqrt(std::max(0.0, rms_sq / frames - rms_mean * rms_mean));

  FeatureVector out;
  out.clip_id = clip.clip_id;
  out.names = VoiceQualityNames();
  out.values = {f0_mean,           f0_std,     voiced_fraction,    pert.jitter_local,
                pert.shimmer_local, pert.hnr_db, rms_mean,          rms_std,
                SpectralSlope(clip), AlphaRatioDb(clip)};
  return out;
}

}  // namespace drivestate
