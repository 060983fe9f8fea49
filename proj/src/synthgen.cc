// src/synthgen.cc

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

#include "drivestate/synthgen.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <sstream>

#include "drivestate/embeddings.h"
#include "drivestate/error.h"
#include "drivestate/features_dsp.h"
#include "drivestate/parallel.h"
#include "drivestate/pipeline.h"
#include "drivestate/strings.h"

namespace drivestate {

namespace {

constexpr double kPadSeconds = 0.2;
constexpr double kMinClipSeconds = 1.5;
constexpr double kMaxClipSeconds = 3.0;
constexpr double kVoicedSlotFraction = 0.8;
constexpr double kRampSeconds = 0.015;
constexpr double kPeak = 0.5;
constexpr int kWav2vec2Dim = 32;
constexpr int kWavlmDim = 48;

// Two-pole resonator with unit gain at DC.
void Resonate(std::vector<double> &x, double freq_hz, double bandwidth_hz, int rate) {
  const double r = std::exp(-std::numbers::pi * bandwidth_hz / rate);
  const double a1 = 2.0 * r * std::cos(2.0 * std::numbers::pi * freq_hz / rate);
  const double a2 = -r * r;
  const double gain = 1.0 - a1 - a2;
  double y1 = 0.0, y2 = 0.0;
  for (double &v : x) {
    const double y = gain * v + a1 * y1 + a2 * y2;
    y2 = y1;
    y1 = y;
    v = y;
  }
}

void OnePole(std::vector<double> &x, double pole) {
  double y = 0.0;
  for (double &v : x) {
    y = v + pole * y;
    v = y;
  }
}

void RemoveDc(std::vector<double> &x) {
  double prev_in = 0.0, prev_out = 0.0;
  for (double &v : x) {
    const double out = v - prev_in + 0.995 * prev_out;
    prev_in = v;
    prev_out = out;
    v = out;
  }
}

std::vector<double> Quantized(const AudioClip &clip) {
  const auto bytes = EncodeWav16(clip);
  return Standardize(ParseWav(bytes), clip.clip_id).samples;
}

void WriteText(const std::filesystem::path &path, const std::string &text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::kIo, "cannot write " + path.string());
  out << text;
  if (!out) throw Error(ErrorCode::kIo, "write failed for " + path.string());
}

}  // namespace

void SynthSpec::Validate() const {
  auto fail = [](const std::string &what) { throw Error(ErrorCode::kConfig, what); };
  if (n_subjects < 1) fail("n_subjects must be >= 1");
  if (clips_per_condition < 1) fail("clips_per_condition must be >= 1");
  if (!(effect.f0_drop_frac >= 0.0 && effect.f0_drop_frac < 1.0)) fail("f0_drop_frac must lie in [0, 1)");
  if (!(effect.jitter_mult >= 1.0)) fail("jitter_mult must be >= 1");
  if (!(effect.shimmer_mult >= 1.0)) fail("shimmer_mult must be >= 1");
  if (!(effect.rate_slowdown_frac >= 0.0)) fail("rate_slowdown_frac must be >= 0");
  if (!(subject_variability_sd >= 0.0)) fail("subject_variability_sd must be >= 0");
  if (!(base_jitter >= 0.0 && base_jitter < 0.2)) fail("base_jitter must lie in [0, 0.2)");
  if (!(base_shimmer >= 0.0 && base_shimmer < 0.5)) fail("base_shimmer must lie in [0, 0.5)");
}

nlohmann::json SynthSpec::ToJson() const {
  return {{"n_subjects", n_subjects},
          {"clips_per_condition", clips_per_condition},
          {"effect",
           {{"f0_drop_frac", effect.f0_drop_frac},
            {"jitter_mult", effect.jitter_mult},
            {"shimmer_mult", effect.shimmer_mult},
            {"rate_slowdown_frac", effect.rate_slowdown_frac}}},
          {"subject_variability_sd", subject_variability_sd},
          {"base_jitter", base_jitter},
          {"base_shimmer", base_shimmer},
          {"seed", seed},
          {"snr_db", snr_db},
          {"write_embeddings", write_embeddings}};
}

VoicedSignal SynthesizeVoiced(size_t num_samples, const VoiceParams &params, Rng &rng,
                              int sample_rate_hz) {
  VoicedSignal out;
  out.samples.assign(num_samples + 1, 0.0);
  double t = rng.Uniform() * sample_rate_hz / params.f0_hz;
  const double n = static_cast<double>(std::max<size_t>(num_samples, 1));
  while (t < static_cast<double>(num_samples)) {
    const double amp = std::max(0.1, 1.0 + params.shimmer * rng.Normal());
    const size_t i = static_cast<size_t>(t);
    const double frac = t - static_cast<double>(i);
    out.samples[i] += amp * (1.0 - frac);
    out.samples[i + 1] += amp * frac;
    out.amplitudes.push_back(amp);
    const double f0 = params.f0_hz * (1.0 + (params.f0_glide - 1.0) * t / n);
    const double nominal = sample_rate_hz / f0;
    const double period = std::max(0.5 * nominal, nominal * (1.0 + params.jitter * rng.Normal()));
    out.periods.push_back(period);
    t += period;
  }
  out.samples.resize(num_samples);
  if (!out.periods.empty()) out.periods.pop_back();  // last period has no closing pulse
  OnePole(out.samples, 0.9);
  Resonate(out.samples, 500.0, 80.0, sample_rate_hz);
  Resonate(out.samples, 1500.0, 120.0, sample_rate_hz);
  RemoveDc(out.samples);
  return out;
}

std::vector<double> PinkNoise(size_t num_samples, Rng &rng) {
  std::vector<double> out(num_samples);
  double b0 = 0, b1 = 0, b2 = 0, b3 = 0, b4 = 0, b5 = 0, b6 = 0;
  for (double &v : out) {
    const double white = rng.Normal();
    b0 = 0.99886 * b0 + white * 0.0555179;
    b1 = 0.99332 * b1 + white * 0.0750759;
    b2 = 0.96900 * b2 + white * 0.1538520;
    b3 = 0.86650 * b3 + white * 0.3104856;
    b4 = 0.55000 * b4 + white * 0.5329522;
    b5 = -0.7616 * b5 - white * 0.0168980;
    v = b0 + b1 + b2 + b3 + b4 + b5 + b6 + white * 0.5362;
    b6 = white * 0.115926;
  }
  return out;
}

void AddNoise(std::vector<double> &signal, const std::vector<double> &noise, double snr_db) {
  double ps = 0.0, pn = 0.0;
  for (size_t i = 0; i < signal.size(); ++i) {
    ps += signal[i] * signal[i];
    pn += noise[i] * noise[i];
  }
  if (pn <= 0.0) return;
  const double reference = ps > 0.0 ? ps : static_cast<double>(signal.size()) * 1e-6;
  const double gain = std::sqrt(reference / pn * std::pow(10.0, -snr_db / 10.0));
  for (size_t i = 0; i < signal.size(); ++i) signal[i] += gain * noise[i];
}

SynthUtterance SynthesizeUtterance(const Phrase &phrase, const VoiceParams &voice,
                                   double speech_s, double snr_db, Rng &rng,
                                   const std::string &clip_id) {
  const int rate = kStandardRate;
  speech_s = std::min(speech_s, kMaxClipSeconds - 2.0 * kPadSeconds);
  const double total_s = std::max(kMinClipSeconds, speech_s + 2.0 * kPadSeconds);
  const size_t n = static_cast<size_t>(std::llround(total_s * rate));

  VoicedSignal voiced = SynthesizeVoiced(n, voice, rng, rate);
  std::vector<double> envelope(n, 0.0);
  const auto words = NormalizeText(phrase.text);
  const double slot = speech_s / static_cast<double>(words.size());
  const double ramp = kRampSeconds * rate;

  SynthUtterance out;
  for (size_t w = 0; w < words.size(); ++w) {
    const double start_s = kPadSeconds + slot * static_cast<double>(w);
    const double end_s = start_s + kVoicedSlotFraction * slot;
    out.words.push_back({words[w], start_s, end_s});
    const size_t a = static_cast<size_t>(std::llround(start_s * rate));
    const size_t b = std::min(n, static_cast<size_t>(std::llround(end_s * rate)));
    for (size_t i = a; i < b; ++i) {
      const double edge = std::min(static_cast<double>(i - a), static_cast<double>(b - 1 - i));
      envelope[i] = edge >= ramp ? 1.0 : 0.5 - 0.5 * std::cos(std::numbers::pi * edge / ramp);
    }
  }
  std::vector<double> signal(n);
  for (size_t i = 0; i < n; ++i) signal[i] = voiced.samples[i] * envelope[i];
  AddNoise(signal, PinkNoise(n, rng), snr_db);
  double peak = 0.0;
  for (double v : signal) peak = std::max(peak, std::abs(v));
  if (peak > 0.0) {
    for (double &v : signal) v *= kPeak / peak;
  }
  out.audio.samples = std::move(signal);
  out.audio.sample_rate_hz = rate;
  out.audio.clip_id = clip_id;
  return out;
}

std::string SubjectId(int subject_index) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "s%02d", subject_index + 1);
  return buf;
}

SubjectVoice DrawSubjectVoice(const SynthSpec &spec, int subject_index) {
  Rng rng(MixSeed(spec.seed, static_cast<uint64_t>(subject_index)));
  SubjectVoice v;
  v.f0_hz = rng.Uniform(95.0, 220.0);
  v.jitter = spec.base_jitter * std::exp(spec.subject_variability_sd * rng.Normal());
  v.shimmer = spec.base_shimmer * std::exp(spec.subject_variability_sd * rng.Normal());
  return v;
}

SubjectData GenerateSubject(const SynthSpec &spec, int subject_index) {
  spec.Validate();
  const SubjectVoice base = DrawSubjectVoice(spec, subject_index);
  const uint64_t subject_seed = MixSeed(spec.seed, static_cast<uint64_t>(subject_index));
  const std::string subject = SubjectId(subject_index);
  const auto &phrases = ScriptedPhrases().phrases();

  SubjectData data;
  for (int label : {kSober, kImpaired}) {
    const bool impaired = label == kImpaired;
    for (int k = 0; k < spec.clips_per_condition; ++k) {
      Rng rng(MixSeed(subject_seed, static_cast<uint64_t>(label) + 1, static_cast<uint64_t>(k)));
      VoiceParams voice;
      voice.f0_hz = base.f0_hz * std::exp(0.03 * rng.Normal());
      voice.f0_glide = std::exp(rng.Normal(-0.08, 0.03));
      voice.jitter = base.jitter;
      voice.shimmer = base.shimmer;
      double speech_s = rng.Uniform(1.1, 2.0);
      if (impaired) {
        voice.f0_hz *= 1.0 - spec.effect.f0_drop_frac;
        voice.jitter *= spec.effect.jitter_mult;
        voice.shimmer *= spec.effect.shimmer_mult;
        speech_s *= 1.0 + spec.effect.rate_slowdown_frac;
      }
      char clip_id[64];
      std::snprintf(clip_id, sizeof clip_id, "%s_%s_%02d", subject.c_str(), LabelToken(label),
                    k + 1);
      const Phrase &phrase = phrases[static_cast<size_t>(k) % phrases.size()];
      data.clips.push_back(SynthesizeUtterance(phrase, voice, speech_s, spec.snr_db, rng, clip_id));
      data.entries.push_back({subject, clip_id, label, std::string("audio/") + clip_id + ".wav",
                              std::string("transcripts/") + clip_id + ".jsonl"});
    }
  }
  return data;
}

Eigen::MatrixXd SurrogateEmbeddingFrames(const AudioClip &clip, int dim,
                                         uint64_t projection_seed) {
  constexpr int kMels = 26;
  constexpr int kStep = 5;
  const FrameSpec spec;
  const Spectrogram stft = ComputeStft(clip, spec);
  const Eigen::MatrixXd fb = MelFilterbank(kMels, spec.fft_size, clip.sample_rate_hz, 0.0,
                                           clip.sample_rate_hz / 2.0);
  const Eigen::MatrixXd mel = (stft.magnitude.array().square().matrix() * fb.transpose());

  Rng rng(projection_seed);
  Eigen::MatrixXd w(kMels, dim);
  for (int i = 0; i < kMels; ++i) {
    for (int j = 0; j < dim; ++j) w(i, j) = rng.Normal() / std::sqrt(static_cast<double>(kMels));
  }
  Eigen::VectorXd bias(dim);
  for (int j = 0; j < dim; ++j) bias[j] = 0.5 * rng.Normal();

  const Eigen::Index steps = (mel.rows() + kStep - 1) / kStep;
  Eigen::MatrixXd out(steps, dim);
  for (Eigen::Index s = 0; s < steps; ++s) {
    const Eigen::Index a = s * kStep;
    const Eigen::Index len = std::min<Eigen::Index>(kStep, mel.rows() - a);
    Eigen::RowVectorXd logmel = Eigen::RowVectorXd::Zero(kMels);
    for (Eigen::Index r = a; r < a + len; ++r) {
      for (int m = 0; m < kMels; ++m) logmel[m] += std::log(std::max(mel(r, m), 1e-10));
    }
    logmel = (logmel / static_cast<double>(len)).array() / 5.0 + 2.0;
    out.row(s) = (logmel * w + bias.transpose()).array().tanh().matrix();
  }
  return out;
}

Manifest GenerateDataset(const SynthSpec &spec, const std::filesystem::path &out_dir,
                         int workers) {
  spec.Validate();
  namespace fs = std::filesystem;
  std::error_code ec;
  for (const char *sub : {"audio", "transcripts", "embeddings"}) {
    if (std::string(sub) == "embeddings" && !spec.write_embeddings) continue;
    fs::create_directories(out_dir / sub, ec);
    if (ec) throw Error(ErrorCode::kIo, "cannot create " + (out_dir / sub).string() + ": " + ec.message());
  }

  const uint64_t w2v_seed = MixSeed(spec.seed, 0x77327632ULL);
  const uint64_t wavlm_seed = MixSeed(spec.seed, 0x7761766cULL);
  struct SubjectOutput {
    std::vector<ManifestEntry> entries;
    std::string pooled;
    std::string blocks;
  };
  std::vector<SubjectOutput> outputs(static_cast<size_t>(spec.n_subjects));

  ParallelFor(outputs.size(), workers, [&](size_t s) {
    SubjectData data = GenerateSubject(spec, static_cast<int>(s));
    SubjectOutput &out = outputs[s];
    std::ostringstream pooled, blocks;
    for (size_t c = 0; c < data.clips.size(); ++c) {
      const ManifestEntry &entry = data.entries[c];
      WriteWav16(out_dir / entry.audio_path, data.clips[c].audio);
      std::ostringstream transcript;
      WriteTranscript(transcript, data.clips[c].words);
      WriteText(out_dir / entry.transcript_path, transcript.str());
      if (!spec.write_embeddings) continue;

      AudioClip clip = data.clips[c].audio;
      clip.samples = Quantized(clip);
      std::vector<std::pair<std::string, AudioClip>> views{{entry.clip_id, clip}};
      for (const ClipWindow &w : MakeWindows(clip, true)) {
        views.emplace_back(WindowKey(entry.clip_id, w.window_index), w.clip);
      }
      for (const auto &[key, view] : views) {
        const Eigen::RowVectorXd mean =
            SurrogateEmbeddingFrames(view, kWav2vec2Dim, w2v_seed).colwise().mean();
        pooled << key;
        for (Eigen::Index j = 0; j < mean.size(); ++j) pooled << ' ' << FormatRoundTrip(mean[j]);
        pooled << '\n';
        const Eigen::MatrixXd frames = SurrogateEmbeddingFrames(view, kWavlmDim, wavlm_seed);
        std::vector<std::vector<double>> rows(static_cast<size_t>(frames.rows()));
        for (Eigen::Index i = 0; i < frames.rows(); ++i) {
          for (Eigen::Index j = 0; j < frames.cols(); ++j) {
            rows[static_cast<size_t>(i)].push_back(frames(i, j));
          }
        }
        WriteEmbeddingBlock(blocks, key, rows);
      }
    }
    out.entries = std::move(data.entries);
    out.pooled = pooled.str();
    out.blocks = blocks.str();
  });

  Manifest manifest;
  manifest.base_dir = out_dir;
  std::string pooled = "# surrogate wav2vec2_large embeddings (pooled)\n";
  std::string blocks = "# surrogate wavlm_large embeddings (frame blocks)\n";
  for (auto &o : outputs) {
    for (auto &e : o.entries) manifest.entries.push_back(std::move(e));
    pooled += o.pooled;
    blocks += o.blocks;
  }
  SaveManifest(out_dir / "manifest.csv", manifest);
  if (spec.write_embeddings) {
    WriteText(out_dir / "embeddings" / "wav2vec2_large.txt", pooled);
    WriteText(out_dir / "embeddings" / "wavlm_large.txt", blocks);
  }
  return manifest;
}

}  // namespace drivestate
