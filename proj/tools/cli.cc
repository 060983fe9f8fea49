// tools/cli.cc

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

#include "cli.h"

#include <fstream>
#include <map>
#include <ostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "drivestate/audio.h"
#include "drivestate/config.h"
#include "drivestate/experiment.h"
#include "drivestate/feature_store.h"
#include "drivestate/manifest.h"
#include "drivestate/parallel.h"
#include "drivestate/report.h"
#include "drivestate/segmenter.h"
#include "drivestate/strings.h"
#include "drivestate/synthgen.h"
#include "oracles.h"

namespace drivestate {

namespace fs = std::filesystem;

bool IsValidationError(ErrorCode code) {
  switch (code) {
    case ErrorCode::kDuplicateClip:
    case ErrorCode::kBadLabel:
    case ErrorCode::kBadSchema:
    case ErrorCode::kEmptyAudio:
    case ErrorCode::kBadFormat:
    case ErrorCode::kDimMismatch:
    case ErrorCode::kParseError:
    case ErrorCode::kNonFinite:
    case ErrorCode::kBadTimestamp:
    case ErrorCode::kNotSorted:
    case ErrorCode::kConfig:
      return true;
    default:
      return false;
  }
}

namespace {

struct SynthArgs {
  fs::path out;
  uint64_t seed = 0;
  bool null_effect = false;
  bool strong = false;
  SynthSpec spec;
  std::optional<double> f0_drop, jitter_mult, shimmer_mult, slowdown;
  bool no_embeddings = false;
  int workers = 0;
};

struct SegmentArgs {
  fs::path audio;
  fs::path transcript;
  fs::path out;
  double min_score = 0.8;
  double pad = kDefaultPadSeconds;
  bool allow_repeats = false;
  std::string subject;
  std::string label;
};

struct FeaturesArgs {
  fs::path manifest;
  fs::path out;
  std::vector<std::string> sets;
  std::vector<std::string> embeddings;
  std::vector<std::string> windows;
  int workers = 0;
};

struct RunArgs {
  fs::path config;
  std::optional<uint64_t> seed;
  fs::path manifest;
  fs::path out;
  fs::path features_dir;
  std::optional<int> workers;
  std::vector<std::string> sets;
  std::vector<std::string> classifiers;
  std::vector<std::string> embeddings;
  std::optional<int> pca_cap;
  std::string baseline_space;
  std::string accuracy;
  bool exclude_baseline_windows = false;
  bool dump_transforms = false;
  bool dump_models = false;
};

struct ReportArgs {
  fs::path in;
  fs::path out;
  std::string accuracy;
};

// NAME=PATH pairs; pooled layout is detected from the file.
std::map<FeatureSet, EmbeddingSource> ParseEmbeddingArgs(const std::vector<std::string> &args) {
  std::map<FeatureSet, EmbeddingSource> out;
  for (const auto &arg : args) {
    const auto eq = arg.find('=');
    if (eq == std::string::npos) {
      throw Error(ErrorCode::kConfig, "--embedding expects NAME=PATH, got '" + arg + "'");
    }
    const FeatureSet set = ParseFeatureSet(arg.substr(0, eq));
    if (!IsEmbeddingSet(set)) throw Error(ErrorCode::kConfig, arg.substr(0, eq) + " is not an embedding set");
    EmbeddingSource src;
    src.path = arg.substr(eq + 1);
    if (!fs::exists(src.path)) throw Error(ErrorCode::kConfig, "embedding file not found: " + src.path.string());
    src.pooled = !LooksUnpooled(src.path);
    out[set] = src;
  }
  return out;
}

// Embedding files at the locations the synth command writes them.
void AddDefaultEmbeddings(const fs::path &manifest, std::map<FeatureSet, EmbeddingSource> &emb) {
  const fs::path dir = manifest.parent_path() / "embeddings";
  for (FeatureSet set : {FeatureSet::kWav2vec2Large, FeatureSet::kWavlmLarge}) {
    const fs::path p = dir / (std::string(FeatureSetName(set)) + ".txt");
    if (!emb.count(set) && fs::exists(p)) emb[set] = {p, !LooksUnpooled(p)};
  }
}

AccuracyMode ParseAccuracy(const std::string &s) {
  if (s == "pooled") return AccuracyMode::kPooled;
  if (s == "macro") return AccuracyMode::kMacro;
  throw Error(ErrorCode::kConfig, "accuracy must be pooled or macro");
}

int DoSynth(const SynthArgs &a, std::ostream &out) {
  SynthSpec spec = a.spec;
  spec.seed = a.seed;
  if (a.strong) spec.effect = SynthEffect::Strong();
  if (a.f0_drop) spec.effect.f0_drop_frac = *a.f0_drop;
  if (a.jitter_mult) spec.effect.jitter_mult = *a.jitter_mult;
  if (a.shimmer_mult) spec.effect.shimmer_mult = *a.shimmer_mult;
  if (a.slowdown) spec.effect.rate_slowdown_frac = *a.slowdown;
  spec.write_embeddings = !a.no_embeddings;
  const fs::path dir = a.out.empty() ? DefaultOutDir() : a.out;
  const Manifest m =
      GenerateDataset(spec, dir, a.workers > 0 ? a.workers : DefaultWorkers());
  std::ofstream(dir / "synth_spec.json") << spec.ToJson().dump(2) << '\n';
  out << "wrote " << m.entries.size() << " clips for " << m.Subjects().size() << " subjects to "
      << dir.string() << '\n';
  return kExitOk;
}

int DoSegment(const SegmentArgs &a, std::ostream &out) {
  const AudioClip audio = LoadAudio(a.audio, a.audio.stem().string());
  const auto tokens = ParseTranscript(a.transcript);
  MatchOptions options;
  options.min_score = a.min_score;
  options.allow_repeats = a.allow_repeats;
  const auto segments = MatchPhrases(tokens, ScriptedPhrases(), options);
  const auto clips = ExtractClips(audio, segments, a.pad);

  const fs::path dir = a.out.empty() ? DefaultOutDir() : a.out;
  fs::create_directories(dir / "clips");
  std::vector<UtteranceSegment> named = segments;
  Manifest manifest;
  for (size_t i = 0; i < clips.size(); ++i) {
    named[i].clip_id = clips[i].clip_id;
    const std::string rel = "clips/" + clips[i].clip_id + ".wav";
    WriteWav16(dir / rel, clips[i]);
    if (!a.subject.empty()) {
      manifest.entries.push_back({a.subject, clips[i].clip_id, ParseLabelToken(a.label), rel, ""});
    }
  }
  {
    std::ofstream csv(dir / "segments.csv", std::ios::binary);
    if (!csv) throw Error(ErrorCode::kIo, "cannot write segments.csv");
    WriteSegmentsCsv(csv, named);
  }
  if (!a.subject.empty()) SaveManifest(dir / "manifest.csv", manifest);
  out << "recovered " << segments.size() << " of " << ScriptedPhrases().size()
      << " phrases into " << dir.string() << '\n';
  return kExitOk;
}

int DoFeatures(const FeaturesArgs &a, std::ostream &out) {
  const Manifest manifest = LoadManifest(a.manifest);
  FeatureStoreOptions options;
  if (!a.sets.empty()) {
    options.sets.clear();
    for (const auto &s : a.sets) options.sets.push_back(ParseFeatureSet(s));
  }
  if (!a.windows.empty()) {
    options.windowed.clear();
    for (const auto &w : a.windows) {
      if (w == "window") options.windowed.push_back(true);
      else if (w == "nowindow") options.windowed.push_back(false);
      else throw Error(ErrorCode::kConfig, "window must be window or nowindow");
    }
  }
  options.embeddings = ParseEmbeddingArgs(a.embeddings);
  AddDefaultEmbeddings(a.manifest, options.embeddings);
  options.workers = a.workers > 0 ? a.workers : DefaultWorkers();
  const FeatureStore store = BuildFeatureStore(manifest, options);
  const fs::path dir = a.out.empty() ? DefaultOutDir() : a.out;
  fs::create_directories(dir);
  for (FeatureSet set : options.sets) {
    for (bool w : options.windowed) {
      const fs::path path = dir / CacheFileName(set, w);
      SaveFeatureCsv(path, store.Get(set, w));
      out << "wrote " << path.string() << '\n';
    }
  }
  return kExitOk;
}

int DoRun(const RunArgs &a, std::ostream &out) {
  RunConfig config = a.config.empty() ? RunConfigFromJson(nlohmann::json::object())
                                      : LoadRunConfig(a.config);
  if (a.seed) config.seed = *a.seed;
  if (!a.manifest.empty()) config.manifest = a.manifest;
  if (!a.out.empty()) config.out_dir = a.out;
  if (!a.features_dir.empty()) config.features_dir = a.features_dir;
  if (a.workers) config.workers = *a.workers;
  if (!a.sets.empty()) {
    config.feature_sets.clear();
    for (const auto &s : a.sets) config.feature_sets.push_back(ParseFeatureSet(s));
  }
  if (!a.classifiers.empty()) {
    config.classifiers.clear();
    for (const auto &s : a.classifiers) config.classifiers.push_back(ParseClassifier(s));
  }
  for (const auto &[set, src] : ParseEmbeddingArgs(a.embeddings)) config.embeddings[set] = src;
  if (!config.manifest.empty()) AddDefaultEmbeddings(config.manifest, config.embeddings);
  if (a.pca_cap) config.harness.pca_cap = *a.pca_cap;
  if (!a.baseline_space.empty()) {
    config.harness.baseline_space =
        a.baseline_space == "raw" ? BaselineSpace::kRaw : BaselineSpace::kPca;
  }
  if (!a.accuracy.empty()) config.harness.accuracy = ParseAccuracy(a.accuracy);
  if (a.exclude_baseline_windows) config.harness.exclude_baseline_windows = true;
  if (a.dump_transforms) config.harness.dump_transforms = true;
  if (a.dump_models) config.harness.dump_models = true;

  const ExperimentOutput result = RunExperiment(config);
  WriteResultsCsv(out, result.results);
  out << "report written to " << config.out_dir.string() << '\n';
  return kExitOk;
}

int DoReport(const ReportArgs &a, std::ostream &out) {
  std::ifstream in(a.in / "cells.json");
  if (!in) throw Error(ErrorCode::kConfig, "no cells.json in " + a.in.string());
  nlohmann::json cells;
  try {
    cells = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception &e) {
    throw Error(ErrorCode::kParseError, std::string("cells.json: ") + e.what());
  }
  AccuracyMode mode = AccuracyMode::kPooled;
  std::ifstream meta_in(a.in / "run_meta.json");
  nlohmann::json meta = nullptr;
  if (meta_in) {
    meta = nlohmann::json::parse(meta_in, nullptr, false);
    if (meta.is_discarded()) meta = nullptr;
    if (!meta.is_null() && meta.contains("config") && meta["config"].contains("accuracy")) {
      mode = ParseAccuracy(meta["config"]["accuracy"].get<std::string>());
    }
  }
  if (!a.accuracy.empty()) mode = ParseAccuracy(a.accuracy);
  std::vector<CellResult> results = CellsFromJson(cells);
  for (auto &r : results) FinalizeCell(r, mode);
  const fs::path dir = a.out.empty() ? a.in : a.out;
  WriteReport(dir, results, dir == a.in ? nlohmann::json(nullptr) : meta);
  WriteResultsCsv(out, results);
  return kExitOk;
}

int DoSelfTest(uint64_t seed, std::ostream &out) {
  bool ok = true;
  for (const auto &r : oracle::RunSelfTest(seed)) {
    out << (r.passed ? "PASS " : "FAIL ") << r.name << ": " << r.detail << '\n';
    ok = ok && r.passed;
  }
  return ok ? kExitOk : kExitRuntime;
}

}  // namespace

int Dispatch(int argc, const char *const *argv, std::ostream &out, std::ostream &err) {
  CLI::App app{"Speech-based driver state classification harness", "drivestate"};
  app.set_version_flag("--version", DRIVESTATE_VERSION);
  app.require_subcommand(1);

  SynthArgs synth;
  auto *synth_cmd = app.add_subcommand("synth", "Generate a synthetic speaker dataset");
  synth_cmd->add_option("--out", synth.out, "Output directory (default $" + std::string(kOutDirEnv) + ")");
  synth_cmd->add_option("--seed", synth.seed, "Generator seed")->required();
  synth_cmd->add_option("--subjects", synth.spec.n_subjects, "Number of subjects")->capture_default_str();
  synth_cmd->add_option("--clips", synth.spec.clips_per_condition, "Clips per condition")->capture_default_str();
  auto *null_flag = synth_cmd->add_flag("--null", synth.null_effect, "No sober/impaired difference (default)");
  synth_cmd->add_flag("--strong", synth.strong, "Strong effect preset")->excludes(null_flag);
  synth_cmd->add_option("--f0-drop", synth.f0_drop, "Impaired f0 drop fraction");
  synth_cmd->add_option("--jitter-mult", synth.jitter_mult, "Impaired jitter multiplier");
  synth_cmd->add_option("--shimmer-mult", synth.shimmer_mult, "Impaired shimmer multiplier");
  synth_cmd->add_option("--slowdown", synth.slowdown, "Impaired speech-rate slowdown fraction");
  synth_cmd->add_option("--variability", synth.spec.subject_variability_sd, "Between-subject sd")->capture_default_str();
  synth_cmd->add_option("--base-jitter", synth.spec.base_jitter, "Sober jitter level")->capture_default_str();
  synth_cmd->add_option("--base-shimmer", synth.spec.base_shimmer, "Sober shimmer level")->capture_default_str();
  synth_cmd->add_option("--snr-db", synth.spec.snr_db, "Noise level")->capture_default_str();
  synth_cmd->add_flag("--no-embeddings", synth.no_embeddings, "Skip surrogate embedding files");
  synth_cmd->add_option("--workers", synth.workers, "Worker threads (0 = all cores)");

  SegmentArgs seg;
  auto *seg_cmd = app.add_subcommand("segment", "Cut scripted-phrase clips out of a session recording");
  seg_cmd->add_option("--audio", seg.audio, "Session WAV")->required()->check(CLI::ExistingFile);
  seg_cmd->add_option("--transcript", seg.transcript, "Word-timestamp JSON lines")->required()->check(CLI::ExistingFile);
  seg_cmd->add_option("--out", seg.out, "Output directory");
  seg_cmd->add_option("--min-score", seg.min_score, "Minimum match score")->capture_default_str();
  seg_cmd->add_option("--pad", seg.pad, "Padding around each phrase, seconds")->capture_default_str();
  seg_cmd->add_flag("--allow-repeats", seg.allow_repeats, "Allow a phrase to match more than once");
  auto *subject_opt = seg_cmd->add_option("--subject", seg.subject, "Subject id for a manifest of the clips");
  seg_cmd->add_option("--label", seg.label, "sober or impaired")->needs(subject_opt);
  subject_opt->needs("--label");

  FeaturesArgs feat;
  auto *feat_cmd = app.add_subcommand("features", "Compute feature caches");
  feat_cmd->add_option("--manifest", feat.manifest, "Dataset manifest")->required()->check(CLI::ExistingFile);
  feat_cmd->add_option("--out", feat.out, "Cache directory");
  feat_cmd->add_option("--feature-sets", feat.sets, "Feature sets (default all)")->delimiter(',');
  feat_cmd->add_option("--embedding", feat.embeddings, "NAME=PATH embedding file");
  feat_cmd->add_option("--window", feat.windows, "window and/or nowindow")->delimiter(',');
  feat_cmd->add_option("--workers", feat.workers, "Worker threads (0 = all cores)");

  RunArgs run;
  auto *run_cmd = app.add_subcommand("run", "Run the factorial LOSO grid and write reports");
  run_cmd->add_option("--config", run.config, "JSON run config")->check(CLI::ExistingFile);
  run_cmd->add_option("--seed", run.seed, "Global seed (required here or in the config)");
  run_cmd->add_option("--manifest", run.manifest, "Dataset manifest");
  run_cmd->add_option("--out", run.out, "Report directory");
  run_cmd->add_option("--features-dir", run.features_dir, "Feature cache directory");
  run_cmd->add_option("--workers", run.workers, "Worker threads (0 = all cores)");
  run_cmd->add_option("--feature-sets", run.sets, "Feature sets")->delimiter(',');
  run_cmd->add_option("--classifiers", run.classifiers, "RF and/or SVM")->delimiter(',');
  run_cmd->add_option("--embedding", run.embeddings, "NAME=PATH embedding file");
  run_cmd->add_option("--pca-cap", run.pca_cap, "Maximum PCA components");
  run_cmd->add_option("--baseline-space", run.baseline_space, "pca or raw")->check(CLI::IsMember({"pca", "raw"}));
  run_cmd->add_option("--accuracy", run.accuracy, "pooled or macro")->check(CLI::IsMember({"pooled", "macro"}));
  run_cmd->add_flag("--exclude-baseline-windows", run.exclude_baseline_windows,
                    "Do not score the sober clips that formed the baseline");
  run_cmd->add_flag("--dump-transforms", run.dump_transforms, "Write per-fold transforms.json");
  run_cmd->add_flag("--dump-models", run.dump_models, "Write per-fold models.json");

  ReportArgs rep;
  auto *rep_cmd = app.add_subcommand("report", "Re-render reports from a run directory");
  rep_cmd->add_option("--in", rep.in, "Run directory holding cells.json")->required()->check(CLI::ExistingDirectory);
  rep_cmd->add_option("--out", rep.out, "Output directory (default --in)");
  rep_cmd->add_option("--accuracy", rep.accuracy, "pooled or macro")->check(CLI::IsMember({"pooled", "macro"}));

  uint64_t selftest_seed = 1;
  auto *self_cmd = app.add_subcommand("selftest", "Check the numerical kernels against slow oracles");
  self_cmd->add_option("--seed", selftest_seed, "Seed for the random cases")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp &e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp &e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForVersion &e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError &e) {
    app.exit(e, out, err);
    if (argc <= 1) err << app.help();
    return kExitValidation;
  }

  try {
    if (*synth_cmd) return DoSynth(synth, out);
    if (*seg_cmd) return DoSegment(seg, out);
    if (*feat_cmd) return DoFeatures(feat, out);
    if (*run_cmd) return DoRun(run, out);
    if (*rep_cmd) return DoReport(rep, out);
    if (*self_cmd) return DoSelfTest(selftest_seed, out);
  } catch (const Error &e) {
    err << "error: " << e.what() << '\n';
    return IsValidationError(e.code()) ? kExitValidation : kExitRuntime;
  } catch (const std::exception &e) {
    err << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
  err << app.help();
  return kExitValidation;
}

}  // namespace drivestate
