// tests/test_cli.cc

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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "cli.h"
#include "drivestate/audio.h"
#include "drivestate/config.h"
#include "drivestate/error.h"
#include "drivestate/manifest.h"
#include "drivestate/segmenter.h"
#include "drivestate/synthgen.h"
#include "json.hpp"
#include "test_support.h"

using namespace drivestate;
namespace fs = std::filesystem;
using drivestate::testing::ReadText;
using drivestate::testing::TempDir;

namespace {

struct Outcome {
  int code = -1;
  std::string out;
  std::string err;
};

Outcome Run(std::vector<std::string> args) {
  args.insert(args.begin(), "drivestate");
  std::vector<const char *> argv;
  for (const auto &a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  Outcome o;
  o.code = Dispatch(static_cast<int>(argv.size()), argv.data(), out, err);
  o.out = out.str();
  o.err = err.str();
  return o;
}

ErrorCode CodeOf(auto &&fn) {
  try {
    fn();
  } catch (const Error &e) {
    return e.code();
  }
  FAIL("expected drivestate::Error");
  return ErrorCode::kIo;
}

std::vector<std::string> Lines(const std::string &text) {
  std::vector<std::string> lines;
  std::istringstream in(text);
  for (std::string line; std::getline(in, line);) lines.push_back(line);
  return lines;
}

void WriteFile(const fs::path &path, const std::string &text) {
  std::ofstream(path, std::ios::binary) << text;
}

// Small classifiers keep the end-to-end runs quick.
const char *kFastConfig = R"({
  "rf": {"n_trees": 20},
  "svm": {"epochs": 300}
})";

// One shared tiny strong-effect dataset for the end-to-end cases.
const fs::path &Dataset() {
  static TempDir dir("cli_data");
  static bool made = false;
  if (!made) {
    const Outcome o = Run({"synth", "--out", dir.path().string(), "--seed", "5", "--subjects",
                           "3", "--clips", "2", "--strong", "--workers", "1"});
    REQUIRE(o.code == 0);
    WriteFile(dir.path() / "fast.json", kFastConfig);
    made = true;
  }
  return dir.path();
}

}  // namespace

TEST_CASE("dispatch: usage and validation exit codes") {
  const Outcome none = Run({});
  CHECK(none.code == kExitValidation);
  CHECK(none.err.find("synth") != std::string::npos);
  CHECK(none.err.find("selftest") != std::string::npos);

  CHECK(Run({"frobnicate"}).code == kExitValidation);
  CHECK(Run({"synth", "--out", "x"}).code == kExitValidation);  // seed is required

  TempDir dir;
  const Outcome no_seed = Run({"run", "--manifest", (Dataset() / "manifest.csv").string(),
                               "--out", dir.path().string()});
  CHECK(no_seed.code == kExitValidation);
  CHECK(no_seed.err.find("seed") != std::string::npos);
  CHECK_FALSE(fs::exists(dir.path() / "results.csv"));

  CHECK(Run({"run", "--seed", "1", "--manifest", "/nonexistent/manifest.csv"}).code ==
        kExitValidation);
  CHECK(Run({"--help"}).code == 0);
}

TEST_CASE("IsValidationError splits input problems from runtime failures") {
  CHECK(IsValidationError(ErrorCode::kConfig));
  CHECK(IsValidationError(ErrorCode::kBadSchema));
  CHECK(IsValidationError(ErrorCode::kParseError));
  CHECK_FALSE(IsValidationError(ErrorCode::kIo));
}

TEST_CASE("selftest passes every oracle suite") {
  const Outcome o = Run({"selftest"});
  CHECK(o.code == 0);
  CHECK(o.out.find("FAIL") == std::string::npos);
  CHECK(Lines(o.out).size() >= 4);
}

TEST_CASE("RunConfig: defaults, echo and schema checks") {
  const RunConfig c = RunConfigFromJson(nlohmann::json::object());
  CHECK(c.Cells().size() == 32);
  CHECK_FALSE(c.seed.has_value());
  CHECK(CodeOf([&] { c.Validate(); }) == ErrorCode::kConfig);

  const nlohmann::json echo = c.ToJson();
  for (const char *key : {"dataset", "feature_sets", "classifiers", "baseline", "window",
                          "windowing", "pca_cap", "rf", "svm", "baseline_space",
                          "exclude_baseline_windows", "accuracy", "seed", "workers", "out_dir"}) {
    CHECK(echo.contains(key));
  }
  CHECK(echo["pca_cap"] == 50);
  CHECK(echo["rf"]["n_trees"] == 200);
  // The echo reads back to the same configuration.
  CHECK(RunConfigFromJson(echo).ToJson() == echo);

  CHECK(CodeOf([] { RunConfigFromJson({{"pca_kap", 3}}); }) == ErrorCode::kConfig);
  CHECK(CodeOf([] { RunConfigFromJson({{"rf", {{"trees", 3}}}}); }) == ErrorCode::kConfig);
  CHECK(CodeOf([] { RunConfigFromJson({{"feature_sets", {"mfccc"}}}); }) == ErrorCode::kConfig);
  CHECK(CodeOf([] { RunConfigFromJson({{"accuracy", "median"}}); }) == ErrorCode::kConfig);

  const RunConfig sub = RunConfigFromJson(
      {{"feature_sets", {"egemaps_subset"}}, {"classifiers", {"SVM"}}, {"window", {"nowindow"}}});
  const auto cells = sub.Cells();
  REQUIRE(cells.size() == 2);
  CHECK(cells[0].Key() == "egemaps,SVM,baseline,nowindow");
  CHECK(cells[1].Key() == "egemaps,SVM,nobaseline,nowindow");
}

TEST_CASE("synth honours the output directory environment variable") {
  TempDir dir;
  ::setenv(kOutDirEnv, dir.path().string().c_str(), 1);
  const Outcome o = Run({"synth", "--seed", "2", "--subjects", "1", "--clips", "1",
                         "--no-embeddings"});
  ::unsetenv(kOutDirEnv);
  CHECK(o.code == 0);
  CHECK(fs::exists(dir.path() / "manifest.csv"));
  CHECK(LoadManifest(dir.path() / "manifest.csv").entries.size() == 2);
  CHECK_FALSE(fs::exists(dir.path() / "embeddings"));
}

TEST_CASE("run: full grid report, determinism and re-rendering") {
  const fs::path data = Dataset();
  TempDir a, b, c;
  const std::vector<std::string> common{"run", "--config", (data / "fast.json").string(),
                                        "--manifest", (data / "manifest.csv").string(), "--seed",
                                        "7", "--workers", "1"};
  auto with_out = [&](const fs::path &out) {
    auto args = common;
    args.push_back("--out");
    args.push_back(out.string());
    return args;
  };
  const Outcome first = Run(with_out(a.path()));
  REQUIRE(first.code == 0);
  REQUIRE(Run(with_out(b.path())).code == 0);

  const std::string csv = ReadText(a.path() / "results.csv");
  CHECK(csv == ReadText(b.path() / "results.csv"));
  const auto lines = Lines(csv);
  REQUIRE(lines.size() == 33);
  CHECK(lines[0] == "seed,Embedding,Classifier,Baseline,Window,Accuracy,AUC");
  std::set<std::string> keys;
  for (size_t i = 1; i < lines.size(); ++i) {
    CHECK(lines[i].rfind("7,", 0) == 0);
    keys.insert(lines[i].substr(2, lines[i].rfind(',', lines[i].rfind(',') - 1) - 2));
  }
  CHECK(keys.size() == 32);
  CHECK(keys.count("wavlm_large,RF,baseline,nowindow") == 1);
  CHECK(keys.count("egemaps,SVM,nobaseline,window") == 1);

  for (const char *f : {"per_subject.json", "cells.json", "run_meta.json"}) {
    CHECK(fs::exists(a.path() / f));
  }
  const auto meta = nlohmann::json::parse(ReadText(a.path() / "run_meta.json"));
  CHECK(meta["config"]["seed"] == 7);
  CHECK(meta["config"]["rf"]["n_trees"] == 20);
  CHECK(meta["config"]["rf"]["min_leaf"] == 1);
  CHECK(meta["config"]["svm"]["C"] == 1.0);
  CHECK(meta["n_cells"] == 32);
  CHECK(meta["n_subjects"] == 3);
  CHECK(meta.contains("wall_time_s"));
  CHECK(meta["feature_set_notes"].contains("egemaps"));

  const Outcome rep = Run({"report", "--in", a.path().string(), "--out", c.path().string()});
  REQUIRE(rep.code == 0);
  CHECK(ReadText(c.path() / "results.csv") == csv);
  CHECK(ReadText(c.path() / "per_subject.json") == ReadText(a.path() / "per_subject.json"));
  CHECK(rep.out == csv);
}

TEST_CASE("features caches reproduce the uncached run") {
  const fs::path data = Dataset();
  TempDir cache, direct, cached;
  const Outcome f = Run({"features", "--manifest", (data / "manifest.csv").string(), "--out",
                         cache.path().string(), "--feature-sets", "mfcc,egemaps_subset",
                         "--workers", "1"});
  REQUIRE(f.code == 0);
  CHECK(fs::exists(cache.path() / "mfcc_window.csv"));
  CHECK(fs::exists(cache.path() / "egemaps_subset_nowindow.csv"));

  std::vector<std::string> args{"run", "--config", (data / "fast.json").string(),
                                "--manifest", (data / "manifest.csv").string(), "--seed", "3",
                                "--feature-sets", "mfcc,egemaps_subset", "--classifiers", "RF"};
  auto a = args;
  a.insert(a.end(), {"--out", direct.path().string()});
  auto b = args;
  b.insert(b.end(), {"--out", cached.path().string(), "--features-dir", cache.path().string()});
  REQUIRE(Run(a).code == 0);
  REQUIRE(Run(b).code == 0);
  const std::string csv = ReadText(direct.path() / "results.csv");
  CHECK(Lines(csv).size() == 9);
  CHECK(ReadText(cached.path() / "results.csv") == csv);
}

TEST_CASE("segment recovers the scripted phrases from a session") {
  const auto session = testing::BuildSession(ScriptedPhrases());
  TempDir dir;
  const double total_s = session.tokens.back().end_s + 1.0;
  AudioClip audio;
  audio.samples = testing::Sine(static_cast<size_t>(total_s * 16000), 180.0, 0.3, 16000);
  WriteWav16(dir.path() / "session.wav", audio);
  {
    std::ofstream t(dir.path() / "session.jsonl");
    WriteTranscript(t, session.tokens);
  }
  const fs::path out = dir.path() / "out";
  const Outcome o = Run({"segment", "--audio", (dir.path() / "session.wav").string(),
                         "--transcript", (dir.path() / "session.jsonl").string(), "--out",
                         out.string(), "--subject", "p1", "--label", "sober"});
  REQUIRE(o.code == 0);
  CHECK(o.out.find("recovered 12 of 12") != std::string::npos);
  CHECK(Lines(ReadText(out / "segments.csv")).size() == 13);
  const Manifest m = LoadManifest(out / "manifest.csv");
  REQUIRE(m.entries.size() == 12);
  for (const auto &e : m.entries) {
    CHECK(e.subject_id == "p1");
    CHECK(e.label == kSober);
    CHECK(fs::exists(m.Resolve(e.audio_path)));
  }
  CHECK(Run({"segment", "--audio", (dir.path() / "session.wav").string(), "--transcript",
             (dir.path() / "session.jsonl").string(), "--out", out.string(), "--subject", "p1",
             "--label", "tipsy"})
            .code == kExitValidation);
}
