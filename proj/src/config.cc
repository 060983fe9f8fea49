// src/config.cc

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

#include "drivestate/config.h"

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <set>

#include "drivestate/error.h"
#include "drivestate/parallel.h"
#include "drivestate/strings.h"

namespace drivestate {

namespace fs = std::filesystem;

namespace {

[[noreturn]] void Fail(const std::string &what) { throw Error(ErrorCode::kConfig, what); }

void CheckKeys(const nlohmann::json &obj, const std::set<std::string> &allowed,
               const std::string &where) {
  if (!obj.is_object()) Fail(where + " must be an object");
  for (const auto &[key, value] : obj.items()) {
    if (!allowed.count(key)) Fail("unknown key '" + key + "' in " + where);
  }
}

fs::path ResolvePath(const std::string &p, const fs::path &base) {
  fs::path path(p);
  return path.is_relative() && !base.empty() ? base / path : path;
}

std::vector<bool> ParseToggles(const nlohmann::json &list, const char *on, const char *off,
                               const std::string &key) {
  std::vector<bool> out;
  for (const auto &item : list) {
    const auto token = item.get<std::string>();
    if (token == on) out.push_back(true);
    else if (token == off) out.push_back(false);
    else Fail("bad value '" + token + "' in " + key);
  }
  return out;
}

}  // namespace

fs::path DefaultOutDir() {
  const char *env = std::getenv(kOutDirEnv);
  return env && *env ? fs::path(env) : fs::path("drivestate_out");
}

bool LooksUnpooled(const fs::path &path) {
  std::ifstream in(path);
  std::string line;
  while (std::getline(in, line)) {
    const std::string t = Trim(StripCr(line));
    if (t.empty() || t[0] == '#') continue;
    return t.rfind("clip ", 0) == 0;
  }
  return false;
}

std::vector<GridCell> RunConfig::Cells() const {
  std::vector<GridCell> cells;
  auto has = [](const auto &list, auto value) {
    return std::find(list.begin(), list.end(), value) != list.end();
  };
  for (const GridCell &cell : FullGrid()) {
    if (has(feature_sets, cell.feature_set) && has(classifiers, cell.classifier) &&
        has(baseline, cell.baseline) && has(windowed, cell.windowed)) {
      cells.push_back(cell);
    }
  }
  return cells;
}

int RunConfig::EffectiveWorkers() const { return workers > 0 ? workers : DefaultWorkers(); }

void RunConfig::Validate() const {
  if (!seed) Fail("seed is required");
  if (feature_sets.empty() || classifiers.empty() || baseline.empty() || windowed.empty()) {
    Fail("every grid factor needs at least one level");
  }
  if (manifest.empty()) Fail("dataset.manifest is required");
  if (!fs::exists(manifest)) Fail("manifest not found: " + manifest.string());
  if (!features_dir.empty() && !fs::is_directory(features_dir)) {
    Fail("features_dir not found: " + features_dir.string());
  }
  for (FeatureSet set : feature_sets) {
    if (!IsEmbeddingSet(set)) continue;
    auto it = embeddings.find(set);
    if (it == embeddings.end()) {
      if (!features_dir.empty()) continue;
      Fail(std::string("no embedding file for ") + FeatureSetName(set));
    }
    if (!fs::exists(it->second.path)) Fail("embedding file not found: " + it->second.path.string());
  }
  if (harness.pca_cap < 1) Fail("pca_cap must be >= 1");
  if (!(window.length_s > 0.0) || !(window.hop_s > 0.0) || window.min_partial_s < 0.0) {
    Fail("window lengths must be positive");
  }
  if (harness.forest.n_trees < 1 || harness.forest.min_leaf < 1 || harness.forest.max_features < 0) {
    Fail("invalid rf parameters");
  }
  if (!(harness.svm.c > 0.0) || harness.svm.epochs < 1) Fail("invalid svm parameters");
  if (workers < 0) Fail("workers must be >= 0");
}

nlohmann::json RunConfig::ToJson() const {
  nlohmann::json emb = nlohmann::json::object();
  for (const auto &[set, src] : embeddings) {
    emb[FeatureSetName(set)] = {{"path", src.path.string()}, {"pooled", src.pooled}};
  }
  nlohmann::json sets = nlohmann::json::array(), kinds = nlohmann::json::array(),
                 base = nlohmann::json::array(), win = nlohmann::json::array();
  for (FeatureSet s : feature_sets) sets.push_back(FeatureSetName(s));
  for (ClassifierKind k : classifiers) kinds.push_back(ClassifierLabel(k));
  for (bool b : baseline) base.push_back(BaselineLabel(b));
  for (bool w : windowed) win.push_back(WindowLabel(w));
  return {
      {"dataset",
       {{"manifest", manifest.string()}, {"embeddings", emb}, {"features_dir", features_dir.string()}}},
      {"feature_sets", sets},
      {"classifiers", kinds},
      {"baseline", base},
      {"window", win},
      {"windowing",
       {{"length_s", window.length_s}, {"hop_s", window.hop_s}, {"min_partial_s", window.min_partial_s}}},
      {"pca_cap", harness.pca_cap},
      {"rf",
       {{"n_trees", harness.forest.n_trees},
        {"max_features", harness.forest.max_features},
        {"min_leaf", harness.forest.min_leaf}}},
      {"svm", {{"C", harness.svm.c}, {"epochs", harness.svm.epochs}}},
      {"baseline_space", harness.baseline_space == BaselineSpace::kPca ? "pca" : "raw"},
      {"exclude_baseline_windows", harness.exclude_baseline_windows},
      {"accuracy", harness.accuracy == AccuracyMode::kPooled ? "pooled" : "macro"},
      {"dump_transforms", harness.dump_transforms},
      {"dump_models", harness.dump_models},
      {"seed", seed ? nlohmann::json(*seed) : nlohmann::json(nullptr)},
      {"workers", workers},
      {"effective_workers", EffectiveWorkers()},
      {"out_dir", out_dir.string()},
  };
}

RunConfig RunConfigFromJson(const nlohmann::json &json, const fs::path &base_dir) {
  RunConfig c;
  c.out_dir = DefaultOutDir();
  try {
    CheckKeys(json,
              {"dataset", "feature_sets", "classifiers", "baseline", "window", "windowing",
               "pca_cap", "rf", "svm", "baseline_space", "exclude_baseline_windows", "accuracy",
               "dump_transforms", "dump_models", "seed", "workers", "effective_workers", "out_dir"},
              "config");
    if (json.contains("dataset")) {
      const auto &d = json["dataset"];
      CheckKeys(d, {"manifest", "embeddings", "features_dir"}, "dataset");
      if (d.contains("manifest")) c.manifest = ResolvePath(d["manifest"].get<std::string>(), base_dir);
      if (d.contains("features_dir") && !d["features_dir"].get<std::string>().empty()) {
        c.features_dir = ResolvePath(d["features_dir"].get<std::string>(), base_dir);
      }
      if (d.contains("embeddings")) {
        for (const auto &[name, spec] : d["embeddings"].items()) {
          const FeatureSet set = ParseFeatureSet(name);
          if (!IsEmbeddingSet(set)) Fail(name + " is not an embedding feature set");
          EmbeddingSource src;
          if (spec.is_string()) {
            src.path = ResolvePath(spec.get<std::string>(), base_dir);
            src.pooled = !LooksUnpooled(src.path);
          } else {
            CheckKeys(spec, {"path", "pooled"}, "dataset.embeddings." + name);
            src.path = ResolvePath(spec.at("path").get<std::string>(), base_dir);
            src.pooled = spec.contains("pooled") ? spec["pooled"].get<bool>() : !LooksUnpooled(src.path);
          }
          c.embeddings[set] = src;
        }
      }
    }
    if (json.contains("feature_sets")) {
      c.feature_sets.clear();
      for (const auto &s : json["feature_sets"]) c.feature_sets.push_back(ParseFeatureSet(s.get<std::string>()));
    }
    if (json.contains("classifiers")) {
      c.classifiers.clear();
      for (const auto &s : json["classifiers"]) c.classifiers.push_back(ParseClassifier(s.get<std::string>()));
    }
    if (json.contains("baseline")) c.baseline = ParseToggles(json["baseline"], "baseline", "nobaseline", "baseline");
    if (json.contains("window")) c.windowed = ParseToggles(json["window"], "window", "nowindow", "window");
    if (json.contains("windowing")) {
      const auto &w = json["windowing"];
      CheckKeys(w, {"length_s", "hop_s", "min_partial_s"}, "windowing");
      c.window.length_s = w.value("length_s", c.window.length_s);
      c.window.hop_s = w.value("hop_s", c.window.hop_s);
      c.window.min_partial_s = w.value("min_partial_s", c.window.min_partial_s);
    }
    c.harness.pca_cap = json.value("pca_cap", c.harness.pca_cap);
    if (json.contains("rf")) {
      const auto &r = json["rf"];
      CheckKeys(r, {"n_trees", "max_features", "min_leaf"}, "rf");
      c.harness.forest.n_trees = r.value("n_trees", c.harness.forest.n_trees);
      c.harness.forest.max_features = r.value("max_features", c.harness.forest.max_features);
      c.harness.forest.min_leaf = r.value("min_leaf", c.harness.forest.min_leaf);
    }
    if (json.contains("svm")) {
      const auto &s = json["svm"];
      CheckKeys(s, {"C", "epochs"}, "svm");
      c.harness.svm.c = s.value("C", c.harness.svm.c);
      c.harness.svm.epochs = s.value("epochs", c.harness.svm.epochs);
    }
    if (json.contains("baseline_space")) {
      const auto v = json["baseline_space"].get<std::string>();
      if (v == "pca") c.harness.baseline_space = BaselineSpace::kPca;
      else if (v == "raw") c.harness.baseline_space = BaselineSpace::kRaw;
      else Fail("baseline_space must be pca or raw");
    }
    c.harness.exclude_baseline_windows =
        json.value("exclude_baseline_windows", c.harness.exclude_baseline_windows);
    if (json.contains("accuracy")) {
      const auto v = json["accuracy"].get<std::string>();
      if (v == "pooled") c.harness.accuracy = AccuracyMode::kPooled;
      else if (v == "macro") c.harness.accuracy = AccuracyMode::kMacro;
      else Fail("accuracy must be pooled or macro");
    }
    c.harness.dump_transforms = json.value("dump_transforms", false);
    c.harness.dump_models = json.value("dump_models", false);
    if (json.contains("seed") && !json["seed"].is_null()) c.seed = json["seed"].get<uint64_t>();
    c.workers = json.value("workers", 0);
    if (json.contains("out_dir")) c.out_dir = ResolvePath(json["out_dir"].get<std::string>(), base_dir);
  } catch (const nlohmann::json::exception &e) {
    Fail(std::string("malformed config: ") + e.what());
  }
  return c;
}

RunConfig LoadRunConfig(const fs::path &path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kConfig, "cannot open config " + path.string());
  nlohmann::json json;
  try {
    json = nlohmann::json::parse(in, nullptr, true, true);
  } catch (const nlohmann::json::exception &e) {
    throw Error(ErrorCode::kConfig, "config " + path.string() + ": " + e.what());
  }
  return RunConfigFromJson(json, path.parent_path());
}

}  // namespace drivestate
