// src/experiment.cc

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

#include "drivestate/experiment.h"

#include <chrono>

#include <Eigen/Core>

#include "drivestate/manifest.h"
#include "drivestate/report.h"

namespace drivestate {

FeatureStore PrepareFeatures(const RunConfig &config, const Manifest &manifest) {
  FeatureStore store;
  FeatureStoreOptions todo;
  todo.sets.clear();
  todo.windowed = config.windowed;
  todo.window = config.window;
  todo.embeddings = config.embeddings;
  todo.workers = config.EffectiveWorkers();
  for (FeatureSet set : config.feature_sets) {
    bool cached = !config.features_dir.empty();
    for (bool w : config.windowed) {
      cached = cached && std::filesystem::exists(config.features_dir / CacheFileName(set, w));
    }
    if (cached) {
      for (bool w : config.windowed) {
        store.Put(set, w,
                  MatrixFromCache(LoadFeatureCsv(config.features_dir / CacheFileName(set, w)),
                                  manifest));
      }
    } else {
      todo.sets.push_back(set);
    }
  }
  if (!todo.sets.empty()) {
    FeatureStore computed = BuildFeatureStore(manifest, todo);
    for (FeatureSet set : todo.sets) {
      for (bool w : config.windowed) store.Put(set, w, computed.Get(set, w));
    }
  }
  return store;
}

ExperimentOutput RunExperiment(const RunConfig &config) {
  config.Validate();
  const auto start = std::chrono::steady_clock::now();
  const Manifest manifest = LoadManifest(config.manifest);
  const FeatureStore store = PrepareFeatures(config, manifest);

  ExperimentOutput out;
  out.results = RunGrid(config.Cells(), store, *config.seed, config.harness,
                        config.EffectiveWorkers());
  const double wall =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

  int failures = 0;
  for (const auto &r : out.results) {
    for (const auto &f : r.folds) failures += f.failed;
  }
  nlohmann::json dims = nlohmann::json::object();
  for (FeatureSet set : config.feature_sets) {
    for (bool w : config.windowed) {
      const FeatureMatrix &m = store.Get(set, w);
      dims[std::string(FeatureSetName(set)) + "_" + WindowLabel(w)] = {{"rows", m.rows()},
                                                                        {"cols", m.cols()}};
    }
  }
  out.meta = {{"config", config.ToJson()},
              {"versions",
               {{"drivestate", DRIVESTATE_VERSION},
                {"eigen", std::to_string(EIGEN_WORLD_VERSION) + "." +
                              std::to_string(EIGEN_MAJOR_VERSION) + "." +
                              std::to_string(EIGEN_MINOR_VERSION)},
                {"compiler", __VERSION__}}},
              {"wall_time_s", wall},
              {"n_clips", manifest.entries.size()},
              {"n_subjects", manifest.Subjects().size()},
              {"n_cells", out.results.size()},
              {"fold_failures", failures},
              {"feature_matrices", dims},
              {"feature_set_notes", FeatureSetNotes()}};
  WriteReport(config.out_dir, out.results, out.meta);
  return out;
}

}  // namespace drivestate
