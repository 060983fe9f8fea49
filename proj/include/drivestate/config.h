// include/drivestate/config.h

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

#ifndef DRIVESTATE_CONFIG_H_
#define DRIVESTATE_CONFIG_H_

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "drivestate/feature_store.h"
#include "drivestate/grid.h"
#include "drivestate/harness.h"
#include "json.hpp"

namespace drivestate {

inline constexpr const char *kOutDirEnv = "DRIVESTATE_OUT";

struct RunConfig {
  std::filesystem::path manifest;
  std::map<FeatureSet, EmbeddingSource> embeddings;
  // Optional directory of feature caches written by the features command.
  std::filesystem::path features_dir;

  std::vector<FeatureSet> feature_sets{kAllFeatureSets.begin(), kAllFeatureSets.end()};
  std::vector<ClassifierKind> classifiers{ClassifierKind::kRandomForest, ClassifierKind::kSvm};
  std::vector<bool> baseline{true, false};
  std::vector<bool> windowed{true, false};

  WindowParams window;
  HarnessOptions harness;

  std::optional<uint64_t> seed;
  int workers = 0;  // 0 selects the number of hardware threads
  std::filesystem::path out_dir;

  // Cells selected by the factor lists, in canonical order.
  std::vector<GridCell> Cells() const;
  int EffectiveWorkers() const;

  // Throws kConfig for a missing seed, empty factor lists, bad parameter
  // values or paths that do not exist.
  void Validate() const;

  // Every field, defaults included.
  nlohmann::json ToJson() const;
};

// Keys not listed in the schema are rejected. Relative paths resolve
// against base_dir. Missing out_dir falls back to $DRIVESTATE_OUT, then
// "drivestate_out".
RunConfig RunConfigFromJson(const nlohmann::json &json,
                            const std::filesystem::path &base_dir = {});
RunConfig LoadRunConfig(const std::filesystem::path &path);

std::filesystem::path DefaultOutDir();

// True when the first data line of an embedding file opens a frame block.
bool LooksUnpooled(const std::filesystem::path &path);

}  // namespace drivestate

#endif  // DRIVESTATE_CONFIG_H_
