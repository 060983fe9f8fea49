// include/drivestate/feature_store.h

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

#ifndef DRIVESTATE_FEATURE_STORE_H_
#define DRIVESTATE_FEATURE_STORE_H_

#include <filesystem>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "drivestate/embeddings.h"
#include "drivestate/feature_matrix.h"
#include "drivestate/grid.h"
#include "drivestate/manifest.h"
#include "drivestate/pipeline.h"

namespace drivestate {

struct EmbeddingSource {
  std::filesystem::path path;
  bool pooled = true;
};

struct FeatureStoreOptions {
  std::vector<FeatureSet> sets{kAllFeatureSets.begin(), kAllFeatureSets.end()};
  std::vector<bool> windowed{true, false};
  WindowParams window;
  std::map<FeatureSet, EmbeddingSource> embeddings;
  int workers = 1;
};

// Feature matrices keyed by (feature set, windowed).
class FeatureStore {
 public:
  void Put(FeatureSet set, bool windowed, FeatureMatrix matrix);
  bool Has(FeatureSet set, bool windowed) const;
  // Throws kConfig if absent.
  const FeatureMatrix &Get(FeatureSet set, bool windowed) const;

 private:
  std::map<std::pair<FeatureSet, bool>, FeatureMatrix> matrices_;
};

// Rows follow manifest order, then window order. Classical sets are computed
// from audio (each clip decoded once); embedding sets are looked up by clip
// id, or by "<clip>@w<k>" keys for windowed variants (falling back to the
// clip-level vector as a single window when no window keys exist).
FeatureStore BuildFeatureStore(const Manifest &manifest, const FeatureStoreOptions &options);

FeatureMatrix EmbeddingMatrix(const Manifest &manifest, const EmbeddingTable &table,
                              bool windowed);

// Joins a feature cache with the manifest for subject and label columns.
FeatureMatrix MatrixFromCache(const FeatureCsv &cache, const Manifest &manifest);

// "<set>_<window|nowindow>.csv"
std::string CacheFileName(FeatureSet set, bool windowed);

}  // namespace drivestate

#endif  // DRIVESTATE_FEATURE_STORE_H_
