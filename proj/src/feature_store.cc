// src/feature_store.cc

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

#include "drivestate/feature_store.h"

#include <algorithm>

#include "drivestate/audio.h"
#include "drivestate/error.h"
#include "drivestate/features_dsp.h"
#include "drivestate/features_voice.h"
#include "drivestate/parallel.h"

namespace drivestate {

void FeatureStore::Put(FeatureSet set, bool windowed, FeatureMatrix matrix) {
  matrices_[{set, windowed}] = std::move(matrix);
}

bool FeatureStore::Has(FeatureSet set, bool windowed) const {
  return matrices_.count({set, windowed}) > 0;
}

const FeatureMatrix &FeatureStore::Get(FeatureSet set, bool windowed) const {
  auto it = matrices_.find({set, windowed});
  if (it == matrices_.end()) {
    throw Error(ErrorCode::kConfig, std::string("no features for ") + FeatureSetName(set) + " " +
                                        WindowLabel(windowed));
  }
  return it->second;
}

std::string CacheFileName(FeatureSet set, bool windowed) {
  return std::string(FeatureSetName(set)) + "_" + WindowLabel(windowed) + ".csv";
}

namespace {

FeatureVector Tagged(FeatureVector v, const ManifestEntry &entry, int window_index) {
  v.clip_id = entry.clip_id;
  v.subject_id = entry.subject_id;
  v.label = entry.label;
  v.window_index = window_index;
  return v;
}

FeatureVector Tagged(const std::vector<double> &values, const std::vector<std::string> &names,
                     const ManifestEntry &entry, int window_index) {
  FeatureVector v;
  v.values = values;
  v.names = names;
  return Tagged(std::move(v), entry, window_index);
}

// Classical vectors for one clip: [variant][set][window].
using ClipVectors = std::vector<std::vector<std::vector<FeatureVector>>>;

}  // namespace

FeatureMatrix EmbeddingMatrix(const Manifest &manifest, const EmbeddingTable &table,
                              bool windowed) {
  std::vector<std::string> names;
  for (size_t j = 0; j < table.dim; ++j) names.push_back(table.set_name + "_" + std::to_string(j));
  std::vector<FeatureVector> vectors;
  for (const auto &entry : manifest.entries) {
    int found = 0;
    if (windowed) {
      while (const auto *row = table.Find(WindowKey(entry.clip_id, found))) {
        vectors.push_back(Tagged(*row, names, entry, found));
        ++found;
      }
    }
    if (found == 0) {
      const auto *row = table.Find(entry.clip_id);
      if (!row) {
        throw Error(ErrorCode::kBadSchema,
                    "no " + table.set_name + " embedding for clip " + entry.clip_id);
      }
      vectors.push_back(Tagged(*row, names, entry, 0));
    }
  }
  return AssembleMatrix(vectors);
}

FeatureStore BuildFeatureStore(const Manifest &manifest, const FeatureStoreOptions &options) {
  FeatureStore store;
  std::vector<FeatureSet> classical;
  for (FeatureSet set : options.sets) {
    if (IsEmbeddingSet(set)) {
      auto it = options.embeddings.find(set);
      if (it == options.embeddings.end()) {
        throw Error(ErrorCode::kConfig,
                    std::string("no embedding file configured for ") + FeatureSetName(set));
      }
      const EmbeddingTable table =
          IngestEmbeddings(it->second.path, it->second.pooled, FeatureSetName(set));
      for (bool w : options.windowed) store.Put(set, w, EmbeddingMatrix(manifest, table, w));
    } else if (std::find(classical.begin(), classical.end(), set) == classical.end()) {
      classical.push_back(set);
    }
  }
  if (classical.empty()) return store;

  const auto &entries = manifest.entries;
  std::vector<ClipVectors> per_clip(entries.size());
  ParallelFor(entries.size(), options.workers, [&](size_t i) {
    const ManifestEntry &entry = entries[i];
    if (entry.audio_path.empty()) {
      throw Error(ErrorCode::kBadSchema, "clip " + entry.clip_id + " has no audio_path");
    }
    const AudioClip clip = LoadAudio(manifest.Resolve(entry.audio_path), entry.clip_id);
    ClipVectors &out = per_clip[i];
    out.resize(options.windowed.size(), std::vector<std::vector<FeatureVector>>(classical.size()));
    for (size_t v = 0; v < options.windowed.size(); ++v) {
      for (const ClipWindow &window : MakeWindows(clip, options.windowed[v], options.window)) {
        for (size_t s = 0; s < classical.size(); ++s) {
          FeatureVector fv = classical[s] == FeatureSet::kMfcc ? ClassicalFeatureVector(window.clip)
                                                               : VoiceQualityVector(window.clip);
          out[v][s].push_back(Tagged(std::move(fv), entry, window.window_index));
        }
      }
    }
  });

  for (size_t v = 0; v < options.windowed.size(); ++v) {
    for (size_t s = 0; s < classical.size(); ++s) {
      std::vector<FeatureVector> vectors;
      for (auto &clip : per_clip) {
        for (auto &fv : clip[v][s]) vectors.push_back(std::move(fv));
      }
      store.Put(classical[s], options.windowed[v], AssembleMatrix(vectors));
    }
  }
  return store;
}

FeatureMatrix MatrixFromCache(const FeatureCsv &cache, const Manifest &manifest) {
  std::vector<FeatureVector> vectors;
  vectors.reserve(cache.rows.size());
  for (const auto &row : cache.rows) {
    const ManifestEntry *entry = manifest.Find(row.clip_id);
    if (!entry) {
      throw Error(ErrorCode::kBadSchema, "cached clip " + row.clip_id + " is not in the manifest");
    }
    vectors.push_back(Tagged(row.values, cache.names, *entry, row.window_index));
  }
  return AssembleMatrix(vectors);
}

}  // namespace drivestate
