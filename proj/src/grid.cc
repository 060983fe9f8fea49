// src/grid.cc

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

#include "drivestate/grid.h"

#include "drivestate/error.h"

namespace drivestate {

const char *FeatureSetName(FeatureSet set) {
  switch (set) {
    case FeatureSet::kMfcc: return "mfcc";
    case FeatureSet::kEgemapsSubset: return "egemaps_subset";
    case FeatureSet::kWav2vec2Large: return "wav2vec2_large";
    case FeatureSet::kWavlmLarge: return "wavlm_large";
  }
  return "?";
}

const char *FeatureSetLabel(FeatureSet set) {
  return set == FeatureSet::kEgemapsSubset ? "egemaps" : FeatureSetName(set);
}

FeatureSet ParseFeatureSet(std::string_view name) {
  for (FeatureSet set : kAllFeatureSets) {
    if (name == FeatureSetName(set) || name == FeatureSetLabel(set)) return set;
  }
  throw Error(ErrorCode::kConfig, "unknown feature set '" + std::string(name) + "'");
}

bool IsEmbeddingSet(FeatureSet set) {
  return set == FeatureSet::kWav2vec2Large || set == FeatureSet::kWavlmLarge;
}

const char *ClassifierLabel(ClassifierKind kind) {
  return kind == ClassifierKind::kRandomForest ? "RF" : "SVM";
}

ClassifierKind ParseClassifier(std::string_view name) {
  if (name == "RF" || name == "rf") return ClassifierKind::kRandomForest;
  if (name == "SVM" || name == "svm") return ClassifierKind::kSvm;
  throw Error(ErrorCode::kConfig, "unknown classifier '" + std::string(name) + "'");
}

int GridCell::CanonicalIndex() const {
  return static_cast<int>(feature_set) * 8 + static_cast<int>(classifier) * 4 +
         (baseline ? 0 : 2) + (windowed ? 0 : 1);
}

std::string GridCell::Key() const {
  return std::string(FeatureSetLabel(feature_set)) + "," + ClassifierLabel(classifier) + "," +
         BaselineLabel(baseline) + "," + WindowLabel(windowed);
}

std::vector<GridCell> FullGrid() {
  std::vector<GridCell> cells;
  for (FeatureSet set : kAllFeatureSets) {
    for (ClassifierKind kind : {ClassifierKind::kRandomForest, ClassifierKind::kSvm}) {
      for (bool baseline : {true, false}) {
        for (bool windowed : {true, false}) {
          cells.push_back({set, kind, baseline, windowed});
        }
      }
    }
  }
  return cells;
}

}  // namespace drivestate
