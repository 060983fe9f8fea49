// include/drivestate/grid.h

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

#ifndef DRIVESTATE_GRID_H_
#define DRIVESTATE_GRID_H_

#include <array>
#include <string>
#include <string_view>
#include <vector>

namespace drivestate {

enum class FeatureSet { kMfcc, kEgemapsSubset, kWav2vec2Large, kWavlmLarge };
enum class ClassifierKind { kRandomForest, kSvm };

inline constexpr std::array<FeatureSet, 4> kAllFeatureSets = {
    FeatureSet::kMfcc, FeatureSet::kEgemapsSubset, FeatureSet::kWav2vec2Large,
    FeatureSet::kWavlmLarge};

// Internal name, used in configs and cache file names.
const char *FeatureSetName(FeatureSet set);
// Label printed in the Embedding column of reports.
const char *FeatureSetLabel(FeatureSet set);
// Accepts internal names and report labels; throws kConfig otherwise.
FeatureSet ParseFeatureSet(std::string_view name);
bool IsEmbeddingSet(FeatureSet set);

const char *ClassifierLabel(ClassifierKind kind);  // "RF" / "SVM"
ClassifierKind ParseClassifier(std::string_view name);

inline const char *BaselineLabel(bool on) { return on ? "baseline" : "nobaseline"; }
inline const char *WindowLabel(bool on) { return on ? "window" : "nowindow"; }

struct GridCell {
  FeatureSet feature_set = FeatureSet::kMfcc;
  ClassifierKind classifier = ClassifierKind::kRandomForest;
  bool baseline = false;
  bool windowed = false;

  // Position in the canonical 32-cell enumeration; seeds derive from it.
  int CanonicalIndex() const;
  std::string Key() const;  // "mfcc,RF,baseline,window"
  bool operator==(const GridCell &) const = default;
};

// Cells in canonical order: feature set, classifier, baseline (on first),
// window (on first).
std::vector<GridCell> FullGrid();

}  // namespace drivestate

#endif  // DRIVESTATE_GRID_H_
