// include/drivestate/harness.h

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

#ifndef DRIVESTATE_HARNESS_H_
#define DRIVESTATE_HARNESS_H_

#include <cstdint>
#include <string>
#include <vector>

#include "drivestate/feature_matrix.h"
#include "drivestate/feature_store.h"
#include "drivestate/forest.h"
#include "drivestate/grid.h"
#include "drivestate/metrics.h"
#include "drivestate/pipeline.h"
#include "drivestate/svm.h"
#include "json.hpp"

namespace drivestate {

struct LosoFold {
  std::string held_out_subject;
  std::vector<size_t> train_rows;
  std::vector<size_t> test_rows;
};

// One fold per subject in sorted subject order. Throws kTooFewSubjects when
// fewer than two subjects are present.
std::vector<LosoFold> LosoFolds(const FeatureMatrix &matrix);

enum class BaselineSpace { kPca, kRaw };

struct HarnessOptions {
  int pca_cap = kDefaultPcaCap;
  ForestParams forest;  // seed is replaced per fold
  SvmParams svm;        // seed is replaced per fold
  BaselineSpace baseline_space = BaselineSpace::kPca;
  // Drop the sober rows that formed a subject's baseline from scoring.
  bool exclude_baseline_windows = false;
  AccuracyMode accuracy = AccuracyMode::kPooled;
  bool dump_transforms = false;
  bool dump_models = false;
};

struct FoldResult {
  std::string held_out_subject;
  std::vector<std::string> clip_ids;
  std::vector<double> clip_probs;
  std::vector<int> clip_labels;
  std::vector<int> clip_preds;
  bool failed = false;
  std::string error;                 // "<ErrorCode>: message" when failed
  nlohmann::json transforms = nullptr;  // filled when dumps are requested
  nlohmann::json model = nullptr;
};

struct CellResult {
  GridCell cell;
  uint64_t seed = 0;
  std::vector<FoldResult> folds;
  MetricsReport metrics;
  bool has_metrics = false;  // false when every fold failed
};

uint64_t FoldSeed(uint64_t global_seed, const GridCell &cell, size_t fold_index);

// Trains and scores one held-out subject. Errors propagate.
FoldResult RunFold(const GridCell &cell, const FeatureMatrix &matrix, const LosoFold &fold,
                   uint64_t seed, const HarnessOptions &options);

// Pools clip-level results of successful folds, in fold order.
void FinalizeCell(CellResult &result, AccuracyMode mode);

// Runs every fold of one cell; a fold that throws a drivestate::Error is
// recorded as failed and excluded from the pooled metrics.
CellResult RunGridCell(const GridCell &cell, const FeatureMatrix &matrix, uint64_t global_seed,
                       const HarnessOptions &options);

// All (cell, fold) units run on 'workers' threads; results are returned in
// the order of 'cells' and do not depend on scheduling.
std::vector<CellResult> RunGrid(const std::vector<GridCell> &cells, const FeatureStore &store,
                                uint64_t global_seed, const HarnessOptions &options,
                                int workers);

// Permutes clip labels among the clips of each subject (all windows of a clip
// move together).
FeatureMatrix ShuffleLabelsWithinSubject(const FeatureMatrix &matrix, uint64_t seed);

}  // namespace drivestate

#endif  // DRIVESTATE_HARNESS_H_
