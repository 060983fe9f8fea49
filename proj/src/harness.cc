// src/harness.cc

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

#include "drivestate/harness.h"

#include <algorithm>
#include <map>
#include <set>

#include "drivestate/error.h"
#include "drivestate/manifest.h"
#include "drivestate/parallel.h"
#include "drivestate/rng.h"

namespace drivestate {

std::vector<LosoFold> LosoFolds(const FeatureMatrix &matrix) {
  std::set<std::string> subjects;
  for (const auto &r : matrix.index) subjects.insert(r.subject_id);
  if (subjects.size() < 2) {
    throw Error(ErrorCode::kTooFewSubjects,
                "LOSO needs at least 2 subjects, got " + std::to_string(subjects.size()));
  }
  std::vector<LosoFold> folds;
  for (const auto &subject : subjects) {
    LosoFold fold;
    fold.held_out_subject = subject;
    for (size_t i = 0; i < matrix.index.size(); ++i) {
      (matrix.index[i].subject_id == subject ? fold.test_rows : fold.train_rows).push_back(i);
    }
    folds.push_back(std::move(fold));
  }
  return folds;
}

uint64_t FoldSeed(uint64_t global_seed, const GridCell &cell, size_t fold_index) {
  return MixSeed(global_seed, static_cast<uint64_t>(cell.CanonicalIndex()),
                 static_cast<uint64_t>(fold_index));
}

namespace {

std::vector<int> Labels(const FeatureMatrix &m) {
  std::vector<int> labels;
  labels.reserve(m.index.size());
  for (const auto &r : m.index) labels.push_back(r.label);
  return labels;
}

std::vector<double> Row(const Eigen::MatrixXd &x, Eigen::Index i) {
  std::vector<double> row(static_cast<size_t>(x.cols()));
  for (Eigen::Index j = 0; j < x.cols(); ++j) row[static_cast<size_t>(j)] = x(i, j);
  return row;
}

}  // namespace

FoldResult RunFold(const GridCell &cell, const FeatureMatrix &matrix, const LosoFold &fold,
                   uint64_t seed, const HarnessOptions &options) {
  FoldResult result;
  result.held_out_subject = fold.held_out_subject;

  FeatureMatrix train = matrix.SelectRows(fold.train_rows);
  FeatureMatrix test = matrix.SelectRows(fold.test_rows);
  const bool raw_baseline = cell.baseline && options.baseline_space == BaselineSpace::kRaw;
  if (raw_baseline) {
    // Every subject is centred on its own sober mean, training subjects included.
    train = SubtractBaseline(train, true);
    test = SubtractBaseline(test, true);
  }
  auto z = FitApplyZNorm(train, test);
  auto p = FitApplyPca(z.train, z.test, options.pca_cap);
  FeatureMatrix scored = p.test;
  if (cell.baseline && !raw_baseline) {
    // Projected sober-mean subtraction, evaluated as the fold's linear map
    // applied to raw differences from the sober mean.
    const FeatureMatrix centred = SubtractBaseline(test, true);
    const Eigen::ArrayXXd scaled =
        centred.values.array().rowwise() / z.transform.scale.transpose().array();
    scored.values = scaled.matrix() * p.transform.components;
  }

  if (options.dump_transforms) {
    result.transforms = {{"znorm", z.transform.ToJson()}, {"pca", p.transform.ToJson()}};
  }

  const std::vector<int> labels = Labels(p.train);
  std::vector<double> window_probs(static_cast<size_t>(scored.rows()));
  if (cell.classifier == ClassifierKind::kRandomForest) {
    ForestParams params = options.forest;
    params.seed = seed;
    const ForestModel model = TrainRandomForest(p.train.values, labels, params);
    for (Eigen::Index i = 0; i < scored.rows(); ++i) {
      window_probs[static_cast<size_t>(i)] = PredictProba(model, Row(scored.values, i));
    }
    if (options.dump_models) result.model = model.ToJson();
  } else {
    SvmParams params = options.svm;
    params.seed = seed;
    const SvmModel model = TrainLinearSvm(p.train.values, labels, params);
    for (Eigen::Index i = 0; i < scored.rows(); ++i) {
      window_probs[static_cast<size_t>(i)] = PredictProba(model, Row(scored.values, i));
    }
    if (options.dump_models) result.model = model.ToJson();
  }

  // Group windows by clip in order of first appearance.
  std::map<std::string, size_t> slot;
  std::vector<std::vector<double>> grouped;
  for (size_t i = 0; i < scored.index.size(); ++i) {
    const RowInfo &r = scored.index[i];
    if (cell.baseline && options.exclude_baseline_windows && r.label == kSober) continue;
    auto [it, inserted] = slot.emplace(r.clip_id, grouped.size());
    if (inserted) {
      grouped.emplace_back();
      result.clip_ids.push_back(r.clip_id);
      result.clip_labels.push_back(r.label);
    }
    grouped[it->second].push_back(window_probs[i]);
  }
  for (const auto &probs : grouped) {
    const double p_clip = AggregateClipMedian(probs);
    result.clip_probs.push_back(p_clip);
    result.clip_preds.push_back(PredictLabel(p_clip));
  }
  return result;
}

void FinalizeCell(CellResult &result, AccuracyMode mode) {
  std::vector<double> probs;
  std::vector<int> labels;
  std::vector<std::string> subjects;
  for (const auto &fold : result.folds) {
    if (fold.failed) continue;
    probs.insert(probs.end(), fold.clip_probs.begin(), fold.clip_probs.end());
    labels.insert(labels.end(), fold.clip_labels.begin(), fold.clip_labels.end());
    subjects.insert(subjects.end(), fold.clip_ids.size(), fold.held_out_subject);
  }
  result.has_metrics = !probs.empty();
  if (result.has_metrics) result.metrics = ComputeMetrics(probs, labels, subjects, mode);
}

namespace {

FoldResult GuardedFold(const GridCell &cell, const FeatureMatrix &matrix, const LosoFold &fold,
                       uint64_t seed, const HarnessOptions &options) {
  try {
    return RunFold(cell, matrix, fold, seed, options);
  } catch (const Error &e) {
    FoldResult failed;
    failed.held_out_subject = fold.held_out_subject;
    failed.failed = true;
    failed.error = e.what();
    return failed;
  }
}

}  // namespace

CellResult RunGridCell(const GridCell &cell, const FeatureMatrix &matrix, uint64_t global_seed,
                       const HarnessOptions &options) {
  CellResult result;
  result.cell = cell;
  result.seed = global_seed;
  const auto folds = LosoFolds(matrix);
  for (size_t f = 0; f < folds.size(); ++f) {
    result.folds.push_back(
        GuardedFold(cell, matrix, folds[f], FoldSeed(global_seed, cell, f), options));
  }
  FinalizeCell(result, options.accuracy);
  return result;
}

std::vector<CellResult> RunGrid(const std::vector<GridCell> &cells, const FeatureStore &store,
                                uint64_t global_seed, const HarnessOptions &options,
                                int workers) {
  std::vector<CellResult> results(cells.size());
  std::vector<std::vector<LosoFold>> folds(cells.size());
  std::vector<std::pair<size_t, size_t>> units;
  for (size_t c = 0; c < cells.size(); ++c) {
    results[c].cell = cells[c];
    results[c].seed = global_seed;
    folds[c] = LosoFolds(store.Get(cells[c].feature_set, cells[c].windowed));
    results[c].folds.resize(folds[c].size());
    for (size_t f = 0; f < folds[c].size(); ++f) units.emplace_back(c, f);
  }
  ParallelFor(units.size(), workers, [&](size_t u) {
    const auto [c, f] = units[u];
    const GridCell &cell = cells[c];
    results[c].folds[f] = GuardedFold(cell, store.Get(cell.feature_set, cell.windowed),
                                      folds[c][f], FoldSeed(global_seed, cell, f), options);
  });
  for (auto &r : results) FinalizeCell(r, options.accuracy);
  return results;
}

FeatureMatrix ShuffleLabelsWithinSubject(const FeatureMatrix &matrix, uint64_t seed) {
  // Clip order of first appearance per subject, with each clip's label.
  std::map<std::string, std::vector<std::string>> clips;
  std::map<std::string, int> clip_label;
  for (const auto &r : matrix.index) {
    if (clip_label.emplace(r.clip_id, r.label).second) clips[r.subject_id].push_back(r.clip_id);
  }
  std::map<std::string, int> new_label;
  uint64_t subject_index = 0;
  for (const auto &[subject, ids] : clips) {
    std::vector<int> labels;
    for (const auto &id : ids) labels.push_back(clip_label[id]);
    Rng rng(MixSeed(seed, subject_index++));
    rng.Shuffle(labels.begin(), labels.end());
    for (size_t i = 0; i < ids.size(); ++i) new_label[ids[i]] = labels[i];
  }
  FeatureMatrix out = matrix;
  for (auto &r : out.index) r.label = new_label[r.clip_id];
  return out;
}

}  // namespace drivestate
