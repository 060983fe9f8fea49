// include/drivestate/metrics.h

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

#ifndef DRIVESTATE_METRICS_H_
#define DRIVESTATE_METRICS_H_

#include <map>
#include <optional>
#include <span>
#include <string>

namespace drivestate {

// Median of window probabilities; even counts average the two middle values.
// Throws kEmptyClip on an empty list.
double AggregateClipMedian(std::span<const double> window_probs);

// Mann-Whitney statistic with midranks for ties. nullopt unless both classes
// are present.
std::optional<double> MidrankAuc(std::span<const double> scores, std::span<const int> labels);

inline constexpr double kDecisionThreshold = 0.5;

inline int PredictLabel(double prob) { return prob >= kDecisionThreshold ? 1 : 0; }

enum class AccuracyMode { kPooled, kMacro };

struct Confusion {
  int tn = 0;
  int fp = 0;
  int fn = 0;
  int tp = 0;
};

struct MetricsReport {
  double accuracy = 0.0;
  std::optional<double> auc;
  Confusion confusion;
  std::map<std::string, double> per_subject_accuracy;
  int n = 0;
};

// kPooled: accuracy over all items. kMacro: mean of per-subject accuracies.
// Throws kShapeError on length mismatch or empty input.
MetricsReport ComputeMetrics(std::span<const double> probs, std::span<const int> labels,
                             std::span<const std::string> subjects,
                             AccuracyMode mode = AccuracyMode::kPooled);

}  // namespace drivestate

#endif  // DRIVESTATE_METRICS_H_
