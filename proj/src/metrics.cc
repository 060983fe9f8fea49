// src/metrics.cc

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

#include "drivestate/metrics.h"

#include <algorithm>
#include <numeric>
#include <vector>

#include "drivestate/error.h"

namespace drivestate {

double AggregateClipMedian(std::span<const double> window_probs) {
  if (window_probs.empty()) throw Error(ErrorCode::kEmptyClip, "clip has no windows");
  std::vector<double> v(window_probs.begin(), window_probs.end());
  const size_t n = v.size();
  const size_t mid = n / 2;
  std::nth_element(v.begin(), v.begin() + mid, v.end());
  const double upper = v[mid];
  if (n % 2 == 1) return upper;
  const double lower = *std::max_element(v.begin(), v.begin() + mid);
  return 0.5 * (lower + upper);
}

std::optional<double> MidrankAuc(std::span<const double> scores, std::span<const int> labels) {
  if (scores.size() != labels.size()) {
    throw Error(ErrorCode::kShapeError, "scores and labels differ in length");
  }
  const size_t n = scores.size();
  std::vector<size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](size_t a, size_t b) { return scores[a] < scores[b]; });

  // Ranks are doubled so midranks stay integral.
  long long pos_rank_sum2 = 0;
  long long n_pos = 0;
  size_t i = 0;
  while (i < n) {
    size_t j = i;
    while (j + 1 < n && scores[order[j + 1]] == scores[order[i]]) ++j;
    const long long rank2 = static_cast<long long>(i + 1) + static_cast<long long>(j + 1);
    for (size_t k = i; k <= j; ++k) {
      if (labels[order[k]]) {
        pos_rank_sum2 += rank2;
        ++n_pos;
      }
    }
    i = j + 1;
  }
  const long long n_neg = static_cast<long long>(n) - n_pos;
  if (n_pos == 0 || n_neg == 0) return std::nullopt;
  // U = R_pos - n_pos (n_pos + 1) / 2, doubled.
  const long long u2 = pos_rank_sum2 - n_pos * (n_pos + 1);
  return static_cast<double>(u2) / (2.0 * static_cast<double>(n_pos * n_neg));
}

MetricsReport ComputeMetrics(std::span<const double> probs, std::span<const int> labels,
                             std::span<const std::string> subjects, AccuracyMode mode) {
  if (probs.size() != labels.size() || probs.size() != subjects.size()) {
    throw Error(ErrorCode::kShapeError, "metric inputs differ in length");
  }
  if (probs.empty()) throw Error(ErrorCode::kShapeError, "no items to score");

  MetricsReport report;
  report.n = static_cast<int>(probs.size());
  std::map<std::string, std::pair<int, int>> per_subject;  // correct, total
  int correct = 0;
  for (size_t i = 0; i < probs.size(); ++i) {
    const int pred = PredictLabel(probs[i]);
    const bool ok = pred == labels[i];
    correct += ok;
    if (labels[i]) {
      ++(pred ? report.confusion.tp : report.confusion.fn);
    } else {
      ++(pred ? report.confusion.fp : report.confusion.tn);
    }
    auto &s = per_subject[subjects[i]];
    s.first += ok;
    s.second += 1;
  }
  double macro = 0.0;
  for (const auto &[subject, counts] : per_subject) {
    const double acc = static_cast<double>(counts.first) / counts.second;
    report.per_subject_accuracy[subject] = acc;
    macro += acc;
  }
  report.accuracy = mode == AccuracyMode::kPooled
                        ? static_cast<double>(correct) / static_cast<double>(probs.size())
                        : macro / static_cast<double>(per_subject.size());
  report.auc = MidrankAuc(probs, labels);
  return report;
}

}  // namespace drivestate
