// include/drivestate/pipeline.h

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

#ifndef DRIVESTATE_PIPELINE_H_
#define DRIVESTATE_PIPELINE_H_

#include <vector>

#include <Eigen/Dense>

#include "drivestate/audio.h"
#include "drivestate/feature_matrix.h"
#include "json.hpp"

namespace drivestate {

struct WindowParams {
  double length_s = 1.0;
  double hop_s = 0.5;
  // A trailing partial window shorter than this is merged into the
  // previous window instead of standing alone.
  double min_partial_s = 0.5;
};

// One entry per window; clip_id is kept from the parent clip and windows are
// numbered from 0 in time order.
struct ClipWindow {
  AudioClip clip;
  int window_index = 0;
  size_t start_sample = 0;
};

// windowed == false yields the clip itself. Otherwise full windows start at
// multiples of hop; the remainder after the last full window becomes a
// window starting at the next hop position (kept if >= min_partial_s, else
// appended to the previous window). Clips shorter than one window give a
// single window.
std::vector<ClipWindow> MakeWindows(const AudioClip &clip, bool windowed,
                                    const WindowParams &params = {});

// Window bounds only, in samples; MakeWindows is built on this.
std::vector<std::pair<size_t, size_t>> WindowBounds(size_t num_samples, int sample_rate_hz,
                                                    bool windowed,
                                                    const WindowParams &params = {});

struct ZNormTransform {
  Eigen::VectorXd mean;
  Eigen::VectorXd scale;  // population std, entries < 1e-12 replaced by 1

  Eigen::MatrixXd Apply(const Eigen::MatrixXd &x) const;
  nlohmann::json ToJson() const;
};

struct PcaTransform {
  Eigen::VectorXd mean;
  Eigen::MatrixXd components;  // D x k, orthonormal columns
  Eigen::VectorXd eigenvalues;  // all D covariance eigenvalues, descending
  int k = 0;

  Eigen::MatrixXd Apply(const Eigen::MatrixXd &x) const;
  nlohmann::json ToJson() const;
};

inline constexpr int kDefaultPcaCap = 50;

// Fitting reads only the training rows.
ZNormTransform FitZNorm(const Eigen::MatrixXd &train);
// k = min(cap, D, n - 1); eigen-decomposition of the sample covariance.
// Each component is signed so its largest-magnitude loading is positive.
PcaTransform FitPca(const Eigen::MatrixXd &train, int cap = kDefaultPcaCap);

template <typename Transform>
struct Fitted {
  FeatureMatrix train;
  FeatureMatrix test;
  Transform transform;
};

Fitted<ZNormTransform> FitApplyZNorm(const FeatureMatrix &train, const FeatureMatrix &test);
Fitted<PcaTransform> FitApplyPca(const FeatureMatrix &train, const FeatureMatrix &test,
                                 int cap = kDefaultPcaCap);

// For every subject in test, subtracts the mean of that subject's sober rows
// from all of its rows. Identity when disabled. Throws kNoSoberBaseline if
// enabled and a subject has no sober row.
FeatureMatrix SubtractBaseline(const FeatureMatrix &test, bool enabled);

}  // namespace drivestate

#endif  // DRIVESTATE_PIPELINE_H_
