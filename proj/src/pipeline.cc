// src/pipeline.cc

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

#include "drivestate/pipeline.h"

#include <algorithm>
#include <cmath>
#include <map>

#include "drivestate/error.h"
#include "drivestate/manifest.h"

namespace drivestate {

std::vector<std::pair<size_t, size_t>> WindowBounds(size_t num_samples, int sample_rate_hz,
                                                    bool windowed,
                                                    const WindowParams &params) {
  const auto win = static_cast<size_t>(std::llround(params.length_s * sample_rate_hz));
  const auto hop = static_cast<size_t>(std::llround(params.hop_s * sample_rate_hz));
  const auto min_partial =
      static_cast<size_t>(std::llround(params.min_partial_s * sample_rate_hz));
  if (!windowed || num_samples <= win || hop == 0) return {{0, num_samples}};

  std::vector<std::pair<size_t, size_t>> out;
  size_t start = 0;
  for (; start + win <= num_samples; start += hop) out.emplace_back(start, start + win);
  if (out.back().second < num_samples) {
    if (num_samples - start >= min_partial) {
      out.emplace_back(start, num_samples);
    } else {
      out.back().second = num_samples;
    }
  }
  return out;
}

std::vector<ClipWindow> MakeWindows(const AudioClip &clip, bool windowed,
                                    const WindowParams &params) {
  std::vector<ClipWindow> out;
  const auto bounds =
      WindowBounds(clip.samples.size(), clip.sample_rate_hz, windowed, params);
  for (size_t i = 0; i < bounds.size(); ++i) {
    ClipWindow w;
    w.window_index = static_cast<int>(i);
    w.start_sample = bounds[i].first;
    w.clip.clip_id = clip.clip_id;
    w.clip.sample_rate_hz = clip.sample_rate_hz;
    w.clip.samples.assign(clip.samples.begin() + static_cast<long>(bounds[i].first),
                          clip.samples.begin() + static_cast<long>(bounds[i].second));
    out.push_back(std::move(w));
  }
  return out;
}

Eigen::MatrixXd ZNormTransform::Apply(const Eigen::MatrixXd &x) const {
  return (x.rowwise() - mean.transpose()).array().rowwise() / scale.transpose().array();
}

nlohmann::json ZNormTransform::ToJson() const {
  return {{"kind", "znorm"},
          {"mean", std::vector<double>(mean.begin(), mean.end())},
          {"scale", std::vector<double>(scale.begin(), scale.end())}};
}

Eigen::MatrixXd PcaTransform::Apply(const Eigen::MatrixXd &x) const {
  return (x.rowwise() - mean.transpose()) * components;
}

nlohmann::json PcaTransform::ToJson() const {
  return {{"kind", "pca"},
          {"k", k},
          {"mean", std::vector<double>(mean.begin(), mean.end())},
          {"eigenvalues", std::vector<double>(eigenvalues.begin(), eigenvalues.end())}};
}

ZNormTransform FitZNorm(const Eigen::MatrixXd &train) {
  if (train.rows() == 0) throw Error(ErrorCode::kEmptyTrain, "z-normalization needs rows");
  ZNormTransform t;
  t.mean = train.colwise().mean().transpose();
  const Eigen::MatrixXd centered = train.rowwise() - t.mean.transpose();
  t.scale = (centered.array().square().colwise().sum() / static_cast<double>(train.rows()))
                .sqrt()
                .transpose();
  for (double &s : t.scale) {
    if (s < 1e-12) s = 1.0;
  }
  return t;
}

PcaTransform FitPca(const Eigen::MatrixXd &train, int cap) {
  const Eigen::Index n = train.rows();
  const Eigen::Index d = train.cols();
  if (n < 2) throw Error(ErrorCode::kTooFewRows, "PCA needs at least two rows");
  PcaTransform t;
  t.mean = train.colwise().mean().transpose();
  const Eigen::MatrixXd centered = train.rowwise() - t.mean.transpose();
  const Eigen::MatrixXd cov = (centered.transpose() * centered) / static_cast<double>(n - 1);

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(cov);
  if (solver.info() != Eigen::Success) {
    throw Error(ErrorCode::kShapeError, "covariance eigen-decomposition failed");
  }
  // Eigen returns ascending order.
  const Eigen::VectorXd values = solver.eigenvalues().reverse();
  const Eigen::MatrixXd vectors = solver.eigenvectors().rowwise().reverse();

  t.k = static_cast<int>(std::min<Eigen::Index>({static_cast<Eigen::Index>(cap), d, n - 1}));
  t.eigenvalues = values;
  t.components = vectors.leftCols(t.k);
  for (int c = 0; c < t.k; ++c) {
    Eigen::Index arg = 0;
    t.components.col(c).cwiseAbs().maxCoeff(&arg);
    if (t.components(arg, c) < 0.0) t.components.col(c) *= -1.0;
  }
  return t;
}

Fitted<ZNormTransform> FitApplyZNorm(const FeatureMatrix &train, const FeatureMatrix &test) {
  Fitted<ZNormTransform> out;
  out.transform = FitZNorm(train.values);
  out.train = train;
  out.train.values = out.transform.Apply(train.values);
  out.test = test;
  if (test.rows() > 0) out.test.values = out.transform.Apply(test.values);
  return out;
}

Fitted<PcaTransform> FitApplyPca(const FeatureMatrix &train, const FeatureMatrix &test,
                                 int cap) {
  Fitted<PcaTransform> out;
  out.transform = FitPca(train.values, cap);
  std::vector<std::string> names;
  for (int c = 0; c < out.transform.k; ++c) names.push_back("pc_" + std::to_string(c));
  out.train.index = train.index;
  out.train.names = names;
  out.train.values = out.transform.Apply(train.values);
  out.test.index = test.index;
  out.test.names = names;
  out.test.values = test.rows() > 0 ? out.transform.Apply(test.values)
                                    : Eigen::MatrixXd(0, out.transform.k);
  return out;
}

FeatureMatrix SubtractBaseline(const FeatureMatrix &test, bool enabled) {
  if (!enabled) return test;
  std::map<std::string, std::vector<Eigen::Index>> sober_rows;
  std::map<std::string, bool> seen;
  for (size_t i = 0; i < test.index.size(); ++i) {
    seen[test.index[i].subject_id] = true;
    if (test.index[i].label == kSober) {
      sober_rows[test.index[i].subject_id].push_back(static_cast<Eigen::Index>(i));
    }
  }
  std::map<std::string, Eigen::RowVectorXd> baseline;
  for (const auto &[subject, unused] : seen) {
    auto it = sober_rows.find(subject);
    if (it == sober_rows.end()) {
      throw Error(ErrorCode::kNoSoberBaseline, "subject '" + subject + "' has no sober rows");
    }
    Eigen::RowVectorXd sum = Eigen::RowVectorXd::Zero(test.cols());
    for (Eigen::Index r : it->second) sum += test.values.row(r);
    baseline[subject] = sum / static_cast<double>(it->second.size());
  }
  FeatureMatrix out = test;
  for (size_t i = 0; i < test.index.size(); ++i) {
    out.values.row(static_cast<Eigen::Index>(i)) -= baseline[test.index[i].subject_id];
  }
  return out;
}

}  // namespace drivestate
