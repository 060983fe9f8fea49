// src/svm.cc

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

#include "drivestate/svm.h"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "drivestate/error.h"
#include "drivestate/rng.h"

namespace drivestate {

double Sigmoid(double z) {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

double SvmModel::Margin(std::span<const double> x) const {
  double m = bias;
  for (Eigen::Index i = 0; i < weights.size(); ++i) m += weights[i] * x[i];
  return m;
}

nlohmann::json SvmModel::ToJson() const {
  return {{"kind", "linear_svm"},
          {"weights", std::vector<double>(weights.begin(), weights.end())},
          {"bias", bias},
          {"C", c},
          {"calibration", {cal_a, cal_b}}};
}

double SvmObjective(const Eigen::VectorXd &w, double b, const Eigen::MatrixXd &x,
                    std::span<const int> labels, double c) {
  double hinge = 0.0;
  const Eigen::VectorXd margins = x * w;
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    const double y = labels[i] ? 1.0 : -1.0;
    hinge += std::max(0.0, 1.0 - y * (margins[i] + b));
  }
  return 0.5 * (w.squaredNorm() + b * b) + c * hinge;
}

std::pair<double, double> FitLogisticCalibration(std::span<const double> margins,
                                                 std::span<const int> labels) {
  const size_t n = margins.size();
  double n_pos = 0.0;
  for (int l : labels) n_pos += l;
  const double n_neg = static_cast<double>(n) - n_pos;
  const double hi = (n_pos + 1.0) / (n_pos + 2.0);
  const double lo = 1.0 / (n_neg + 2.0);

  auto loss = [&](double a, double b) {
    double total = 0.0;
    for (size_t i = 0; i < n; ++i) {
      const double z = a * margins[i] + b;
      const double t = labels[i] ? hi : lo;
      // -[t log s(z) + (1 - t) log(1 - s(z))], computed stably.
      const double log1pexp = z > 0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z));
      total += log1pexp - t * z;
    }
    return total;
  };

  double a = 0.0;
  double b = std::log((n_pos + 1.0) / (n_neg + 1.0));
  double current = loss(a, b);
  for (int iter = 0; iter < 25; ++iter) {
    double ga = 0.0, gb = 0.0, haa = 0.0, hab = 0.0, hbb = 0.0;
    for (size_t i = 0; i < n; ++i) {
      const double p = Sigmoid(a * margins[i] + b);
      const double t = labels[i] ? hi : lo;
      const double r = p - t;
      const double w = std::max(p * (1.0 - p), 1e-12);
      ga += r * margins[i];
      gb += r;
      haa += w * margins[i] * margins[i];
      hab += w * margins[i];
      hbb += w;
    }
    haa += 1e-12;
    hbb += 1e-12;
    const double det = haa * hbb - hab * hab;
    if (!(det > 0.0)) break;
    const double da = -(hbb * ga - hab * gb) / det;
    const double db = -(haa * gb - hab * ga) / det;
    double step = 1.0;
    bool moved = false;
    while (step > 1e-10) {
      const double next = loss(a + step * da, b + step * db);
      if (next < current) {
        a += step * da;
        b += step * db;
        current = next;
        moved = true;
        break;
      }
      step *= 0.5;
    }
    if (!moved || std::abs(ga) + std::abs(gb) < 1e-10) break;
  }
  // Probabilities must stay increasing in the margin.
  if (!(a > 0.0) || !std::isfinite(a) || !std::isfinite(b)) {
    a = 1.0;
    b = 0.0;
  }
  return {a, b};
}

SvmModel TrainLinearSvm(const Eigen::MatrixXd &x, std::span<const int> labels,
                        const SvmParams &params, std::vector<double> *objective_trace) {
  const Eigen::Index n = x.rows();
  const Eigen::Index d = x.cols();
  if (static_cast<size_t>(n) != labels.size()) {
    throw Error(ErrorCode::kShapeError, "label count does not match rows");
  }
  const int positives = std::accumulate(labels.begin(), labels.end(), 0);
  if (positives == 0 || positives == n) {
    throw Error(ErrorCode::kSingleClass, "linear SVM needs both classes");
  }

  std::vector<Eigen::Index> order(n);
  std::iota(order.begin(), order.end(), 0);
  Rng rng(params.seed);
  rng.Shuffle(order.begin(), order.end());

  const double lambda = 1.0 / (params.c * static_cast<double>(n));
  const double radius = 1.0 / std::sqrt(lambda);
  // Rows in the seeded order; sums run in this order.
  Eigen::MatrixXd xs(n, d);
  Eigen::VectorXd ys(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    xs.row(i) = x.row(order[i]);
    ys[i] = labels[order[i]] ? 1.0 : -1.0;
  }
  auto objective_at = [&](const Eigen::VectorXd &margins, const Eigen::VectorXd &wa) {
    const double hinge = (1.0 - ys.cwiseProduct(margins).array()).max(0.0).sum();
    return 0.5 * wa.squaredNorm() + params.c * hinge;
  };

  // Augmented weight vector: last entry is the bias.
  Eigen::VectorXd w = Eigen::VectorXd::Zero(d + 1);
  Eigen::VectorXd margins = Eigen::VectorXd::Zero(n);
  Eigen::VectorXd best = w;
  double best_objective = objective_at(margins, w);
  Eigen::VectorXd active(n);
  Eigen::VectorXd grad(d + 1);

  if (objective_trace) objective_trace->clear();
  for (int t = 0; t < params.epochs; ++t) {
    for (Eigen::Index i = 0; i < n; ++i) {
      active[i] = ys[i] * margins[i] < 1.0 ? ys[i] : 0.0;
    }
    grad.head(d) = lambda * w.head(d) - xs.transpose() * active / static_cast<double>(n);
    grad[d] = lambda * w[d] - active.sum() / static_cast<double>(n);
    w -= grad / (lambda * (t + 1.0));
    const double norm = w.norm();
    if (norm > radius) w *= radius / norm;
    margins = xs * w.head(d);
    margins.array() += w[d];
    const double objective = objective_at(margins, w);
    if (objective < best_objective) {
      best_objective = objective;
      best = w;
    }
    if (objective_trace) objective_trace->push_back(best_objective);
  }

  SvmModel model;
  model.c = params.c;
  model.weights = best.head(d);
  model.bias = best[d];
  std::vector<double> train_margins(n);
  for (Eigen::Index i = 0; i < n; ++i) train_margins[i] = x.row(i).dot(model.weights) + model.bias;
  std::tie(model.cal_a, model.cal_b) = FitLogisticCalibration(train_margins, labels);
  return model;
}

double PredictProba(const SvmModel &model, std::span<const double> x) {
  if (static_cast<Eigen::Index>(x.size()) != model.weights.size()) {
    throw Error(ErrorCode::kDimMismatch, "expected " + std::to_string(model.weights.size()) +
                                             " features, got " + std::to_string(x.size()));
  }
  return Sigmoid(model.cal_a * model.Margin(x) + model.cal_b);
}

}  // namespace drivestate
