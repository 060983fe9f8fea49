// include/drivestate/svm.h

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

#ifndef DRIVESTATE_SVM_H_
#define DRIVESTATE_SVM_H_

#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "json.hpp"

namespace drivestate {

struct SvmParams {
  double c = 1.0;
  int epochs = 5000;
  uint64_t seed = 0;
};

struct SvmModel {
  Eigen::VectorXd weights;
  double bias = 0.0;
  double c = 1.0;
  // Logistic calibration of the margin: p = sigmoid(cal_a * margin + cal_b).
  double cal_a = 1.0;
  double cal_b = 0.0;

  double Margin(std::span<const double> x) const;
  nlohmann::json ToJson() const;
};

// (1/2)(|w|^2 + b^2) + C * sum_i max(0, 1 - y_i (w.x_i + b)), y in {-1, +1}.
// The bias is carried as an extra unit feature and is regularized with w.
double SvmObjective(const Eigen::VectorXd &w, double b, const Eigen::MatrixXd &x,
                    std::span<const int> labels, double c);

// Full-batch subgradient descent with step 1/(lambda (t + 1)),
// lambda = 1/(C n), and projection onto the ball |w| <= 1/sqrt(lambda).
// The best iterate seen is returned, so the objective trace (one entry per
// epoch, optional) is non-increasing. Rows are visited in one seeded order.
// Platt-style calibration is then fit on the training margins.
// Throws kSingleClass unless both labels are present.
SvmModel TrainLinearSvm(const Eigen::MatrixXd &x, std::span<const int> labels,
                        const SvmParams &params,
                        std::vector<double> *objective_trace = nullptr);

// Fits p = sigmoid(a m + b) to 0/1 labels with Platt's smoothed targets by
// Newton's method (25 iterations, backtracking). a is forced positive.
std::pair<double, double> FitLogisticCalibration(std::span<const double> margins,
                                                 std::span<const int> labels);

double Sigmoid(double z);

// sigmoid(cal_a * margin + cal_b); throws kDimMismatch.
double PredictProba(const SvmModel &model, std::span<const double> x);

}  // namespace drivestate

#endif  // DRIVESTATE_SVM_H_
