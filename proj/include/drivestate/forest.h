// include/drivestate/forest.h

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

#ifndef DRIVESTATE_FOREST_H_
#define DRIVESTATE_FOREST_H_

#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "json.hpp"

namespace drivestate {

struct ForestParams {
  int n_trees = 200;
  int max_features = 0;  // 0 selects floor(sqrt(D)), at least 1
  int min_leaf = 1;
  uint64_t seed = 0;
};

// Internal nodes send x[feature] <= threshold left. Leaves hold the class-1
// fraction of the bootstrap rows that reached them.
struct TreeNode {
  int feature = -1;  // -1 marks a leaf
  double threshold = 0.0;
  int left = -1;
  int right = -1;
  double fraction = 0.0;
};

struct DecisionTree {
  std::vector<TreeNode> nodes;  // nodes[0] is the root

  double Predict(std::span<const double> x) const;
  int Depth() const;
};

struct ForestModel {
  std::vector<DecisionTree> trees;
  int n_features = 0;
  ForestParams params;

  nlohmann::json ToJson() const;
};

int ResolveMaxFeatures(int requested, int n_features);

// Grows one CART tree (Gini) on the given rows, which may repeat.
DecisionTree GrowTree(const Eigen::MatrixXd &x, std::span<const int> labels,
                      std::vector<int> rows, int max_features, int min_leaf,
                      uint64_t seed);

// Bootstrap + CART per tree. Tree i uses seed ^ i, so the model does not
// depend on the number of threads.
ForestModel TrainRandomForest(const Eigen::MatrixXd &x, std::span<const int> labels,
                              const ForestParams &params, int threads = 1);

// Mean over trees of the leaf class-1 fraction; throws kDimMismatch.
double PredictProba(const ForestModel &model, std::span<const double> x);

}  // namespace drivestate

#endif  // DRIVESTATE_FOREST_H_
