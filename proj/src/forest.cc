// src/forest.cc

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

#include "drivestate/forest.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <thread>

#include "drivestate/error.h"
#include "drivestate/rng.h"

namespace drivestate {
namespace {

// Weighted child impurity n_l*gini_l + n_r*gini_r, kept as an exact fraction
// num / den so equal splits compare equal.
struct SplitCost {
  int64_t num;
  int64_t den;

  bool operator<(const SplitCost &o) const { return num * o.den < o.num * den; }
  bool operator==(const SplitCost &o) const { return num * o.den == o.num * den; }
};

SplitCost ChildCost(int64_t n_left, int64_t pos_left, int64_t n_right, int64_t pos_right) {
  // 2 p q / n per child, over a common denominator.
  const int64_t a = pos_left * (n_left - pos_left);
  const int64_t b = pos_right * (n_right - pos_right);
  return {2 * (a * n_right + b * n_left), n_left * n_right};
}

struct PendingNode {
  int node;
  std::vector<int> rows;
};

}  // namespace

double DecisionTree::Predict(std::span<const double> x) const {
  int i = 0;
  while (nodes[i].feature >= 0) {
    i = x[nodes[i].feature] <= nodes[i].threshold ? nodes[i].left : nodes[i].right;
  }
  return nodes[i].fraction;
}

int DecisionTree::Depth() const {
  std::vector<int> depth(nodes.size(), 0);
  int best = 0;
  for (size_t i = 0; i < nodes.size(); ++i) {
    best = std::max(best, depth[i]);
    if (nodes[i].feature >= 0) {
      depth[nodes[i].left] = depth[i] + 1;
      depth[nodes[i].right] = depth[i] + 1;
    }
  }
  return best;
}

int ResolveMaxFeatures(int requested, int n_features) {
  if (requested > 0) return std::min(requested, n_features);
  return std::max(1, static_cast<int>(std::floor(std::sqrt(static_cast<double>(n_features)))));
}

DecisionTree GrowTree(const Eigen::MatrixXd &x, std::span<const int> labels,
                      std::vector<int> rows, int max_features, int min_leaf,
                      uint64_t seed) {
  Rng rng(seed);
  const int d = static_cast<int>(x.cols());
  DecisionTree tree;
  tree.nodes.emplace_back();
  std::vector<PendingNode> stack;
  stack.push_back({0, std::move(rows)});

  std::vector<int> features(d);
  std::vector<std::pair<double, int>> column;

  while (!stack.empty()) {
    PendingNode job = std::move(stack.back());
    stack.pop_back();
    const int64_t n = static_cast<int64_t>(job.rows.size());
    int64_t pos = 0;
    for (int r : job.rows) pos += labels[r];
    tree.nodes[job.node].fraction = n ? static_cast<double>(pos) / n : 0.0;
    if (pos == 0 || pos == n || n < 2 * min_leaf) continue;

    std::iota(features.begin(), features.end(), 0);
    rng.Shuffle(features.begin(), features.end());

    bool found = false;
    int best_feature = -1;
    double best_threshold = 0.0;
    SplitCost best_cost{0, 1};
    int evaluated = 0;
    for (int f : features) {
      // Keep drawing past max_features only while nothing splittable is found.
      if (evaluated >= max_features && found) break;
      ++evaluated;
      column.clear();
      for (int r : job.rows) column.emplace_back(x(r, f), labels[r]);
      std::sort(column.begin(), column.end());
      if (column.front().first == column.back().first) continue;

      int64_t pos_left = 0;
      for (int64_t i = 1; i < n; ++i) {
        pos_left += column[i - 1].second;
        const double lo = column[i - 1].first, hi = column[i].first;
        if (lo == hi) continue;
        if (i < min_leaf || n - i < min_leaf) continue;
        const SplitCost cost = ChildCost(i, pos_left, n - i, pos - pos_left);
        double threshold = lo + (hi - lo) / 2.0;
        if (!(threshold < hi)) threshold = lo;
        bool better = !found || cost < best_cost;
        if (found && cost == best_cost) {
          better = f < best_feature || (f == best_feature && threshold < best_threshold);
        }
        if (better) {
          found = true;
          best_cost = cost;
          best_feature = f;
          best_threshold = threshold;
        }
      }
    }
    if (!found) continue;

    std::vector<int> left, right;
    for (int r : job.rows) (x(r, best_feature) <= best_threshold ? left : right).push_back(r);
    const int left_id = static_cast<int>(tree.nodes.size());
    tree.nodes.emplace_back();
    tree.nodes.emplace_back();
    TreeNode &node = tree.nodes[job.node];
    node.feature = best_feature;
    node.threshold = best_threshold;
    node.left = left_id;
    node.right = left_id + 1;
    stack.push_back({left_id + 1, std::move(right)});
    stack.push_back({left_id, std::move(left)});
  }
  return tree;
}

ForestModel TrainRandomForest(const Eigen::MatrixXd &x, std::span<const int> labels,
                              const ForestParams &params, int threads) {
  const int n = static_cast<int>(x.rows());
  if (n == 0) throw Error(ErrorCode::kEmptyTrain, "random forest needs rows");
  if (static_cast<size_t>(n) != labels.size()) {
    throw Error(ErrorCode::kShapeError, "label count does not match rows");
  }
  ForestModel model;
  model.params = params;
  model.n_features = static_cast<int>(x.cols());
  model.trees.resize(params.n_trees);
  const int max_features = ResolveMaxFeatures(params.max_features, model.n_features);

  auto grow = [&](int i) {
    const uint64_t tree_seed = params.seed ^ static_cast<uint64_t>(i);
    Rng rng(MixSeed(tree_seed));
    std::vector<int> rows(n);
    for (int &r : rows) r = static_cast<int>(rng.Below(n));
    model.trees[i] = GrowTree(x, labels, std::move(rows), max_features, params.min_leaf,
                              MixSeed(tree_seed, 1));
  };

  threads = std::clamp(threads, 1, std::max(1, params.n_trees));
  if (threads == 1) {
    for (int i = 0; i < params.n_trees; ++i) grow(i);
  } else {
    std::vector<std::thread> pool;
    for (int w = 0; w < threads; ++w) {
      pool.emplace_back([&, w] {
        for (int i = w; i < params.n_trees; i += threads) grow(i);
      });
    }
    for (auto &t : pool) t.join();
  }
  return model;
}

double PredictProba(const ForestModel &model, std::span<const double> x) {
  if (static_cast<int>(x.size()) != model.n_features) {
    throw Error(ErrorCode::kDimMismatch, "expected " + std::to_string(model.n_features) +
                                             " features, got " + std::to_string(x.size()));
  }
  if (model.trees.empty()) return 0.0;
  double sum = 0.0;
  for (const auto &tree : model.trees) sum += tree.Predict(x);
  return sum / static_cast<double>(model.trees.size());
}

nlohmann::json ForestModel::ToJson() const {
  nlohmann::json trees_json = nlohmann::json::array();
  for (const auto &tree : trees) {
    nlohmann::json nodes = nlohmann::json::array();
    for (const auto &node : tree.nodes) {
      if (node.feature < 0) {
        nodes.push_back({{"leaf", node.fraction}});
      } else {
        nodes.push_back({{"feature", node.feature},
                         {"threshold", node.threshold},
                         {"left", node.left},
                         {"right", node.right}});
      }
    }
    trees_json.push_back(std::move(nodes));
  }
  return {{"kind", "random_forest"},
          {"n_features", n_features},
          {"n_trees", params.n_trees},
          {"max_features", ResolveMaxFeatures(params.max_features, n_features)},
          {"min_leaf", params.min_leaf},
          {"seed", params.seed},
          {"trees", std::move(trees_json)}};
}

}  // namespace drivestate
