// tests/test_models.cc

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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <set>
#include <vector>

#include <Eigen/Dense>

#include "drivestate/error.h"
#include "drivestate/forest.h"
#include "drivestate/metrics.h"
#include "drivestate/rng.h"
#include "drivestate/svm.h"
#include "oracles/oracles.h"

using namespace drivestate;

namespace {

ErrorCode CodeOf(auto &&fn) {
  try {
    fn();
  } catch (const Error &e) {
    return e.code();
  }
  FAIL("expected drivestate::Error");
  return ErrorCode::kIo;
}

std::span<const double> Row(const Eigen::MatrixXd &x, Eigen::Index i, std::vector<double> &buf) {
  buf.assign(static_cast<size_t>(x.cols()), 0.0);
  for (Eigen::Index j = 0; j < x.cols(); ++j) buf[j] = x(i, j);
  return buf;
}

// Two Gaussian blobs, label 1 shifted by `shift` along every axis.
void Blobs(int n, int d, double shift, double sd, Rng &rng, Eigen::MatrixXd &x,
           std::vector<int> &y) {
  x.resize(n, d);
  y.assign(n, 0);
  for (int i = 0; i < n; ++i) {
    y[i] = i % 2;
    for (int j = 0; j < d; ++j) x(i, j) = rng.Normal(y[i] ? shift : 0.0, sd);
  }
}

oracle::Matrix ToRows(const Eigen::MatrixXd &x) {
  oracle::Matrix out(static_cast<size_t>(x.rows()), std::vector<double>(x.cols()));
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    for (Eigen::Index j = 0; j < x.cols(); ++j) out[i][j] = x(i, j);
  }
  return out;
}

}  // namespace

TEST_SUITE("random forest") {
  TEST_CASE("single-class training sets") {
    Rng rng(1);
    Eigen::MatrixXd x(10, 3);
    for (int i = 0; i < 10; ++i) {
      for (int j = 0; j < 3; ++j) x(i, j) = rng.Normal();
    }
    std::vector<double> buf;
    for (int label : {0, 1}) {
      const std::vector<int> y(10, label);
      const ForestModel m = TrainRandomForest(x, y, {.n_trees = 16, .seed = 3});
      for (const auto &tree : m.trees) {
        for (const auto &node : tree.nodes) {
          if (node.feature < 0) CHECK(node.fraction == static_cast<double>(label));
        }
      }
      for (int i = 0; i < 10; ++i) CHECK(PredictProba(m, Row(x, i, buf)) == label);
      const std::vector<double> probe = {100.0, -100.0, 0.5};
      CHECK(PredictProba(m, probe) == label);
    }
  }

  TEST_CASE("xor is learned") {
    Eigen::MatrixXd x(4, 2);
    x << 0, 0, 0, 1, 1, 0, 1, 1;
    const std::vector<int> y = {0, 1, 1, 0};
    const ForestModel m = TrainRandomForest(x, y, {.n_trees = 64, .max_features = 2, .seed = 5});
    std::vector<double> buf;
    for (int i = 0; i < 4; ++i) CHECK(PredictLabel(PredictProba(m, Row(x, i, buf))) == y[i]);
  }

  TEST_CASE("root threshold sits at the class boundary") {
    Eigen::MatrixXd x(4, 1);
    x << 0, 1, 2, 3;
    const std::vector<int> y = {0, 0, 1, 1};
    const DecisionTree tree = GrowTree(x, y, {0, 1, 2, 3}, 1, 1, 7);
    REQUIRE(tree.nodes[0].feature == 0);
    CHECK(tree.nodes[0].threshold > 1.0);
    CHECK(tree.nodes[0].threshold < 2.0);
    CHECK(tree.Depth() == 1);
  }

  TEST_CASE("thresholds are midpoints of observed values") {
    Rng rng(2);
    Eigen::MatrixXd x;
    std::vector<int> y;
    Blobs(60, 4, 1.0, 1.0, rng, x, y);
    const ForestModel m = TrainRandomForest(x, y, {.n_trees = 10, .seed = 9});
    for (const auto &tree : m.trees) {
      for (const auto &node : tree.nodes) {
        if (node.feature < 0) {
          CHECK(node.fraction >= 0.0);
          CHECK(node.fraction <= 1.0);
          continue;
        }
        std::set<double> values;
        for (int i = 0; i < x.rows(); ++i) values.insert(x(i, node.feature));
        auto hi = values.upper_bound(node.threshold);
        REQUIRE(hi != values.end());
        REQUIRE(hi != values.begin());
        const double lo = *std::prev(hi);
        CHECK(lo < node.threshold);
        CHECK(node.threshold < *hi);
      }
    }
  }

  TEST_CASE("probabilities average the trees") {
    Rng rng(3);
    Eigen::MatrixXd x;
    std::vector<int> y;
    Blobs(40, 3, 0.8, 1.0, rng, x, y);
    const ForestModel m = TrainRandomForest(x, y, {.n_trees = 25, .seed = 1});
    ForestModel doubled = m;
    doubled.trees.insert(doubled.trees.end(), m.trees.begin(), m.trees.end());
    ForestModel single = m;
    single.trees.resize(1);
    std::vector<double> buf;
    for (int i = 0; i < 40; ++i) {
      const auto row = Row(x, i, buf);
      double mean = 0.0;
      for (const auto &t : m.trees) mean += t.Predict(row);
      mean /= 25.0;
      const double p = PredictProba(m, row);
      CHECK(std::abs(p - mean) < 1e-12);
      CHECK(std::abs(PredictProba(doubled, row) - p) < 1e-12);
      CHECK(PredictProba(single, row) == m.trees[0].Predict(row));
    }

    ForestModel pair;
    pair.n_features = 1;
    pair.trees.resize(2);
    pair.trees[0].nodes = {{-1, 0.0, -1, -1, 0.0}};
    pair.trees[1].nodes = {{-1, 0.0, -1, -1, 1.0}};
    CHECK(PredictProba(pair, std::vector<double>{0.3}) == 0.5);
  }

  TEST_CASE("errors") {
    CHECK(CodeOf([] { TrainRandomForest(Eigen::MatrixXd(0, 2), std::vector<int>{}, {}); }) ==
          ErrorCode::kEmptyTrain);
    Eigen::MatrixXd x(2, 2);
    x << 0, 1, 2, 3;
    const ForestModel m = TrainRandomForest(x, std::vector<int>{0, 1}, {.n_trees = 2});
    CHECK(CodeOf([&] { PredictProba(m, std::vector<double>{1.0}); }) == ErrorCode::kDimMismatch);
  }

  TEST_CASE("deterministic across runs and thread counts") {
    Rng rng(4);
    Eigen::MatrixXd x;
    std::vector<int> y;
    Blobs(80, 6, 0.5, 1.0, rng, x, y);
    const ForestParams params{.n_trees = 40, .seed = 77};
    const std::string ref = TrainRandomForest(x, y, params, 1).ToJson().dump();
    CHECK(TrainRandomForest(x, y, params, 1).ToJson().dump() == ref);
    CHECK(TrainRandomForest(x, y, params, 4).ToJson().dump() == ref);
    CHECK(TrainRandomForest(x, y, params, 7).ToJson().dump() == ref);
    CHECK(TrainRandomForest(x, y, {.n_trees = 40, .seed = 78}).ToJson().dump() != ref);
  }

  TEST_CASE("feature sampling rule") {
    CHECK(ResolveMaxFeatures(0, 94) == 9);
    CHECK(ResolveMaxFeatures(0, 1) == 1);
    CHECK(ResolveMaxFeatures(0, 50) == 7);
    CHECK(ResolveMaxFeatures(3, 50) == 3);
  }
}

TEST_SUITE("linear svm") {
  TEST_CASE("symmetric pair") {
    Eigen::MatrixXd x(2, 1);
    x << -1, 1;
    const std::vector<int> y = {0, 1};
    const SvmModel m = TrainLinearSvm(x, y, {});
    CHECK(m.Margin(std::vector<double>{-1.0}) < 0.0);
    CHECK(m.Margin(std::vector<double>{1.0}) > 0.0);
    CHECK(std::abs(m.bias) <= 0.5);
    CHECK(m.cal_a > 0.0);
  }

  TEST_CASE("separable blobs are fit exactly") {
    Rng rng(5);
    Eigen::MatrixXd x;
    std::vector<int> y;
    Blobs(40, 2, 6.0, 0.5, rng, x, y);
    const SvmModel m = TrainLinearSvm(x, y, {.seed = 2});
    std::vector<double> buf;
    for (int i = 0; i < 40; ++i) CHECK((m.Margin(Row(x, i, buf)) > 0.0) == (y[i] == 1));
  }

  TEST_CASE("duplicated rows with half the weight") {
    Rng rng(6);
    Eigen::MatrixXd x;
    std::vector<int> y;
    Blobs(20, 3, 1.0, 1.0, rng, x, y);
    Eigen::MatrixXd xx(40, 3);
    xx << x, x;
    std::vector<int> yy = y;
    yy.insert(yy.end(), y.begin(), y.end());
    const SvmModel a = TrainLinearSvm(x, y, {.c = 1.0, .seed = 3});
    const SvmModel b = TrainLinearSvm(xx, yy, {.c = 0.5, .seed = 3});
    CHECK((a.weights - b.weights).cwiseAbs().maxCoeff() <= 1e-6);
    CHECK(std::abs(a.bias - b.bias) <= 1e-6);
  }

  TEST_CASE("objective trace and the dual optimum") {
    Rng rng(7);
    for (int trial = 0; trial < 10; ++trial) {
      Eigen::MatrixXd x;
      std::vector<int> y;
      Blobs(20, 2, 1.2, 1.0, rng, x, y);
      std::vector<double> trace;
      const SvmModel m = TrainLinearSvm(x, y, {.seed = static_cast<uint64_t>(trial)}, &trace);
      REQUIRE(!trace.empty());
      for (size_t t = 1; t < trace.size(); ++t) CHECK(trace[t] <= trace[t - 1]);
      const double mine = SvmObjective(m.weights, m.bias, x, y, 1.0);
      CHECK(std::abs(mine - trace.back()) <= 1e-12 * mine);
      const double best = oracle::SvmOptimum(ToRows(x), y, 1.0);
      CHECK(mine <= 1.02 * best);
      CHECK(mine >= best - 1e-9);
    }
  }

  TEST_CASE("errors") {
    Eigen::MatrixXd x(3, 2);
    x << 0, 1, 2, 3, 4, 5;
    CHECK(CodeOf([&] { TrainLinearSvm(x, std::vector<int>{1, 1, 1}, {}); }) ==
          ErrorCode::kSingleClass);
    const SvmModel m = TrainLinearSvm(x, std::vector<int>{0, 1, 1}, {});
    CHECK(CodeOf([&] { PredictProba(m, std::vector<double>{1.0, 2.0, 3.0}); }) ==
          ErrorCode::kDimMismatch);
  }

  TEST_CASE("calibrated probabilities") {
    SvmModel m;
    m.weights = Eigen::VectorXd::Constant(1, 1.0);
    CHECK(PredictProba(m, std::vector<double>{0.0}) == 0.5);
    const double p = PredictProba(m, std::vector<double>{1.7});
    const double q = PredictProba(m, std::vector<double>{-1.7});
    CHECK(std::abs(p + q - 1.0) < 1e-15);
    m.cal_a = 2.5;
    m.cal_b = -0.75;
    double prev = -1.0;
    for (double v = -5.0; v <= 5.0; v += 0.01) {
      const double pr = PredictProba(m, std::vector<double>{v});
      CHECK(pr > prev);
      CHECK((pr > 0.5) == (v > 0.75 / 2.5 + 1e-12));
      prev = pr;
    }
  }

  TEST_CASE("calibration slope stays positive") {
    Rng rng(8);
    for (int trial = 0; trial < 20; ++trial) {
      std::vector<double> margins(30);
      std::vector<int> labels(30);
      for (int i = 0; i < 30; ++i) {
        labels[i] = static_cast<int>(rng.Below(2));
        margins[i] = rng.Normal(labels[i] ? 0.3 : -0.3, 1.0);
      }
      labels[0] = 0;
      labels[1] = 1;
      CHECK(FitLogisticCalibration(margins, labels).first > 0.0);
    }
    // Perfectly separated margins would drive the slope to infinity.
    const auto [a, b] = FitLogisticCalibration(std::vector<double>{-2, -1, 1, 2},
                                               std::vector<int>{0, 0, 1, 1});
    CHECK(std::isfinite(a));
    CHECK(std::isfinite(b));
    CHECK(a > 0.0);
  }
}

TEST_CASE("auc ignores increasing recalibration of scores") {
  Rng rng(10);
  Eigen::MatrixXd x;
  std::vector<int> y;
  Blobs(60, 3, 0.6, 1.0, rng, x, y);
  const ForestModel rf = TrainRandomForest(x, y, {.n_trees = 30, .seed = 1});
  const SvmModel svm = TrainLinearSvm(x, y, {.seed = 1});
  std::vector<double> a, b, buf;
  for (int i = 0; i < 60; ++i) {
    a.push_back(PredictProba(rf, Row(x, i, buf)));
    b.push_back(PredictProba(svm, Row(x, i, buf)));
  }
  for (const auto &scores : {a, b}) {
    std::vector<double> warped;
    for (double s : scores) warped.push_back(std::exp(3.0 * s) - 7.0);
    CHECK(*MidrankAuc(scores, y) == *MidrankAuc(warped, y));
  }
}
