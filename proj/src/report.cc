// src/report.cc

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

#include "drivestate/report.h"

#include <algorithm>
#include <fstream>
#include <numeric>
#include <ostream>

#include "drivestate/error.h"
#include "drivestate/strings.h"

namespace drivestate {

namespace {

std::string Fixed3(bool defined, double v) { return defined ? FormatFixed(v, 3) : "null"; }

nlohmann::json OptionalNumber(const std::optional<double> &v) {
  return v ? nlohmann::json(*v) : nlohmann::json(nullptr);
}

nlohmann::json CellLabels(const GridCell &cell) {
  return {{"embedding", FeatureSetLabel(cell.feature_set)},
          {"feature_set", FeatureSetName(cell.feature_set)},
          {"classifier", ClassifierLabel(cell.classifier)},
          {"baseline", BaselineLabel(cell.baseline)},
          {"window", WindowLabel(cell.windowed)}};
}

void WriteJsonFile(const std::filesystem::path &path, const nlohmann::json &json) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::kIo, "cannot write " + path.string());
  out << json.dump(2) << '\n';
  if (!out) throw Error(ErrorCode::kIo, "write failed for " + path.string());
}

}  // namespace

void WriteResultsCsv(std::ostream &out, const std::vector<CellResult> &results) {
  std::vector<size_t> order(results.size());
  std::iota(order.begin(), order.end(), 0);
  auto auc_of = [&](size_t i) -> std::optional<double> {
    return results[i].has_metrics ? results[i].metrics.auc : std::nullopt;
  };
  std::stable_sort(order.begin(), order.end(), [&](size_t a, size_t b) {
    const auto x = auc_of(a), y = auc_of(b);
    if (x && y) return *x > *y;
    return x.has_value() && !y.has_value();
  });
  out << kResultsHeader << '\n';
  for (size_t i : order) {
    const CellResult &r = results[i];
    const auto auc = auc_of(i);
    out << r.seed << ',' << r.cell.Key() << ',' << Fixed3(r.has_metrics, r.metrics.accuracy)
        << ',' << Fixed3(auc.has_value(), auc.value_or(0.0)) << '\n';
  }
}

nlohmann::json PerSubjectJson(const std::vector<CellResult> &results) {
  nlohmann::json cells = nlohmann::json::array();
  for (const auto &r : results) {
    nlohmann::json c = CellLabels(r.cell);
    c["per_subject_accuracy"] = r.has_metrics ? nlohmann::json(r.metrics.per_subject_accuracy)
                                              : nlohmann::json::object();
    const Confusion &m = r.metrics.confusion;
    c["confusion"] = {{"tn", m.tn}, {"fp", m.fp}, {"fn", m.fn}, {"tp", m.tp}};
    nlohmann::json failures = nlohmann::json::array();
    for (const auto &f : r.folds) {
      if (f.failed) failures.push_back({{"subject", f.held_out_subject}, {"error", f.error}});
    }
    c["fold_failures"] = failures;
    cells.push_back(c);
  }
  return {{"cells", cells}};
}

nlohmann::json CellsToJson(const std::vector<CellResult> &results) {
  nlohmann::json cells = nlohmann::json::array();
  for (const auto &r : results) {
    nlohmann::json c = CellLabels(r.cell);
    c["seed"] = r.seed;
    nlohmann::json folds = nlohmann::json::array();
    for (const auto &f : r.folds) {
      folds.push_back({{"held_out_subject", f.held_out_subject},
                       {"clip_ids", f.clip_ids},
                       {"clip_probs", f.clip_probs},
                       {"clip_labels", f.clip_labels},
                       {"clip_preds", f.clip_preds},
                       {"failed", f.failed},
                       {"error", f.error}});
    }
    c["folds"] = folds;
    c["has_metrics"] = r.has_metrics;
    c["accuracy"] = r.metrics.accuracy;
    c["auc"] = OptionalNumber(r.metrics.auc);
    cells.push_back(c);
  }
  return {{"cells", cells}};
}

std::vector<CellResult> CellsFromJson(const nlohmann::json &json) {
  std::vector<CellResult> results;
  try {
    for (const auto &c : json.at("cells")) {
      CellResult r;
      r.cell.feature_set = ParseFeatureSet(c.at("feature_set").get<std::string>());
      r.cell.classifier = ParseClassifier(c.at("classifier").get<std::string>());
      r.cell.baseline = c.at("baseline").get<std::string>() == "baseline";
      r.cell.windowed = c.at("window").get<std::string>() == "window";
      r.seed = c.at("seed").get<uint64_t>();
      for (const auto &f : c.at("folds")) {
        FoldResult fold;
        fold.held_out_subject = f.at("held_out_subject").get<std::string>();
        fold.clip_ids = f.at("clip_ids").get<std::vector<std::string>>();
        fold.clip_probs = f.at("clip_probs").get<std::vector<double>>();
        fold.clip_labels = f.at("clip_labels").get<std::vector<int>>();
        fold.clip_preds = f.at("clip_preds").get<std::vector<int>>();
        fold.failed = f.at("failed").get<bool>();
        fold.error = f.at("error").get<std::string>();
        r.folds.push_back(std::move(fold));
      }
      r.has_metrics = c.at("has_metrics").get<bool>();
      if (r.has_metrics) {
        r.metrics.accuracy = c.at("accuracy").get<double>();
        if (!c.at("auc").is_null()) r.metrics.auc = c.at("auc").get<double>();
      }
      results.push_back(std::move(r));
    }
  } catch (const nlohmann::json::exception &e) {
    throw Error(ErrorCode::kParseError, std::string("cells.json: ") + e.what());
  }
  return results;
}

nlohmann::json FeatureSetNotes() {
  return {{"egemaps",
           "egemaps_subset: 10 voice-quality descriptors (f0, voicing, jitter, shimmer, HNR, "
           "RMS, spectral slope, alpha ratio); not the 88-feature eGeMAPS extractor output"}};
}

void WriteReport(const std::filesystem::path &dir, const std::vector<CellResult> &results,
                 const nlohmann::json &meta) {
  std::filesystem::create_directories(dir);
  {
    std::ofstream out(dir / "results.csv", std::ios::binary);
    if (!out) throw Error(ErrorCode::kIo, "cannot write " + (dir / "results.csv").string());
    WriteResultsCsv(out, results);
  }
  WriteJsonFile(dir / "per_subject.json", PerSubjectJson(results));
  WriteJsonFile(dir / "cells.json", CellsToJson(results));

  nlohmann::json transforms = nlohmann::json::array();
  nlohmann::json models = nlohmann::json::array();
  for (const auto &r : results) {
    for (const auto &f : r.folds) {
      nlohmann::json tag = CellLabels(r.cell);
      tag["held_out_subject"] = f.held_out_subject;
      if (!f.transforms.is_null()) transforms.push_back({{"fold", tag}, {"transforms", f.transforms}});
      if (!f.model.is_null()) models.push_back({{"fold", tag}, {"model", f.model}});
    }
  }
  if (!transforms.empty()) WriteJsonFile(dir / "transforms.json", transforms);
  if (!models.empty()) WriteJsonFile(dir / "models.json", models);
  if (!meta.is_null()) WriteJsonFile(dir / "run_meta.json", meta);
}

}  // namespace drivestate
