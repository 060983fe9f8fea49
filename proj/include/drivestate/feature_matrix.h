// include/drivestate/feature_matrix.h

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

#ifndef DRIVESTATE_FEATURE_MATRIX_H_
#define DRIVESTATE_FEATURE_MATRIX_H_

#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace drivestate {

// Per-frame trajectory: T rows by D named columns.
struct FeatureTrack {
  Eigen::MatrixXd frames;
  std::vector<std::string> names;
};

struct FeatureVector {
  std::vector<double> values;
  std::vector<std::string> names;
  std::string clip_id;
  int window_index = 0;
  std::string subject_id;
  int label = 0;
};

struct RowInfo {
  std::string subject_id;
  std::string clip_id;
  int window_index = 0;
  int label = 0;
};

// Rows of equal-length feature vectors with their identity. Every clip id
// maps to a single subject and label.
struct FeatureMatrix {
  Eigen::MatrixXd values;  // rows x cols
  std::vector<RowInfo> index;
  std::vector<std::string> names;

  Eigen::Index rows() const { return values.rows(); }
  Eigen::Index cols() const { return values.cols(); }

  FeatureMatrix SelectRows(std::span<const size_t> rows) const;
  // Throws kDimMismatch / kNonFinite / kBadSchema on invariant violations.
  void Validate() const;
};

FeatureMatrix AssembleMatrix(const std::vector<FeatureVector> &vectors);

// Feature cache CSV: header "clip_id,window_index,<names...>", one row per
// (clip, window). Subject and label are rejoined from the manifest on load.
void WriteFeatureCsv(std::ostream &out, const FeatureMatrix &m);
void SaveFeatureCsv(const std::filesystem::path &path, const FeatureMatrix &m);

struct FeatureCsvRow {
  std::string clip_id;
  int window_index = 0;
  std::vector<double> values;
};
struct FeatureCsv {
  std::vector<std::string> names;
  std::vector<FeatureCsvRow> rows;
};
FeatureCsv ReadFeatureCsv(std::istream &in);
FeatureCsv LoadFeatureCsv(const std::filesystem::path &path);

}  // namespace drivestate

#endif  // DRIVESTATE_FEATURE_MATRIX_H_
