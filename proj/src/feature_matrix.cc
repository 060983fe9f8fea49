// src/feature_matrix.cc

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

#include "drivestate/feature_matrix.h"

#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <utility>

#include "drivestate/error.h"
#include "drivestate/strings.h"

namespace drivestate {

FeatureMatrix FeatureMatrix::SelectRows(std::span<const size_t> rows) const {
  FeatureMatrix out;
  out.names = names;
  out.values.resize(static_cast<Eigen::Index>(rows.size()), values.cols());
  out.index.reserve(rows.size());
  for (size_t i = 0; i < rows.size(); ++i) {
    out.values.row(static_cast<Eigen::Index>(i)) = values.row(static_cast<Eigen::Index>(rows[i]));
    out.index.push_back(index[rows[i]]);
  }
  return out;
}

void FeatureMatrix::Validate() const {
  if (static_cast<size_t>(values.rows()) != index.size()) {
    throw Error(ErrorCode::kShapeError, "row index does not match value rows");
  }
  if (!names.empty() && static_cast<size_t>(values.cols()) != names.size()) {
    throw Error(ErrorCode::kDimMismatch, "column names do not match value columns");
  }
  if (!values.allFinite()) throw Error(ErrorCode::kNonFinite, "feature matrix has NaN/Inf");
  std::map<std::string, std::pair<std::string, int>> owner;
  for (const auto &r : index) {
    auto [it, inserted] = owner.emplace(r.clip_id, std::make_pair(r.subject_id, r.label));
    if (!inserted && it->second != std::make_pair(r.subject_id, r.label)) {
      throw Error(ErrorCode::kBadSchema,
                  "clip '" + r.clip_id + "' has inconsistent subject or label");
    }
  }
}

FeatureMatrix AssembleMatrix(const std::vector<FeatureVector> &vectors) {
  FeatureMatrix m;
  if (vectors.empty()) return m;
  const size_t dim = vectors.front().values.size();
  m.names = vectors.front().names;
  m.values.resize(static_cast<Eigen::Index>(vectors.size()), static_cast<Eigen::Index>(dim));
  m.index.reserve(vectors.size());
  for (size_t i = 0; i < vectors.size(); ++i) {
    const FeatureVector &v = vectors[i];
    if (v.values.size() != dim) {
      throw Error(ErrorCode::kDimMismatch, "feature vector for '" + v.clip_id +
                                               "' has length " + std::to_string(v.values.size()) +
                                               ", expected " + std::to_string(dim));
    }
    for (size_t j = 0; j < dim; ++j) {
      m.values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = v.values[j];
    }
    m.index.push_back({v.subject_id, v.clip_id, v.window_index, v.label});
  }
  m.Validate();
  return m;
}

void WriteFeatureCsv(std::ostream &out, const FeatureMatrix &m) {
  out << "clip_id,window_index";
  for (const auto &n : m.names) out << ',' << n;
  out << '\n';
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    const RowInfo &r = m.index[static_cast<size_t>(i)];
    out << r.clip_id << ',' << r.window_index;
    for (Eigen::Index j = 0; j < m.cols(); ++j) out << ',' << FormatRoundTrip(m.values(i, j));
    out << '\n';
  }
}

void SaveFeatureCsv(const std::filesystem::path &path, const FeatureMatrix &m) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::kIo, "cannot write " + path.string());
  WriteFeatureCsv(out, m);
}

FeatureCsv ReadFeatureCsv(std::istream &in) {
  std::string line;
  if (!std::getline(in, line)) throw Error(ErrorCode::kBadSchema, "empty feature cache");
  std::vector<std::string> header = SplitCsvLine(StripCr(line));
  if (header.size() < 3 || header[0] != "clip_id" || header[1] != "window_index") {
    throw Error(ErrorCode::kBadSchema, "feature cache header must start clip_id,window_index");
  }
  FeatureCsv csv;
  csv.names.assign(header.begin() + 2, header.end());
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    line = StripCr(line);
    if (line.empty()) continue;
    std::vector<std::string> f = SplitCsvLine(line);
    if (f.size() != header.size()) {
      throw Error(ErrorCode::kDimMismatch, "feature cache line " + std::to_string(line_no));
    }
    FeatureCsvRow row;
    row.clip_id = f[0];
    auto parse = [&](const std::string &s, auto *value) {
      auto res = std::from_chars(s.data(), s.data() + s.size(), *value);
      if (res.ec != std::errc() || res.ptr != s.data() + s.size()) {
        throw Error(ErrorCode::kParseError,
                    "feature cache line " + std::to_string(line_no) + ": '" + s + "'");
      }
    };
    parse(f[1], &row.window_index);
    row.values.resize(f.size() - 2);
    for (size_t j = 2; j < f.size(); ++j) parse(f[j], &row.values[j - 2]);
    csv.rows.push_back(std::move(row));
  }
  return csv;
}

FeatureCsv LoadFeatureCsv(const std::filesystem::path &path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIo, "cannot open " + path.string());
  return ReadFeatureCsv(in);
}

}  // namespace drivestate
