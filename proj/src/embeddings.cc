// src/embeddings.cc

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

#include "drivestate/embeddings.h"

#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>

#include "drivestate/error.h"
#include "drivestate/strings.h"

namespace drivestate {
namespace {

double ParseNumber(const std::string &token, int line_no) {
  double value = 0.0;
  const char *end = token.data() + token.size();
  auto res = std::from_chars(token.data(), end, value);
  if (res.ec != std::errc() || res.ptr != end) {
    throw Error(ErrorCode::kParseError,
                "line " + std::to_string(line_no) + ": non-numeric token '" + token + "'");
  }
  if (!std::isfinite(value)) {
    throw Error(ErrorCode::kNonFinite,
                "line " + std::to_string(line_no) + ": non-finite value '" + token + "'");
  }
  return value;
}

bool IsSkippable(const std::string &line) {
  const std::string t = Trim(line);
  return t.empty() || t[0] == '#';
}

class Builder {
 public:
  explicit Builder(EmbeddingTable *table) : table_(table) {}

  void CheckDim(size_t dim, int line_no) {
    if (dim == 0) {
      throw Error(ErrorCode::kParseError, "line " + std::to_string(line_no) + ": empty vector");
    }
    if (table_->dim == 0) table_->dim = dim;
    if (dim != table_->dim) {
      throw Error(ErrorCode::kDimMismatch,
                  "line " + std::to_string(line_no) + ": dimension " + std::to_string(dim) +
                      " differs from " + std::to_string(table_->dim));
    }
  }

  void Add(const std::string &key, std::vector<double> v, int line_no) {
    CheckDim(v.size(), line_no);
    if (!table_->rows.emplace(key, std::move(v)).second) {
      throw Error(ErrorCode::kDuplicateClip, "embedding for '" + key + "' repeated");
    }
  }

 private:
  EmbeddingTable *table_;
};

}  // namespace

const std::vector<double> *EmbeddingTable::Find(const std::string &key) const {
  auto it = rows.find(key);
  return it == rows.end() ? nullptr : &it->second;
}

std::string WindowKey(const std::string &clip_id, int window_index) {
  return clip_id + "@w" + std::to_string(window_index);
}

EmbeddingTable ParseEmbeddings(std::istream &in, bool pooled,
                               const std::string &set_name) {
  EmbeddingTable table;
  table.set_name = set_name;
  Builder builder(&table);
  std::string line;
  int line_no = 0;

  if (pooled) {
    while (std::getline(in, line)) {
      ++line_no;
      if (IsSkippable(line)) continue;
      std::vector<std::string> tok = SplitWhitespace(line);
      std::vector<double> v;
      v.reserve(tok.size() - 1);
      for (size_t i = 1; i < tok.size(); ++i) v.push_back(ParseNumber(tok[i], line_no));
      builder.Add(tok[0], std::move(v), line_no);
    }
  } else {
    while (std::getline(in, line)) {
      ++line_no;
      if (IsSkippable(line)) continue;
      std::vector<std::string> head = SplitWhitespace(line);
      if (head.size() != 3 || head[0] != "clip") {
        throw Error(ErrorCode::kParseError,
                    "line " + std::to_string(line_no) + ": expected 'clip <id> <T>'");
      }
      const double t_value = ParseNumber(head[2], line_no);
      const long frames = static_cast<long>(t_value);
      if (frames < 1 || static_cast<double>(frames) != t_value) {
        throw Error(ErrorCode::kParseError,
                    "line " + std::to_string(line_no) + ": bad frame count");
      }
      std::vector<double> sum;
      for (long f = 0; f < frames;) {
        if (!std::getline(in, line)) {
          throw Error(ErrorCode::kParseError, "block '" + head[1] + "' truncated");
        }
        ++line_no;
        if (IsSkippable(line)) continue;
        std::vector<std::string> tok = SplitWhitespace(line);
        builder.CheckDim(tok.size(), line_no);
        if (sum.empty()) sum.assign(tok.size(), 0.0);
        for (size_t i = 0; i < tok.size(); ++i) sum[i] += ParseNumber(tok[i], line_no);
        ++f;
      }
      for (double &s : sum) s /= static_cast<double>(frames);
      builder.Add(head[1], std::move(sum), line_no);
    }
  }
  if (table.rows.empty()) throw Error(ErrorCode::kParseError, "no embeddings found");
  return table;
}

EmbeddingTable IngestEmbeddings(const std::filesystem::path &path, bool pooled,
                                const std::string &set_name) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIo, "cannot open " + path.string());
  return ParseEmbeddings(in, pooled, set_name);
}

void WritePooledEmbeddings(std::ostream &out, const EmbeddingTable &table) {
  for (const auto &[key, v] : table.rows) {
    out << key;
    for (double x : v) out << ' ' << FormatRoundTrip(x);
    out << '\n';
  }
}

void WriteEmbeddingBlock(std::ostream &out, const std::string &clip_id,
                         const std::vector<std::vector<double>> &frames) {
  out << "clip " << clip_id << ' ' << frames.size() << '\n';
  for (const auto &row : frames) {
    for (size_t i = 0; i < row.size(); ++i) {
      if (i) out << ' ';
      out << FormatRoundTrip(row[i]);
    }
    out << '\n';
  }
}

}  // namespace drivestate
