// src/manifest.cc

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

#include "drivestate/manifest.h"

#include <algorithm>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <set>
#include <unordered_set>

#include "drivestate/error.h"
#include "drivestate/strings.h"

namespace drivestate {

const char *LabelToken(int label) {
  return label == kImpaired ? "impaired" : "sober";
}

int ParseLabelToken(std::string_view token) {
  if (token == "sober") return kSober;
  if (token == "impaired") return kImpaired;
  throw Error(ErrorCode::kBadLabel, "unknown label token '" + std::string(token) + "'");
}

std::vector<std::string> Manifest::Subjects() const {
  std::set<std::string> ids;
  for (const auto &e : entries) ids.insert(e.subject_id);
  return {ids.begin(), ids.end()};
}

const ManifestEntry *Manifest::Find(std::string_view clip_id) const {
  for (const auto &e : entries) {
    if (e.clip_id == clip_id) return &e;
  }
  return nullptr;
}

std::filesystem::path Manifest::Resolve(const std::string &path) const {
  std::filesystem::path p(path);
  if (p.is_absolute() || base_dir.empty()) return p;
  return base_dir / p;
}

Manifest ParseManifest(std::istream &in) {
  std::string line;
  if (!std::getline(in, line)) throw Error(ErrorCode::kBadSchema, "empty manifest");
  const std::vector<std::string> header = SplitCsvLine(StripCr(line));
  std::map<std::string, size_t> column;
  for (size_t i = 0; i < header.size(); ++i) column[header[i]] = i;
  for (const char *required : {"subject_id", "clip_id", "label"}) {
    if (!column.count(required)) {
      throw Error(ErrorCode::kBadSchema, std::string("missing column ") + required);
    }
  }
  auto field = [&](const std::vector<std::string> &row, const char *name) {
    auto it = column.find(name);
    if (it == column.end() || it->second >= row.size()) return std::string();
    return row[it->second];
  };

  Manifest manifest;
  std::unordered_set<std::string> seen;
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    line = StripCr(line);
    if (line.empty()) continue;
    const std::vector<std::string> row = SplitCsvLine(line);
    if (row.size() != header.size()) {
      throw Error(ErrorCode::kBadSchema,
                  "line " + std::to_string(line_no) + ": expected " +
                      std::to_string(header.size()) + " fields");
    }
    ManifestEntry e;
    e.subject_id = field(row, "subject_id");
    e.clip_id = field(row, "clip_id");
    if (e.subject_id.empty() || e.clip_id.empty()) {
      throw Error(ErrorCode::kBadSchema,
                  "line " + std::to_string(line_no) + ": empty subject_id or clip_id");
    }
    e.label = ParseLabelToken(field(row, "label"));
    e.audio_path = field(row, "audio_path");
    e.transcript_path = field(row, "transcript_path");
    if (!seen.insert(e.clip_id).second) {
      throw Error(ErrorCode::kDuplicateClip, "clip_id '" + e.clip_id + "' repeated");
    }
    manifest.entries.push_back(std::move(e));
  }
  return manifest;
}

Manifest LoadManifest(const std::filesystem::path &path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIo, "cannot open " + path.string());
  Manifest manifest = ParseManifest(in);
  manifest.base_dir = path.parent_path();
  return manifest;
}

void WriteManifest(std::ostream &out, const Manifest &manifest) {
  out << "subject_id,clip_id,label,audio_path,transcript_path\n";
  for (const auto &e : manifest.entries) {
    for (const std::string *f : {&e.subject_id, &e.clip_id, &e.audio_path,
                                 &e.transcript_path}) {
      if (f->find_first_of(",\n") != std::string::npos) {
        throw Error(ErrorCode::kBadSchema, "field contains a separator: " + *f);
      }
    }
    out << e.subject_id << ',' << e.clip_id << ',' << LabelToken(e.label) << ','
        << e.audio_path << ',' << e.transcript_path << '\n';
  }
}

void SaveManifest(const std::filesystem::path &path, const Manifest &manifest) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::kIo, "cannot write " + path.string());
  WriteManifest(out, manifest);
}

}  // namespace drivestate
