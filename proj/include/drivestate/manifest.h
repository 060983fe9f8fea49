// include/drivestate/manifest.h

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

#ifndef DRIVESTATE_MANIFEST_H_
#define DRIVESTATE_MANIFEST_H_

#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace drivestate {

// Binary condition label: sober = 0, impaired (>= 0.08% BrAC) = 1.
inline constexpr int kSober = 0;
inline constexpr int kImpaired = 1;

const char *LabelToken(int label);
// Throws kBadLabel for anything except "sober" / "impaired".
int ParseLabelToken(std::string_view token);

struct ManifestEntry {
  std::string subject_id;
  std::string clip_id;
  int label = kSober;
  std::string audio_path;       // may be empty for embeddings-only data
  std::string transcript_path;  // may be empty
};

// CSV with header subject_id,clip_id,label,audio_path,transcript_path.
// The last two columns are optional in input files.
struct Manifest {
  std::vector<ManifestEntry> entries;
  // Directory relative paths are resolved against; not serialized.
  std::filesystem::path base_dir;

  // Sorted, de-duplicated subject ids.
  std::vector<std::string> Subjects() const;
  const ManifestEntry *Find(std::string_view clip_id) const;
  std::filesystem::path Resolve(const std::string &path) const;
};

Manifest ParseManifest(std::istream &in);
Manifest LoadManifest(const std::filesystem::path &path);

void WriteManifest(std::ostream &out, const Manifest &manifest);
void SaveManifest(const std::filesystem::path &path, const Manifest &manifest);

}  // namespace drivestate

#endif  // DRIVESTATE_MANIFEST_H_
