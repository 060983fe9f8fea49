// include/drivestate/embeddings.h

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

#ifndef DRIVESTATE_EMBEDDINGS_H_
#define DRIVESTATE_EMBEDDINGS_H_

#include <filesystem>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

namespace drivestate {

// Fixed-length utterance embeddings keyed by clip id. Vectors are stored as
// given (after frame pooling); no re-normalization happens on ingest.
//
// Keys of the form "<clip_id>@w<k>" carry the embedding of window k of the
// clip and are used by the windowed grid factor when present.
struct EmbeddingTable {
  std::string set_name;
  size_t dim = 0;
  std::map<std::string, std::vector<double>> rows;

  const std::vector<double> *Find(const std::string &key) const;
};

std::string WindowKey(const std::string &clip_id, int window_index);

// Text format, whitespace separated, '#' comment lines ignored.
//   pooled:   "<clip_id> v1 ... vd" per line
//   unpooled: "clip <clip_id> <T>" followed by T frame rows of d numbers;
//             each block is reduced to its arithmetic frame mean.
EmbeddingTable ParseEmbeddings(std::istream &in, bool pooled,
                               const std::string &set_name = "");
EmbeddingTable IngestEmbeddings(const std::filesystem::path &path, bool pooled,
                                const std::string &set_name = "");

void WritePooledEmbeddings(std::ostream &out, const EmbeddingTable &table);
// Writes one unpooled block.
void WriteEmbeddingBlock(std::ostream &out, const std::string &clip_id,
                         const std::vector<std::vector<double>> &frames);

}  // namespace drivestate

#endif  // DRIVESTATE_EMBEDDINGS_H_
