// include/drivestate/segmenter.h

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

#ifndef DRIVESTATE_SEGMENTER_H_
#define DRIVESTATE_SEGMENTER_H_

#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "drivestate/audio.h"

namespace drivestate {

struct WordToken {
  std::string text;  // normalized
  double start_s = 0.0;
  double end_s = 0.0;
};

struct Phrase {
  int id = 0;
  std::string text;
};

// Ordered scripted prompts. Ids are unique and texts non-empty.
class PhraseSet {
 public:
  PhraseSet() = default;
  explicit PhraseSet(std::vector<Phrase> phrases);

  const std::vector<Phrase> &phrases() const { return phrases_; }
  size_t size() const { return phrases_.size(); }
  const Phrase *FindById(int id) const;

 private:
  std::vector<Phrase> phrases_;
};

// The twelve prompts read by every participant, ids 1..12 in recording order.
const PhraseSet &ScriptedPhrases();

// Lowercase, punctuation removed (so "so-called" becomes "socalled").
std::string NormalizeWord(std::string_view word);
std::vector<std::string> NormalizeText(std::string_view text);

// JSON-lines, one {"word","start","end"} object per line. Words that
// normalize to nothing (pure punctuation) are dropped.
std::vector<WordToken> ParseTranscript(std::istream &in);
std::vector<WordToken> ParseTranscript(const std::filesystem::path &path);
void WriteTranscript(std::ostream &out, const std::vector<WordToken> &tokens);

struct UtteranceSegment {
  int phrase_id = 0;
  double start_s = 0.0;
  double end_s = 0.0;
  double match_score = 0.0;
  std::string clip_id;
};

struct MatchOptions {
  double min_score = 0.8;
  bool allow_repeats = false;
};

// Token-level fuzzy alignment of the phrase set against a transcript.
// Candidates (phrase, token window) scoring 1 - edit_distance / max(len) are
// accepted greedily by descending score, then leftmost position, then longest
// phrase; overlapping windows and already-used phrases are skipped. A
// phrase that occurs inside a longer phrase is dropped wherever that longer
// phrase's window matches more than half of its tokens, so "hey lexi" does
// not claim the opening of "hey lexi set my cruise control ...". Output is
// ordered by start time.
std::vector<UtteranceSegment> MatchPhrases(const std::vector<WordToken> &tokens,
                                           const PhraseSet &phrases,
                                           const MatchOptions &options = {});

// Levenshtein distance over tokens.
int TokenEditDistance(const std::vector<std::string> &a,
                      const std::vector<std::string> &b);

inline constexpr double kDefaultPadSeconds = 0.05;

// One clip per segment, padded and clamped to the audio bounds. Clip ids are
// "<parent>#<phrase_id>". Throws kOutOfRange when a segment lies entirely
// outside the audio.
std::vector<AudioClip> ExtractClips(const AudioClip &audio,
                                    const std::vector<UtteranceSegment> &segments,
                                    double pad_s = kDefaultPadSeconds);

// clip_id,phrase_id,start_s,end_s,score
void WriteSegmentsCsv(std::ostream &out,
                      const std::vector<UtteranceSegment> &segments);

}  // namespace drivestate

#endif  // DRIVESTATE_SEGMENTER_H_
