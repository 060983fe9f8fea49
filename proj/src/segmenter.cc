// src/segmenter.cc

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

#include "drivestate/segmenter.h"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <set>
#include <tuple>

#include "drivestate/error.h"
#include "drivestate/strings.h"
#include "json.hpp"

namespace drivestate {

PhraseSet::PhraseSet(std::vector<Phrase> phrases) : phrases_(std::move(phrases)) {
  std::set<int> ids;
  for (const auto &p : phrases_) {
    if (!ids.insert(p.id).second) {
      throw Error(ErrorCode::kBadSchema, "duplicate phrase id " + std::to_string(p.id));
    }
    if (NormalizeText(p.text).empty()) {
      throw Error(ErrorCode::kBadSchema, "empty phrase text for id " + std::to_string(p.id));
    }
  }
}

const Phrase *PhraseSet::FindById(int id) const {
  for (const auto &p : phrases_) {
    if (p.id == id) return &p;
  }
  return nullptr;
}

const PhraseSet &ScriptedPhrases() {
  static const PhraseSet kPhrases({
      {1, "Hey Lexi"},
      {2, "Jessica was blissfully unaware that everyone knew that her so-called "
          "designer wardrobe was indubitably homemade"},
      {3, "Nuclear proliferation can't be tolerated"},
      {4, "She is suffering from passive aggressive disorder"},
      {5, "Branches of plum"},
      {6, "This is a comfortable cushion and it is very expensive"},
      {7, "There are sixty six books on the rack"},
      {8, "The good public prosecutor is from Wisconsin"},
      {9, "Hey Lexi set my cruise control at 65 miles per hour"},
      {10, "Hey Lexi can you tell me how tall is the Eiffel tower"},
      {11, "Hey Lexi take me to Starbucks on East Coast Road"},
      {12, "What does the weather look like for today and tomorrow"},
  });
  return kPhrases;
}

std::string NormalizeWord(std::string_view word) {
  std::string out;
  out.reserve(word.size());
  for (char c : word) {
    const auto u = static_cast<unsigned char>(c);
    // Bytes >= 0x80 (UTF-8 letters) are kept verbatim.
    if (std::isalnum(u) || u >= 0x80) out.push_back(static_cast<char>(std::tolower(u)));
  }
  return out;
}

std::vector<std::string> NormalizeText(std::string_view text) {
  std::vector<std::string> out;
  for (const std::string &w : SplitWhitespace(text)) {
    std::string n = NormalizeWord(w);
    if (!n.empty()) out.push_back(std::move(n));
  }
  return out;
}

std::vector<WordToken> ParseTranscript(std::istream &in) {
  std::vector<WordToken> tokens;
  std::string line;
  int line_no = 0;
  double prev_start = -1.0, prev_end = 0.0;
  while (std::getline(in, line)) {
    ++line_no;
    if (Trim(line).empty()) continue;
    nlohmann::json obj;
    try {
      obj = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception &e) {
      throw Error(ErrorCode::kParseError, "line " + std::to_string(line_no) + ": " + e.what());
    }
    if (!obj.is_object() || !obj.contains("word") || !obj.contains("start") ||
        !obj.contains("end") || !obj["word"].is_string() || !obj["start"].is_number() ||
        !obj["end"].is_number()) {
      throw Error(ErrorCode::kParseError,
                  "line " + std::to_string(line_no) + ": expected word/start/end fields");
    }
    WordToken t;
    t.start_s = obj["start"].get<double>();
    t.end_s = obj["end"].get<double>();
    if (!(t.start_s >= 0.0) || !(t.end_s > t.start_s)) {
      throw Error(ErrorCode::kBadTimestamp,
                  "line " + std::to_string(line_no) + ": end must exceed start");
    }
    if (t.start_s < prev_start || t.start_s < prev_end - 1e-9) {
      throw Error(ErrorCode::kNotSorted,
                  "line " + std::to_string(line_no) + ": token out of order");
    }
    prev_start = t.start_s;
    prev_end = t.end_s;
    t.text = NormalizeWord(obj["word"].get<std::string>());
    if (t.text.empty()) continue;
    tokens.push_back(std::move(t));
  }
  return tokens;
}

std::vector<WordToken> ParseTranscript(const std::filesystem::path &path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIo, "cannot open " + path.string());
  return ParseTranscript(in);
}

void WriteTranscript(std::ostream &out, const std::vector<WordToken> &tokens) {
  for (const auto &t : tokens) {
    nlohmann::json obj = {{"word", t.text}, {"start", t.start_s}, {"end", t.end_s}};
    out << obj.dump() << '\n';
  }
}

int TokenEditDistance(const std::vector<std::string> &a,
                      const std::vector<std::string> &b) {
  std::vector<int> prev(b.size() + 1), cur(b.size() + 1);
  for (size_t j = 0; j <= b.size(); ++j) prev[j] = static_cast<int>(j);
  for (size_t i = 1; i <= a.size(); ++i) {
    cur[0] = static_cast<int>(i);
    for (size_t j = 1; j <= b.size(); ++j) {
      const int sub = prev[j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1);
      cur[j] = std::min({sub, prev[j] + 1, cur[j - 1] + 1});
    }
    std::swap(prev, cur);
  }
  return prev[b.size()];
}

namespace {

struct Candidate {
  size_t start;   // first token index
  size_t length;  // window length in tokens
  size_t phrase;  // index into the phrase set
  size_t phrase_len;
  int edits;
  int denom;  // max(phrase_len, length)

  // Exact rational comparison of 1 - edits/denom.
  bool ScoreGreater(const Candidate &o) const {
    return static_cast<long>(edits) * o.denom < static_cast<long>(o.edits) * denom;
  }
  bool ScoreEqual(const Candidate &o) const {
    return static_cast<long>(edits) * o.denom == static_cast<long>(o.edits) * denom;
  }
};

bool CandidateBefore(const Candidate &a, const Candidate &b) {
  if (!a.ScoreEqual(b)) return a.ScoreGreater(b);
  if (a.start != b.start) return a.start < b.start;
  if (a.phrase_len != b.phrase_len) return a.phrase_len > b.phrase_len;
  if (a.phrase != b.phrase) return a.phrase < b.phrase;
  const size_t da = a.length > a.phrase_len ? a.length - a.phrase_len : a.phrase_len - a.length;
  const size_t db = b.length > b.phrase_len ? b.length - b.phrase_len : b.phrase_len - b.length;
  if (da != db) return da < db;
  return a.length < b.length;
}

}  // namespace

std::vector<UtteranceSegment> MatchPhrases(const std::vector<WordToken> &tokens,
                                           const PhraseSet &phrases,
                                           const MatchOptions &options) {
  if (!(options.min_score > 0.0 && options.min_score <= 1.0)) {
    throw Error(ErrorCode::kConfig, "min_score must lie in (0, 1]");
  }
  const size_t n = tokens.size();
  std::vector<std::vector<std::string>> targets;
  for (const auto &p : phrases.phrases()) targets.push_back(NormalizeText(p.text));

  // One DP per (start, phrase) yields the distance to every window length.
  std::vector<Candidate> candidates;
  std::vector<int> prev, cur;
  for (size_t start = 0; start < n; ++start) {
    for (size_t p = 0; p < targets.size(); ++p) {
      const auto &target = targets[p];
      const size_t len = target.size();
      const size_t max_w = std::min(n - start, 2 * len);
      prev.assign(max_w + 1, 0);
      cur.assign(max_w + 1, 0);
      // Rows over phrase tokens, columns over window tokens.
      for (size_t j = 0; j <= max_w; ++j) prev[j] = static_cast<int>(j);
      for (size_t i = 1; i <= len; ++i) {
        cur[0] = static_cast<int>(i);
        for (size_t j = 1; j <= max_w; ++j) {
          const int sub = prev[j - 1] + (target[i - 1] == tokens[start + j - 1].text ? 0 : 1);
          cur[j] = std::min({sub, prev[j] + 1, cur[j - 1] + 1});
        }
        std::swap(prev, cur);
      }
      for (size_t w = 1; w <= max_w; ++w) {
        const int denom = static_cast<int>(std::max(len, w));
        const int edits = prev[w];
        if (1.0 - static_cast<double>(edits) / denom + 1e-12 < options.min_score) continue;
        candidates.push_back({start, w, p, len, edits, denom});
      }
    }
  }

  // Longest phrase first: a phrase that occurs inside a longer phrase yields
  // to it wherever the longer phrase's own window matches more than half of
  // its tokens. The rule ignores min_score, so lowering the threshold cannot
  // remove a segment.
  std::vector<std::vector<std::pair<size_t, size_t>>> hosts(targets.size());  // (phrase, offset)
  for (size_t p = 0; p < targets.size(); ++p) {
    for (size_t q = 0; q < targets.size(); ++q) {
      const auto &a = targets[p], &b = targets[q];
      if (b.size() <= a.size()) continue;
      for (size_t o = 0; o + a.size() <= b.size(); ++o) {
        if (std::equal(a.begin(), a.end(), b.begin() + static_cast<long>(o))) hosts[p].push_back({q, o});
      }
    }
  }
  auto dominated = [&](const Candidate &c) {
    for (const auto &[q, o] : hosts[c.phrase]) {
      if (c.start < o) continue;
      const size_t from = c.start - o;
      const size_t to = std::min(n, from + targets[q].size());
      std::vector<std::string> window;
      for (size_t k = from; k < to; ++k) window.push_back(tokens[k].text);
      if (2 * TokenEditDistance(window, targets[q]) < static_cast<int>(targets[q].size())) {
        return true;
      }
    }
    return false;
  };
  candidates.erase(std::remove_if(candidates.begin(), candidates.end(), dominated),
                   candidates.end());
  std::sort(candidates.begin(), candidates.end(), CandidateBefore);

  std::vector<bool> token_taken(n, false);
  std::vector<bool> phrase_used(targets.size(), false);
  std::vector<UtteranceSegment> out;
  for (const Candidate &c : candidates) {
    if (phrase_used[c.phrase] && !options.allow_repeats) continue;
    bool free = true;
    for (size_t k = c.start; k < c.start + c.length && free; ++k) free = !token_taken[k];
    if (!free) continue;
    for (size_t k = c.start; k < c.start + c.length; ++k) token_taken[k] = true;
    phrase_used[c.phrase] = true;
    UtteranceSegment seg;
    seg.phrase_id = phrases.phrases()[c.phrase].id;
    seg.start_s = tokens[c.start].start_s;
    seg.end_s = tokens[c.start + c.length - 1].end_s;
    seg.match_score = 1.0 - static_cast<double>(c.edits) / c.denom;
    out.push_back(std::move(seg));
  }
  std::sort(out.begin(), out.end(), [](const auto &a, const auto &b) {
    return std::tie(a.start_s, a.phrase_id) < std::tie(b.start_s, b.phrase_id);
  });
  return out;
}

std::vector<AudioClip> ExtractClips(const AudioClip &audio,
                                    const std::vector<UtteranceSegment> &segments,
                                    double pad_s) {
  const double duration = audio.DurationSeconds();
  const auto total = static_cast<long>(audio.samples.size());
  std::vector<AudioClip> clips;
  std::set<std::string> ids;
  for (const auto &seg : segments) {
    if (seg.start_s >= duration || seg.end_s <= 0.0) {
      throw Error(ErrorCode::kOutOfRange,
                  "segment " + FormatFixed(seg.start_s, 3) + "-" + FormatFixed(seg.end_s, 3) +
                      " s lies outside " + FormatFixed(duration, 3) + " s of audio");
    }
    const long first = std::clamp<long>(
        std::lround((seg.start_s - pad_s) * audio.sample_rate_hz), 0, total);
    const long last = std::clamp<long>(
        std::lround((seg.end_s + pad_s) * audio.sample_rate_hz), 0, total);
    AudioClip clip;
    clip.sample_rate_hz = audio.sample_rate_hz;
    std::string id = seg.clip_id.empty()
                         ? audio.clip_id + "#" + std::to_string(seg.phrase_id)
                         : seg.clip_id;
    // Repeated phrases (allow_repeats) get an occurrence suffix.
    for (int k = 2; !ids.insert(id).second; ++k) {
      id = audio.clip_id + "#" + std::to_string(seg.phrase_id) + "." + std::to_string(k);
    }
    clip.clip_id = id;
    clip.samples.assign(audio.samples.begin() + first, audio.samples.begin() + last);
    clips.push_back(std::move(clip));
  }
  return clips;
}

void WriteSegmentsCsv(std::ostream &out,
                      const std::vector<UtteranceSegment> &segments) {
  out << "clip_id,phrase_id,start_s,end_s,score\n";
  for (const auto &s : segments) {
    out << s.clip_id << ',' << s.phrase_id << ',' << FormatFixed(s.start_s, 3) << ','
        << FormatFixed(s.end_s, 3) << ',' << FormatFixed(s.match_score, 4) << '\n';
  }
}

}  // namespace drivestate
