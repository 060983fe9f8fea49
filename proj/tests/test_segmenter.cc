// tests/test_segmenter.cc

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

#include <algorithm>
#include <set>
#include <sstream>

#include "drivestate/error.h"
#include "drivestate/rng.h"
#include "drivestate/segmenter.h"
#include "test_support.h"

using namespace drivestate;
using drivestate::testing::BuildSession;

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

std::vector<WordToken> Words(const std::string &text, double start = 0.0, double step = 0.5) {
  std::vector<WordToken> out;
  for (const std::string &w : NormalizeText(text)) {
    out.push_back({w, start, start + step * 0.8});
    start += step;
  }
  return out;
}

}  // namespace

TEST_CASE("transcript lines parse and normalize") {
  std::istringstream in(
      "{\"word\": \"Hey,\", \"start\": 0.0, \"end\": 0.2}\n"
      "{\"word\": \"Lexi!\", \"start\": 0.2, \"end\": 0.5}\n");
  const auto tokens = ParseTranscript(in);
  REQUIRE(tokens.size() == 2);
  CHECK(tokens[0].text == "hey");
  CHECK(tokens[1].text == "lexi");
  CHECK(tokens[1].start_s == 0.2);
  CHECK(tokens[1].end_s == 0.5);
}

TEST_CASE("transcript errors") {
  std::istringstream reversed("{\"word\": \"a\", \"start\": 1.0, \"end\": 0.9}\n");
  CHECK(CodeOf([&] { ParseTranscript(reversed); }) == ErrorCode::kBadTimestamp);
  std::istringstream unordered(
      "{\"word\": \"a\", \"start\": 1.0, \"end\": 1.2}\n"
      "{\"word\": \"b\", \"start\": 0.5, \"end\": 0.7}\n");
  CHECK(CodeOf([&] { ParseTranscript(unordered); }) == ErrorCode::kNotSorted);
  std::istringstream broken("{\"word\": \"a\", \"start\": 1.0\n");
  CHECK(CodeOf([&] { ParseTranscript(broken); }) == ErrorCode::kParseError);
}

TEST_CASE("transcripts round-trip through the writer") {
  const auto tokens = Words("she is suffering from passive aggressive disorder", 1.25);
  std::ostringstream out;
  WriteTranscript(out, tokens);
  std::istringstream in(out.str());
  const auto back = ParseTranscript(in);
  REQUIRE(back.size() == tokens.size());
  for (size_t i = 0; i < back.size(); ++i) {
    CHECK(back[i].text == tokens[i].text);
    CHECK(back[i].start_s == tokens[i].start_s);
    CHECK(back[i].end_s == tokens[i].end_s);
  }
}

TEST_CASE("normalization") {
  CHECK(NormalizeWord("Can't") == "cant");
  CHECK(NormalizeWord("65") == "65");
  CHECK(NormalizeWord("...") == "");
  CHECK(NormalizeText("Hey Lexi, so-called  experts!") ==
        std::vector<std::string>{"hey", "lexi", "socalled", "experts"});
}

TEST_CASE("token edit distance") {
  using V = std::vector<std::string>;
  CHECK(TokenEditDistance(V{"a", "b", "c"}, V{"a", "b", "c"}) == 0);
  CHECK(TokenEditDistance(V{"branches", "off", "plum"}, V{"branches", "of", "plum"}) == 1);
  CHECK(TokenEditDistance(V{}, V{"x", "y"}) == 2);
  CHECK(TokenEditDistance(V{"a", "b"}, V{"b", "a"}) == 2);
}

TEST_CASE("phrase set invariants") {
  CHECK(ScriptedPhrases().size() == 12);
  CHECK(CodeOf([] { PhraseSet({{1, "a"}, {1, "b"}}); }) == ErrorCode::kBadSchema);
  CHECK(CodeOf([] { PhraseSet({{1, "  "}}); }) == ErrorCode::kBadSchema);
}

TEST_CASE("cruise control phrase matches exactly") {
  const auto tokens = Words("hey lexi set my cruise control at 65 miles per hour", 3.0);
  const auto segs = MatchPhrases(tokens, ScriptedPhrases());
  REQUIRE(segs.size() == 1);
  CHECK(segs[0].phrase_id == 9);
  CHECK(segs[0].start_s == tokens.front().start_s);
  CHECK(segs[0].end_s == tokens.back().end_s);
  CHECK(segs[0].match_score == 1.0);
}

TEST_CASE("a nested shorter phrase does not claim the opening of a longer one") {
  auto tokens = Words("hey lexi set my cruise control at 65 miles per hour", 3.0);
  tokens[8].text = "smiles";
  for (double min_score : {0.9, 0.8, 0.6}) {
    const auto segs = MatchPhrases(tokens, ScriptedPhrases(), {min_score, false});
    if (min_score > 10.0 / 11.0) {
      CHECK(segs.empty());
      continue;
    }
    REQUIRE(segs.size() == 1);
    CHECK(segs[0].phrase_id == 9);
    CHECK(segs[0].start_s == tokens.front().start_s);
    CHECK(segs[0].end_s == tokens.back().end_s);
    CHECK(segs[0].match_score == doctest::Approx(10.0 / 11.0).epsilon(1e-12));
  }
  // On its own the short phrase still matches.
  const auto alone = MatchPhrases(Words("hey lexi"), ScriptedPhrases());
  REQUIRE(alone.size() == 1);
  CHECK(alone[0].phrase_id == 1);
}

TEST_CASE("exact and fuzzy short phrase") {
  const auto exact = MatchPhrases(Words("branches of plum"), ScriptedPhrases());
  REQUIRE(exact.size() == 1);
  CHECK(exact[0].phrase_id == 5);
  CHECK(exact[0].match_score == 1.0);

  const auto fuzzy = MatchPhrases(Words("branches off plum"), ScriptedPhrases(), {0.6, false});
  REQUIRE(fuzzy.size() == 1);
  CHECK(fuzzy[0].phrase_id == 5);
  CHECK(fuzzy[0].match_score == doctest::Approx(2.0 / 3.0).epsilon(1e-12));
  CHECK(MatchPhrases(Words("branches off plum"), ScriptedPhrases()).empty());
}

TEST_CASE("min_score outside (0, 1] is rejected") {
  CHECK(CodeOf([] { MatchPhrases({}, ScriptedPhrases(), {0.0, false}); }) == ErrorCode::kConfig);
  CHECK(CodeOf([] { MatchPhrases({}, ScriptedPhrases(), {1.5, false}); }) == ErrorCode::kConfig);
}

TEST_CASE("repeats only when enabled") {
  auto tokens = Words("branches of plum");
  const auto more = Words("branches of plum", 5.0);
  tokens.insert(tokens.end(), more.begin(), more.end());
  CHECK(MatchPhrases(tokens, ScriptedPhrases()).size() == 1);
  const auto both = MatchPhrases(tokens, ScriptedPhrases(), {0.8, true});
  REQUIRE(both.size() == 2);
  CHECK(both[0].end_s <= both[1].start_s);
}

TEST_CASE("clean session recovers every phrase with exact boundaries") {
  const auto session = BuildSession(ScriptedPhrases());
  const auto segs = MatchPhrases(session.tokens, ScriptedPhrases());
  REQUIRE(segs.size() == 12);
  for (size_t i = 0; i < segs.size(); ++i) {
    CHECK(segs[i].phrase_id == ScriptedPhrases().phrases()[i].id);
    CHECK(segs[i].match_score == 1.0);
    CHECK(segs[i].start_s == session.spans[i].first);
    CHECK(segs[i].end_s == session.spans[i].second);
  }
}

TEST_CASE("substituted sessions lose only phrases pushed below the threshold") {
  const auto &phrases = ScriptedPhrases().phrases();
  for (uint64_t seed = 1; seed <= 40; ++seed) {
    auto session = BuildSession(ScriptedPhrases());
    Rng rng(seed);
    std::vector<size_t> order(session.tokens.size());
    for (size_t i = 0; i < order.size(); ++i) order[i] = i;
    rng.Shuffle(order.begin(), order.end());
    const size_t n_sub = (session.tokens.size() + 5) / 10;
    std::set<size_t> hit(order.begin(), order.begin() + n_sub);
    for (size_t k : hit) session.tokens[k].text = "zzz" + std::to_string(k);

    // Phrases whose own substitution ratio stays within the threshold.
    size_t expected = 0, offset = 0;
    for (const auto &p : phrases) {
      const size_t len = NormalizeText(p.text).size();
      size_t subs = 0;
      for (size_t k = offset; k < offset + len; ++k) subs += hit.count(k);
      if (1.0 - static_cast<double>(subs) / len >= 0.8 - 1e-12) ++expected;
      offset += len;
    }
    const auto segs = MatchPhrases(session.tokens, ScriptedPhrases());
    std::set<int> found;
    for (const auto &s : segs) found.insert(s.phrase_id);
    CHECK(found.size() >= expected);
  }
}

TEST_CASE("lowering min_score never removes segments") {
  Rng rng(9);
  for (int trial = 0; trial < 30; ++trial) {
    auto session = BuildSession(ScriptedPhrases());
    for (auto &t : session.tokens) {
      if (rng.Uniform() < 0.2) t.text = "q" + std::to_string(rng.Below(5));
    }
    std::vector<UtteranceSegment> prev;
    for (double min_score : {1.0, 0.9, 0.8, 0.7, 0.6, 0.5, 0.4, 0.3}) {
      const auto segs = MatchPhrases(session.tokens, ScriptedPhrases(), {min_score, false});
      for (const auto &p : prev) {
        const bool kept = std::any_of(segs.begin(), segs.end(), [&](const auto &s) {
          return s.phrase_id == p.phrase_id && s.start_s == p.start_s && s.end_s == p.end_s;
        });
        CHECK(kept);
      }
      prev = segs;
    }
  }
}

TEST_CASE("segments never overlap") {
  Rng rng(21);
  for (int trial = 0; trial < 20; ++trial) {
    auto session = BuildSession(ScriptedPhrases(), 0.2, 0.0);
    for (auto &t : session.tokens) {
      if (rng.Uniform() < 0.15) t.text = "hey";
    }
    const auto segs = MatchPhrases(session.tokens, ScriptedPhrases(), {0.5, true});
    for (size_t i = 1; i < segs.size(); ++i) CHECK(segs[i - 1].end_s <= segs[i].start_s);
    for (const auto &s : segs) CHECK(s.match_score >= 0.5);
  }
}

TEST_CASE("clip extraction") {
  AudioClip audio;
  audio.clip_id = "sess";
  audio.samples.resize(160000);
  for (size_t i = 0; i < audio.samples.size(); ++i) audio.samples[i] = i * 1e-6;

  UtteranceSegment mid{4, 2.0, 3.0, 1.0, ""};
  const auto a = ExtractClips(audio, {mid}, 0.0);
  REQUIRE(a.size() == 1);
  CHECK(a[0].samples.size() == 16000);
  CHECK(a[0].clip_id == "sess#4");
  CHECK(a[0].samples.front() == audio.samples[32000]);

  UtteranceSegment head{1, 0.0, 1.0, 1.0, ""};
  const auto b = ExtractClips(audio, {head}, 0.25);
  CHECK(b[0].samples.size() == 20000);
  CHECK(b[0].samples.front() == audio.samples[0]);

  UtteranceSegment tail{2, 9.5, 10.0, 1.0, ""};
  CHECK(ExtractClips(audio, {tail}, 0.25)[0].samples.size() == 12000);

  UtteranceSegment outside{3, 11.0, 12.0, 1.0, ""};
  CHECK(CodeOf([&] { ExtractClips(audio, {outside}, 0.0); }) == ErrorCode::kOutOfRange);
}

TEST_CASE("clip duration equals segment plus padding") {
  AudioClip audio;
  audio.samples.assign(16000 * 20, 0.0);
  Rng rng(4);
  for (int trial = 0; trial < 200; ++trial) {
    const double start = rng.Uniform(0.5, 18.0);
    const double end = start + rng.Uniform(0.01, 1.5);
    const double pad = rng.Uniform(0.0, 0.4);
    const UtteranceSegment seg{1, start, end, 1.0, "x"};
    const auto clip = ExtractClips(audio, {seg}, pad)[0];
    const double lo = std::max(0.0, start - pad);
    const double hi = std::min(20.0, end + pad);
    CHECK(std::abs(clip.DurationSeconds() - (hi - lo)) <= 1.0 / 16000 + 1e-12);
  }
}

TEST_CASE("segments csv layout") {
  std::ostringstream out;
  WriteSegmentsCsv(out, {{5, 1.0, 2.5, 1.0, "s#5"}});
  CHECK(out.str() == "clip_id,phrase_id,start_s,end_s,score\ns#5,5,1.000,2.500,1.0000\n");
}
