#include <gtest/gtest.h>

#include <functional>
#include <random>
#include <sstream>

#include "topicmine/quality_gate.hpp"

using namespace topicmine;

namespace {

WordList dict(std::vector<std::string> words) { return WordList(std::move(words), WordListKind::Dictionary); }

// Plain recursive edit distance with memo; the reference for the bounded
// version.
std::size_t reference_levenshtein(const std::u32string& a, const std::u32string& b) {
  std::vector<std::vector<std::size_t>> memo(a.size() + 1, std::vector<std::size_t>(b.size() + 1, SIZE_MAX));
  std::function<std::size_t(std::size_t, std::size_t)> go = [&](std::size_t i, std::size_t j) -> std::size_t {
    if (i == 0) return j;
    if (j == 0) return i;
    auto& m = memo[i][j];
    if (m != SIZE_MAX) return m;
    return m = std::min({go(i - 1, j) + 1, go(i, j - 1) + 1, go(i - 1, j - 1) + (a[i - 1] == b[j - 1] ? 0u : 1u)});
  };
  return go(a.size(), b.size());
}

std::u32string random_word(std::mt19937_64& rng, std::size_t max_len) {
  static const char32_t alphabet[] = {U'a', U'b', U'c', U'é', U'ß'};
  std::uniform_int_distribution<std::size_t> len(0, max_len), pick(0, 4);
  std::u32string w(len(rng), U'a');
  for (auto& c : w) c = alphabet[pick(rng)];
  return w;
}

std::string utf8(const std::u32string& s) {
  std::string out;
  for (char32_t c : s) unicode::append(out, c);
  return out;
}

std::string words(std::size_t known, std::size_t unknown) {
  std::string s;
  for (std::size_t i = 0; i < known; ++i) s += "peace ";
  for (std::size_t i = 0; i < unknown; ++i) s += "xqzv ";
  return s;
}

}  // namespace

TEST(QualityScore, FourOfTenIsDropped) {
  auto r = score_document({"d", words(4, 6), {}, {}}, dict({"peace"}));
  EXPECT_EQ(r.total_words, 10u);
  EXPECT_EQ(r.in_dictionary, 4u);
  EXPECT_DOUBLE_EQ(r.score, 0.4);
  EXPECT_EQ(r.tier, Tier::Drop);
}

TEST(QualityScore, NineteenOfTwentyIsCorrected) {
  auto r = score_document({"d", words(19, 1), {}, {}}, dict({"peace"}));
  EXPECT_DOUBLE_EQ(r.score, 0.95);
  EXPECT_EQ(r.tier, Tier::Correct);
}

TEST(QualityScore, EmptyDocumentIsDropped) {
  auto r = score_document({"d", "", {}, {}}, dict({"peace"}));
  EXPECT_EQ(r.total_words, 0u);
  EXPECT_EQ(r.score, 0.0);
  EXPECT_EQ(r.tier, Tier::Drop);
  EXPECT_EQ(score_document({"d", " -- ... ", {}, {}}, dict({})).total_words, 0u);
}

TEST(QualityScore, ThresholdsAreStrict) {
  const QualityThresholds t;
  EXPECT_EQ(classify(0.5, t), Tier::Keep);
  EXPECT_EQ(classify(0.9, t), Tier::Keep);
  EXPECT_EQ(classify(std::nextafter(0.5, 0.0), t), Tier::Drop);
  EXPECT_EQ(classify(std::nextafter(0.9, 1.0), t), Tier::Correct);
}

TEST(QualityScore, PunctuationCaseAndDigits) {
  auto r = score_document({"d", "\"Peace,\" said the Senator in 2002.", {}, {}}, dict({"peace", "said", "the", "senator"}));
  EXPECT_EQ(r.total_words, 6u);
  EXPECT_EQ(r.in_dictionary, 5u);  // "in" is unknown; "2002" counts as known
}

TEST(Levenshtein, MatchesReferenceOnRandomPairs) {
  std::mt19937_64 rng(42);
  for (int i = 0; i < 2000; ++i) {
    const auto a = random_word(rng, 7), b = random_word(rng, 7);
    const std::size_t full = reference_levenshtein(a, b);
    for (std::size_t bound : {0u, 1u, 2u, 3u, 10u})
      ASSERT_EQ(bounded_levenshtein(a, b, bound), std::min(full, bound + 1)) << utf8(a) << " / " << utf8(b);
  }
}

TEST(Correction, KnownWordUnchanged) {
  auto out = correct_document({"d", "peace", {}, {}}, dict({"peace", "piece"}));
  EXPECT_EQ(out.text, "peace");
}

TEST(Correction, NearestCandidateWins) {
  // peqce -> peace is one substitution, peqce -> piece is two
  EXPECT_EQ(reference_levenshtein(U"peqce", U"peace"), 1u);
  EXPECT_EQ(reference_levenshtein(U"peqce", U"piece"), 2u);
  EXPECT_EQ(correct_document({"d", "peqce", {}, {}}, dict({"peace", "piece"})).text, "peace");
}

TEST(Correction, NothingWithinBound) {
  EXPECT_EQ(correct_document({"d", "zzzzzzzz", {}, {}}, dict({"peace", "piece"}), 2).text, "zzzzzzzz");
}

TEST(Correction, PreservesSurroundings) {
  auto out = correct_document({"d", "  \"Wrold\" peqce!\n", {}, {}}, dict({"peace", "world"}));
  EXPECT_EQ(out.text, "  \"world\" peace!\n");
}

TEST(Correction, TiesGoToLexicographicallySmallest) {
  EXPECT_EQ(correct_document({"d", "cat", {}, {}}, dict({"hat", "bat"}), 1).text, "bat");
}

TEST(Correction, SuggestAgreesWithBruteForce) {
  std::mt19937_64 rng(7);
  for (int round = 0; round < 200; ++round) {
    std::vector<std::string> ws;
    for (int i = 0; i < 15; ++i) {
      auto w = random_word(rng, 6);
      if (!w.empty()) ws.push_back(utf8(w));
    }
    const auto d = dict(ws);
    const SpellCorrector corrector(d, 2);
    const auto query = random_word(rng, 6);
    std::size_t best = 3;
    std::string expect;
    for (const auto& w : d.words()) {
      const auto dist = reference_levenshtein(query, detail::decode(w));
      if (dist < best || (dist == best && w < expect)) best = dist, expect = w;
    }
    if (best > 2) expect.clear();
    ASSERT_EQ(corrector.suggest(utf8(query)), expect) << utf8(query);
  }
}

TEST(Gate, KeepsExactlyTheNonDropped) {
  Corpus docs;
  const auto d = dict({"peace"});
  // 26 of 100 documents below 0.5
  for (int i = 0; i < 100; ++i) docs.push_back({"d" + std::to_string(i), i < 26 ? words(4, 6) : words(7, 3), {}, {}});
  auto g = gate_corpus(docs, d);
  ASSERT_EQ(g.kept.size(), 74u);
  for (const auto& k : g.kept) EXPECT_GE(std::stoi(k.id.substr(1)), 26);
}

TEST(Gate, OnlyCorrectTierIsCorrected) {
  const auto d = dict({"peace", "world", "for", "all", "the", "people", "of", "and", "a", "in", "time", "our",
                       "let", "be", "there", "on", "earth", "with", "me", "it", "begin"});
  Corpus docs{
      // 22 words, 21 known -> Correct; the typo is fixed
      {"hi", "let there be peace on earth and let it begin with me in our time for all the people of the wrold", {}, {}},
      // 10 words, 8 known -> Keep; the typos stay
      {"mid", "peace on earth for all the peple of the wrold", {}, {}},
  };
  auto g = gate_corpus(docs, d);
  EXPECT_EQ(g.reports[0].tier, Tier::Correct);
  EXPECT_EQ(g.reports[1].tier, Tier::Keep);
  EXPECT_NE(g.kept[0].text.find("the world"), std::string::npos);
  EXPECT_EQ(g.kept[1].text, docs[1].text);
}

TEST(Gate, EnglishCorpusDropsNothing) {
  const auto d = dict({"peace", "world"});
  Corpus docs{{"a", "peace world", {}, {}}, {"b", "World, peace.", {}, {}}};
  auto g = gate_corpus(docs, d);
  EXPECT_EQ(g.kept.size(), 2u);
  for (const auto& r : g.reports) EXPECT_NE(r.tier, Tier::Drop);
}

TEST(Gate, InvalidThresholds) {
  try {
    gate_corpus({}, dict({}), {0.6, 0.5});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::InvalidThresholds);
  }
}

TEST(Gate, ThreadCountDoesNotChangeResults) {
  const auto d = dict({"peace", "world", "war"});
  Corpus docs;
  for (int i = 0; i < 50; ++i)
    docs.push_back({"d" + std::to_string(i), std::string(i % 3 ? "peace world war wrld" : "xx yy peace"), {}, {}});
  auto a = gate_corpus(docs, d, {}, 2, 1);
  auto b = gate_corpus(docs, d, {}, 2, 4);
  EXPECT_EQ(a.kept, b.kept);
  EXPECT_EQ(a.reports, b.reports);
}

TEST(Gate, ReportCsv) {
  std::ostringstream s;
  write_quality_csv(s, {score_document({"a,b", words(1, 1), {}, {}}, dict({"peace"}))});
  EXPECT_EQ(s.str(), "doc_id,total_words,in_dictionary,score,tier\n\"a,b\",2,1,0.5,Keep\n");
}
