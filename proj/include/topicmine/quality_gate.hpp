#pragma once

// Dictionary hit-rate scoring of OCR output, tier routing, and edit-distance
// spelling correction for the high tier.

#include <algorithm>
#include <cstddef>
#include <map>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "topicmine/corpus_io.hpp"
#include "topicmine/error.hpp"
#include "topicmine/format.hpp"
#include "topicmine/parallel.hpp"
#include "topicmine/unicode.hpp"

namespace topicmine {

enum class Tier { Drop, Keep, Correct };

constexpr std::string_view to_string(Tier t) noexcept {
  switch (t) {
    case Tier::Drop: return "Drop";
    case Tier::Keep: return "Keep";
    case Tier::Correct: return "Correct";
  }
  return "?";
}

struct QualityThresholds {
  double low = 0.5;
  double high = 0.9;

  bool valid() const noexcept { return 0.0 <= low && low <= high && high <= 1.0; }
};

struct QualityReport {
  std::string doc_id;
  std::size_t total_words = 0;
  std::size_t in_dictionary = 0;
  double score = 0.0;
  Tier tier = Tier::Drop;

  friend bool operator==(const QualityReport&, const QualityReport&) = default;
};

// Both bounds are strict: a score equal to either threshold lands in Keep.
constexpr Tier classify(double score, const QualityThresholds& t) noexcept {
  if (score < t.low) return Tier::Drop;
  if (score > t.high) return Tier::Correct;
  return Tier::Keep;
}

namespace detail {

// Byte range of a whitespace-delimited chunk with edge punctuation peeled
// off. Pure-punctuation chunks produce no span.
struct WordSpan {
  std::size_t begin = 0;
  std::size_t end = 0;
};

inline std::vector<WordSpan> word_spans(std::string_view text) {
  struct Cp {
    char32_t c;
    std::size_t off;
    std::size_t len;
  };
  std::vector<WordSpan> spans;
  std::vector<Cp> chunk;
  auto flush = [&] {
    std::size_t b = 0, e = chunk.size();
    while (b < e && unicode::is_punct(chunk[b].c)) ++b;
    while (e > b && unicode::is_punct(chunk[e - 1].c)) --e;
    if (b < e) spans.push_back({chunk[b].off, chunk[e - 1].off + chunk[e - 1].len});
    chunk.clear();
  };
  unicode::for_each_code_point(text, [&](char32_t c, std::size_t off, std::size_t len) {
    if (unicode::is_space(c)) {
      flush();
    } else {
      chunk.push_back({c, off, len});
    }
  });
  flush();
  return spans;
}

inline bool all_digits(std::string_view w) {
  bool ok = !w.empty();
  unicode::for_each_code_point(w, [&](char32_t c, std::size_t, std::size_t) { ok = ok && unicode::is_digit(c); });
  return ok;
}

inline bool known_word(std::string_view lowered, const WordList& dictionary) {
  return all_digits(lowered) || dictionary.contains(lowered);
}

inline std::u32string decode(std::string_view s) {
  std::u32string out;
  unicode::for_each_code_point(s, [&](char32_t c, std::size_t, std::size_t) { out.push_back(c); });
  return out;
}

}  // namespace detail

/// Levenshtein distance over code points, or `bound + 1` as soon as the
/// distance is known to exceed `bound`.
inline std::size_t bounded_levenshtein(std::u32string_view a, std::u32string_view b, std::size_t bound) {
  const std::size_t n = a.size(), m = b.size();
  if ((n > m ? n - m : m - n) > bound) return bound + 1;
  std::vector<std::size_t> prev(m + 1), cur(m + 1);
  for (std::size_t j = 0; j <= m; ++j) prev[j] = j;
  for (std::size_t i = 1; i <= n; ++i) {
    cur[0] = i;
    std::size_t row_min = cur[0];
    for (std::size_t j = 1; j <= m; ++j) {
      const std::size_t sub = prev[j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1);
      cur[j] = std::min({prev[j] + 1, cur[j - 1] + 1, sub});
      row_min = std::min(row_min, cur[j]);
    }
    if (row_min > bound) return bound + 1;
    std::swap(prev, cur);
  }
  return std::min(prev[m], bound + 1);
}

/// Dictionary lookup plus nearest-word search, with candidates bucketed by
/// code point length so only words within the edit bound are compared.
class SpellCorrector {
 public:
  explicit SpellCorrector(const WordList& dictionary, std::size_t max_edit_distance = 2)
      : dictionary_(&dictionary), max_distance_(max_edit_distance) {
    for (const auto& w : dictionary.words()) {
      // Words that would be re-stripped on a second pass are never offered.
      auto spans = detail::word_spans(w);
      if (spans.size() != 1 || spans[0].begin != 0 || spans[0].end != w.size()) continue;
      auto cps = detail::decode(w);
      by_length_[cps.size()].push_back({w, std::move(cps)});
    }
  }

  bool known(std::string_view lowered) const { return detail::known_word(lowered, *dictionary_); }

  /// Closest dictionary word within the bound: smallest distance first, then
  /// lexicographically smallest. Empty when nothing qualifies.
  std::string suggest(std::string_view lowered) const {
    const auto target = detail::decode(lowered);
    const std::size_t lo = target.size() > max_distance_ ? target.size() - max_distance_ : 0;
    const std::size_t hi = target.size() + max_distance_;
    std::size_t best_d = max_distance_ + 1;
    const std::string* best = nullptr;
    for (auto it = by_length_.lower_bound(lo); it != by_length_.end() && it->first <= hi; ++it) {
      for (const auto& cand : it->second) {
        const std::size_t d = bounded_levenshtein(target, cand.cps, std::min(best_d, max_distance_));
        if (d > max_distance_) continue;
        if (d < best_d || (d == best_d && cand.word < *best)) {
          best_d = d;
          best = &cand.word;
        }
      }
    }
    return best ? *best : std::string{};
  }

  std::size_t max_distance() const noexcept { return max_distance_; }

 private:
  struct Candidate {
    std::string word;
    std::u32string cps;
  };
  const WordList* dictionary_;
  std::size_t max_distance_;
  std::map<std::size_t, std::vector<Candidate>> by_length_;
};

inline QualityReport score_document(const Document& doc, const WordList& dictionary,
                                    const QualityThresholds& thresholds = {}) {
  QualityReport r;
  r.doc_id = doc.id;
  for (const auto& span : detail::word_spans(doc.text)) {
    ++r.total_words;
    const auto word = unicode::to_lower(std::string_view(doc.text).substr(span.begin, span.end - span.begin));
    if (detail::known_word(word, dictionary)) ++r.in_dictionary;
  }
  r.score = r.total_words == 0 ? 0.0 : static_cast<double>(r.in_dictionary) / static_cast<double>(r.total_words);
  r.tier = classify(r.score, thresholds);
  return r;
}

inline Document correct_document(const Document& doc, const SpellCorrector& corrector) {
  Document out = doc;
  out.text.clear();
  std::string_view src = doc.text;
  std::size_t cursor = 0;
  for (const auto& span : detail::word_spans(src)) {
    out.text.append(src.substr(cursor, span.begin - cursor));
    const auto original = src.substr(span.begin, span.end - span.begin);
    const auto word = unicode::to_lower(original);
    std::string replacement;
    if (!corrector.known(word)) replacement = corrector.suggest(word);
    out.text.append(replacement.empty() ? std::string(original) : replacement);
    cursor = span.end;
  }
  out.text.append(src.substr(cursor));
  return out;
}

inline Document correct_document(const Document& doc, const WordList& dictionary, std::size_t max_edit_distance = 2) {
  return correct_document(doc, SpellCorrector(dictionary, max_edit_distance));
}

struct GateResult {
  Corpus kept;
  std::vector<QualityReport> reports;
};

inline GateResult gate_corpus(const Corpus& docs, const WordList& dictionary, const QualityThresholds& thresholds = {},
                              std::size_t max_edit_distance = 2, unsigned threads = 1) {
  if (!thresholds.valid())
    throw Error(Errc::InvalidThresholds,
                "need 0 <= low <= high <= 1, got (" + fmt::num(thresholds.low) + ", " + fmt::num(thresholds.high) + ")");
  const SpellCorrector corrector(dictionary, max_edit_distance);
  std::vector<QualityReport> reports(docs.size());
  std::vector<Document> processed(docs.size());
  parallel_for(docs.size(), threads, [&](std::size_t i) {
    reports[i] = score_document(docs[i], dictionary, thresholds);
    if (reports[i].tier == Tier::Correct) processed[i] = correct_document(docs[i], corrector);
  });
  GateResult result;
  result.reports = std::move(reports);
  for (std::size_t i = 0; i < docs.size(); ++i) {
    switch (result.reports[i].tier) {
      case Tier::Drop: break;
      case Tier::Keep: result.kept.push_back(docs[i]); break;
      case Tier::Correct: result.kept.push_back(std::move(processed[i])); break;
    }
  }
  return result;
}

inline void write_quality_csv(std::ostream& out, const std::vector<QualityReport>& reports) {
  out << "doc_id,total_words,in_dictionary,score,tier\n";
  for (const auto& r : reports) {
    out << fmt::csv_field(r.doc_id) << ',' << r.total_words << ',' << r.in_dictionary << ',' << fmt::num(r.score)
        << ',' << to_string(r.tier) << '\n';
  }
}

}  // namespace topicmine
