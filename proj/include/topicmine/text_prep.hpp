#pragma once

#include <algorithm>
#include <cstdint>
#include <istream>
#include <map>
#include <numeric>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "topicmine/corpus_io.hpp"
#include "topicmine/error.hpp"
#include "topicmine/porter.hpp"
#include "topicmine/unicode.hpp"

namespace topicmine {

struct TokenStream {
  std::string doc_id;
  std::vector<std::string> tokens;

  friend bool operator==(const TokenStream&, const TokenStream&) = default;
};

/// Lowercased maximal runs of letters/digits. Apostrophes and hyphens are kept
/// only between two letters/digits; every other character separates tokens.
inline TokenStream tokenize(const Document& doc) {
  TokenStream out{doc.id, {}};
  std::u32string cps;
  unicode::for_each_code_point(doc.text, [&](char32_t c, std::size_t, std::size_t) { cps.push_back(c); });

  std::string current;
  for (std::size_t i = 0; i < cps.size(); ++i) {
    const char32_t c = cps[i];
    if (unicode::is_letter_or_digit(c)) {
      unicode::append(current, unicode::to_lower(c));
    } else if (unicode::is_joiner(c) && !current.empty() && i + 1 < cps.size() &&
               unicode::is_letter_or_digit(cps[i + 1])) {
      current.push_back(c == U'\'' || c == U'’' ? '\'' : '-');
    } else if (!current.empty()) {
      out.tokens.push_back(std::move(current));
      current.clear();
    }
  }
  if (!current.empty()) out.tokens.push_back(std::move(current));
  return out;
}

inline TokenStream remove_stopwords(TokenStream stream, const WordList& stops) {
  std::erase_if(stream.tokens, [&](const std::string& t) { return stops.contains(t); });
  return stream;
}

inline TokenStream stem_stream(TokenStream stream) {
  for (auto& t : stream.tokens) t = stem(t);
  std::erase_if(stream.tokens, [](const std::string& t) { return t.empty(); });
  return stream;
}

/// Contiguous n-token windows joined with a single space.
inline std::vector<std::string> ngrams(const TokenStream& stream, std::size_t n) {
  if (n == 0) throw Error(Errc::InvalidN, "n must be >= 1");
  std::vector<std::string> out;
  if (stream.tokens.size() < n) return out;
  out.reserve(stream.tokens.size() - n + 1);
  for (std::size_t i = 0; i + n <= stream.tokens.size(); ++i) {
    std::string g = stream.tokens[i];
    for (std::size_t j = 1; j < n; ++j) {
      g += ' ';
      g += stream.tokens[i + j];
    }
    out.push_back(std::move(g));
  }
  return out;
}

struct PrepOptions {
  WordList stopwords{{}, WordListKind::StopWords};
  bool stem = true;
};

// tokenize -> stop-word removal -> stem. Stop words are matched before
// stemming, against the surface form.
inline TokenStream prepare(const Document& doc, const PrepOptions& opts) {
  auto s = remove_stopwords(tokenize(doc), opts.stopwords);
  return opts.stem ? stem_stream(std::move(s)) : s;
}

inline std::vector<TokenStream> prepare(const Corpus& docs, const PrepOptions& opts) {
  std::vector<TokenStream> out;
  out.reserve(docs.size());
  for (const auto& d : docs) out.push_back(prepare(d, opts));
  return out;
}

class Vocabulary {
 public:
  Vocabulary() = default;
  // `terms` must be sorted and distinct.
  explicit Vocabulary(std::vector<std::string> terms) : terms_(std::move(terms)) {
    for (std::size_t i = 1; i < terms_.size(); ++i)
      if (!(terms_[i - 1] < terms_[i])) throw Error(Errc::MalformedRecord, "vocabulary not sorted/distinct at " + terms_[i]);
  }

  std::optional<std::uint32_t> index_of(std::string_view term) const {
    auto it = std::lower_bound(terms_.begin(), terms_.end(), term);
    if (it == terms_.end() || *it != term) return std::nullopt;
    return static_cast<std::uint32_t>(it - terms_.begin());
  }
  const std::string& term(std::size_t i) const { return terms_.at(i); }
  const std::vector<std::string>& terms() const noexcept { return terms_; }
  std::size_t size() const noexcept { return terms_.size(); }

  friend bool operator==(const Vocabulary&, const Vocabulary&) = default;

 private:
  std::vector<std::string> terms_;
};

struct TermCount {
  std::uint32_t term = 0;
  std::uint32_t count = 0;

  friend bool operator==(const TermCount&, const TermCount&) = default;
};

using SparseRow = std::vector<TermCount>;  // sorted by term, counts >= 1

struct DocTermMatrix {
  Vocabulary vocab;
  std::vector<SparseRow> rows;
  std::vector<std::string> doc_ids;
  std::vector<std::string> excluded_ids;  // dropped for being shorter than min_doc_length

  std::size_t num_docs() const noexcept { return rows.size(); }
  std::size_t num_terms() const noexcept { return vocab.size(); }

  std::uint64_t doc_length(std::size_t d) const {
    std::uint64_t n = 0;
    for (const auto& e : rows[d]) n += e.count;
    return n;
  }

  std::vector<double> doc_lengths() const {
    std::vector<double> out(rows.size());
    for (std::size_t d = 0; d < rows.size(); ++d) out[d] = static_cast<double>(doc_length(d));
    return out;
  }

  std::uint64_t total_tokens() const {
    std::uint64_t n = 0;
    for (std::size_t d = 0; d < rows.size(); ++d) n += doc_length(d);
    return n;
  }

  friend bool operator==(const DocTermMatrix&, const DocTermMatrix&) = default;
};

struct DtmThresholds {
  std::size_t min_term_count = 1;
  std::size_t min_doc_length = 1;
};

inline DocTermMatrix build_dtm(const std::vector<TokenStream>& streams, const DtmThresholds& t = {}) {
  std::map<std::string_view, std::uint64_t> totals;
  for (const auto& s : streams)
    for (const auto& tok : s.tokens) ++totals[tok];

  std::vector<std::string> terms;
  for (const auto& [term, n] : totals)
    if (n >= t.min_term_count) terms.emplace_back(term);
  if (terms.empty()) throw Error(Errc::EmptyVocabulary, "no term occurs at least " + std::to_string(t.min_term_count) + " times");

  DocTermMatrix dtm;
  dtm.vocab = Vocabulary(std::move(terms));
  std::unordered_map<std::string_view, std::uint32_t> index;
  index.reserve(dtm.vocab.size());
  for (std::size_t i = 0; i < dtm.vocab.size(); ++i) index.emplace(dtm.vocab.term(i), static_cast<std::uint32_t>(i));

  for (const auto& s : streams) {
    std::map<std::uint32_t, std::uint32_t> counts;
    std::size_t retained = 0;
    for (const auto& tok : s.tokens) {
      if (auto it = index.find(tok); it != index.end()) {
        ++counts[it->second];
        ++retained;
      }
    }
    if (retained < t.min_doc_length) {
      dtm.excluded_ids.push_back(s.doc_id);
      continue;
    }
    SparseRow row;
    row.reserve(counts.size());
    for (auto [term, n] : counts) row.push_back({term, n});
    dtm.rows.push_back(std::move(row));
    dtm.doc_ids.push_back(s.doc_id);
  }
  return dtm;
}

// --- serialization -----------------------------------------------------------
//
// Triplet file: header "doc_id term count", then one "doc_id term count" line
// per nonzero cell in row order. Doc ids are percent-encoded for whitespace
// and '%'. The vocabulary sidecar is one term per line in index order.

namespace detail {

inline std::string encode_id(std::string_view id) {
  std::string out;
  for (char c : id) {
    switch (c) {
      case ' ': out += "%20"; break;
      case '\t': out += "%09"; break;
      case '\n': out += "%0A"; break;
      case '\r': out += "%0D"; break;
      case '%': out += "%25"; break;
      default: out += c;
    }
  }
  return out;
}

inline std::string decode_id(std::string_view s) {
  std::string out;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] == '%' && i + 2 < s.size()) {
      unsigned v = 0;
      auto [p, ec] = std::from_chars(s.data() + i + 1, s.data() + i + 3, v, 16);
      if (ec == std::errc{} && p == s.data() + i + 3) {
        out += static_cast<char>(v);
        i += 2;
        continue;
      }
    }
    out += s[i];
  }
  return out;
}

}  // namespace detail

inline void write_vocabulary(std::ostream& out, const Vocabulary& vocab) {
  for (const auto& t : vocab.terms()) out << t << '\n';
}

inline Vocabulary read_vocabulary(std::istream& in) {
  std::vector<std::string> terms;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    terms.push_back(line);
  }
  return Vocabulary(std::move(terms));
}

inline void write_dtm_triplets(std::ostream& out, const DocTermMatrix& dtm) {
  out << "doc_id term count\n";
  for (std::size_t d = 0; d < dtm.rows.size(); ++d) {
    const auto id = detail::encode_id(dtm.doc_ids[d]);
    for (const auto& e : dtm.rows[d]) out << id << ' ' << dtm.vocab.term(e.term) << ' ' << e.count << '\n';
  }
}

/// Rebuilds a matrix from its triplet file and vocabulary sidecar. Row order
/// follows first appearance of each doc id.
inline DocTermMatrix read_dtm_triplets(std::istream& in, Vocabulary vocab) {
  DocTermMatrix dtm;
  dtm.vocab = std::move(vocab);
  std::unordered_map<std::string, std::size_t> row_of;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (lineno == 1) {
      if (line != "doc_id term count") throw Error(Errc::MalformedRecord, "line 1: bad triplet header");
      continue;
    }
    if (line.empty()) continue;
    std::istringstream ls(line);
    std::string id, term;
    std::uint64_t count = 0;
    if (!(ls >> id >> term >> count) || count == 0)
      throw Error(Errc::MalformedRecord, "line " + std::to_string(lineno));
    auto idx = dtm.vocab.index_of(term);
    if (!idx) throw Error(Errc::MalformedRecord, "line " + std::to_string(lineno) + ": unknown term " + term);
    id = detail::decode_id(id);
    auto [it, fresh] = row_of.emplace(id, dtm.rows.size());
    if (fresh) {
      dtm.rows.emplace_back();
      dtm.doc_ids.push_back(id);
    }
    dtm.rows[it->second].push_back({*idx, static_cast<std::uint32_t>(count)});
  }
  for (auto& row : dtm.rows) std::sort(row.begin(), row.end(), [](auto& a, auto& b) { return a.term < b.term; });
  return dtm;
}

}  // namespace topicmine
