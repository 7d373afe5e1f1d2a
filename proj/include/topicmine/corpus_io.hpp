#pragma once

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

#include <json.hpp>

#include "topicmine/error.hpp"
#include "topicmine/unicode.hpp"

namespace topicmine {

namespace fs = std::filesystem;

using Date = std::chrono::year_month_day;

/// Parses "YYYY-MM-DD", ignoring anything after the day ("2002-04-11T09:30"
/// is truncated to the day).
inline std::optional<Date> parse_date(std::string_view s) {
  if (s.size() < 10 || s[4] != '-' || s[7] != '-') return std::nullopt;
  if (s.size() > 10 && s[10] != 'T' && s[10] != ' ') return std::nullopt;
  auto field = [&](std::size_t pos, std::size_t len, int& out) {
    const char* first = s.data() + pos;
    const char* last = first + len;
    auto [ptr, ec] = std::from_chars(first, last, out);
    return ec == std::errc{} && ptr == last;
  };
  int y = 0, m = 0, d = 0;
  if (!field(0, 4, y) || !field(5, 2, m) || !field(8, 2, d)) return std::nullopt;
  Date date{std::chrono::year{y}, std::chrono::month{static_cast<unsigned>(m)},
            std::chrono::day{static_cast<unsigned>(d)}};
  if (!date.ok()) return std::nullopt;
  return date;
}

inline std::string format_date(const Date& d) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", static_cast<int>(d.year()),
                static_cast<unsigned>(d.month()), static_cast<unsigned>(d.day()));
  return buf;
}

struct Document {
  std::string id;
  std::string text;
  std::optional<Date> date;
  std::string source_tag;

  friend bool operator==(const Document&, const Document&) = default;
};

using Corpus = std::vector<Document>;

enum class CorpusFormat { JsonLines, DirectoryOfTextFiles };

enum class WordListKind { StopWords, Dictionary };

// Sorted, deduplicated, lowercase words.
class WordList {
 public:
  WordList() = default;
  WordList(std::vector<std::string> words, WordListKind kind) : kind_(kind) {
    for (auto& w : words) w = unicode::to_lower(w);
    std::sort(words.begin(), words.end());
    words.erase(std::unique(words.begin(), words.end()), words.end());
    words_ = std::move(words);
  }

  bool contains(std::string_view w) const { return std::binary_search(words_.begin(), words_.end(), w); }
  const std::vector<std::string>& words() const noexcept { return words_; }
  WordListKind kind() const noexcept { return kind_; }
  std::size_t size() const noexcept { return words_.size(); }
  bool empty() const noexcept { return words_.empty(); }

  // Union with another list of the same kind.
  WordList merged(const WordList& other) const {
    std::vector<std::string> all = words_;
    all.insert(all.end(), other.words_.begin(), other.words_.end());
    return WordList(std::move(all), kind_);
  }

  friend bool operator==(const WordList&, const WordList&) = default;

 private:
  std::vector<std::string> words_;
  WordListKind kind_ = WordListKind::StopWords;
};

namespace detail {

inline std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::UnreadablePath, path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  if (in.bad()) throw Error(Errc::UnreadablePath, path.string());
  return std::move(ss).str();
}

inline std::string_view trim(std::string_view s) {
  constexpr std::string_view ws = " \t\r\n\f\v";
  const auto b = s.find_first_not_of(ws);
  if (b == std::string_view::npos) return {};
  return s.substr(b, s.find_last_not_of(ws) - b + 1);
}

inline Document parse_record(std::string_view line, std::size_t lineno) {
  auto fail = [&](const std::string& why) -> Error {
    return Error(Errc::MalformedRecord, "line " + std::to_string(lineno) + ": " + why);
  };
  nlohmann::json rec;
  try {
    rec = nlohmann::json::parse(line);
  } catch (const nlohmann::json::parse_error& e) {
    throw fail(e.what());
  }
  if (!rec.is_object()) throw fail("record is not a JSON object");
  Document doc;
  auto id = rec.find("id");
  if (id == rec.end() || !id->is_string()) throw fail("missing string field \"id\"");
  doc.id = id->get<std::string>();
  if (doc.id.empty()) throw fail("empty \"id\"");
  auto text = rec.find("text");
  if (text == rec.end() || !text->is_string()) throw fail("missing string field \"text\"");
  doc.text = text->get<std::string>();
  if (auto date = rec.find("date"); date != rec.end() && !date->is_null()) {
    if (!date->is_string()) throw fail("\"date\" must be a string");
    doc.date = parse_date(date->get_ref<const std::string&>());
    if (!doc.date) throw fail("bad date \"" + date->get<std::string>() + "\"");
  }
  if (auto tag = rec.find("source_tag"); tag != rec.end() && !tag->is_null()) {
    if (!tag->is_string()) throw fail("\"source_tag\" must be a string");
    doc.source_tag = tag->get<std::string>();
  }
  return doc;
}

}  // namespace detail

/// Parses a JsonLines corpus from memory. Blank lines are skipped; line
/// numbers in errors are 1-based.
inline Corpus parse_corpus_jsonl(std::string_view content) {
  Corpus docs;
  std::unordered_set<std::string> seen;
  std::size_t lineno = 0;
  std::size_t pos = 0;
  while (pos < content.size()) {
    auto nl = content.find('\n', pos);
    if (nl == std::string_view::npos) nl = content.size();
    const auto line = content.substr(pos, nl - pos);
    pos = nl + 1;
    ++lineno;
    if (detail::trim(line).empty()) continue;
    if (!unicode::is_valid_utf8(line)) throw Error(Errc::NonUtf8Content, "line " + std::to_string(lineno));
    Document doc = detail::parse_record(line, lineno);
    if (!seen.insert(doc.id).second) throw Error(Errc::DuplicateId, doc.id);
    docs.push_back(std::move(doc));
  }
  return docs;
}

inline Corpus load_corpus(const fs::path& path, CorpusFormat format) {
  std::error_code ec;
  if (!fs::exists(path, ec)) throw Error(Errc::UnreadablePath, path.string());

  if (format == CorpusFormat::JsonLines) {
    if (fs::is_directory(path, ec)) throw Error(Errc::UnreadablePath, path.string() + " is a directory");
    return parse_corpus_jsonl(detail::read_file(path));
  }

  if (!fs::is_directory(path, ec)) throw Error(Errc::UnreadablePath, path.string() + " is not a directory");
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(path, ec)) {
    if (entry.is_regular_file() && entry.path().extension() == ".txt") files.push_back(entry.path());
  }
  if (ec) throw Error(Errc::UnreadablePath, path.string());
  std::sort(files.begin(), files.end(),
            [](const fs::path& a, const fs::path& b) { return a.filename().string() < b.filename().string(); });

  Corpus docs;
  docs.reserve(files.size());
  for (const auto& f : files) {
    Document doc;
    doc.id = f.stem().string();
    doc.text = detail::read_file(f);
    if (auto bad = unicode::first_invalid_byte(doc.text))
      throw Error(Errc::NonUtf8Content, f.string() + " at byte " + std::to_string(*bad));
    docs.push_back(std::move(doc));
  }
  return docs;
}

inline std::string to_jsonl(const Document& doc) {
  nlohmann::json rec = {{"id", doc.id}, {"text", doc.text}};
  if (doc.date) rec["date"] = format_date(*doc.date);
  if (!doc.source_tag.empty()) rec["source_tag"] = doc.source_tag;
  return rec.dump(-1, ' ', false, nlohmann::json::error_handler_t::strict);
}

inline void write_corpus_jsonl(std::ostream& out, const Corpus& docs) {
  for (const auto& d : docs) out << to_jsonl(d) << '\n';
}

inline void write_corpus_jsonl(const fs::path& path, const Corpus& docs) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(Errc::UnreadablePath, path.string());
  write_corpus_jsonl(out, docs);
}

/// One word per line; blank lines and "#" comments are skipped.
inline WordList parse_wordlist(std::string_view content, WordListKind kind) {
  if (auto bad = unicode::first_invalid_byte(content))
    throw Error(Errc::NonUtf8Content, "byte " + std::to_string(*bad));
  std::vector<std::string> words;
  std::size_t pos = 0, lineno = 0;
  while (pos < content.size()) {
    auto nl = content.find('\n', pos);
    if (nl == std::string_view::npos) nl = content.size();
    const auto line = detail::trim(content.substr(pos, nl - pos));
    pos = nl + 1;
    ++lineno;
    if (line.empty() || line.front() == '#') continue;
    if (unicode::contains_space(line))
      throw Error(Errc::MalformedRecord, "line " + std::to_string(lineno) + ": word contains whitespace");
    words.emplace_back(line);
  }
  return WordList(std::move(words), kind);
}

inline WordList load_wordlist(const fs::path& path, WordListKind kind) {
  std::error_code ec;
  if (!fs::is_regular_file(path, ec)) throw Error(Errc::UnreadablePath, path.string());
  return parse_wordlist(detail::read_file(path), kind);
}

}  // namespace topicmine
