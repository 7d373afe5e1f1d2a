#pragma once

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include <json.hpp>

#include "topicmine/corpus_io.hpp"
#include "topicmine/error.hpp"
#include "topicmine/format.hpp"
#include "topicmine/lda.hpp"
#include "topicmine/text_prep.hpp"

namespace topicmine {

using WeightedTerm = std::pair<std::string, double>;

struct TopTerms {
  std::size_t topic = 0;
  std::vector<WeightedTerm> entries;  // beta descending, ties by term
};

namespace analysis_detail {

inline void sort_desc(std::vector<WeightedTerm>& v) {
  std::sort(v.begin(), v.end(), [](const WeightedTerm& a, const WeightedTerm& b) {
    return a.second != b.second ? a.second > b.second : a.first < b.first;
  });
}

}  // namespace analysis_detail

inline std::vector<TopTerms> top_terms(const LdaModel& model, const Vocabulary& vocab, std::size_t n) {
  if (vocab.size() != model.num_terms()) throw Error(Errc::DimensionMismatch, "vocabulary does not match model");
  if (n < 1 || n > vocab.size()) throw Error(Errc::InvalidConfig, "n must be in [1, V]");
  std::vector<TopTerms> out;
  for (std::size_t k = 0; k < model.num_topics(); ++k) {
    std::vector<WeightedTerm> row;
    row.reserve(vocab.size());
    for (std::size_t v = 0; v < vocab.size(); ++v) row.emplace_back(vocab.term(v), model.beta(k, v));
    std::partial_sort(row.begin(), row.begin() + static_cast<std::ptrdiff_t>(n), row.end(),
                      [](const WeightedTerm& a, const WeightedTerm& b) {
                        return a.second != b.second ? a.second > b.second : a.first < b.first;
                      });
    row.resize(n);
    out.push_back({k, std::move(row)});
  }
  return out;
}

/// Token-weighted mean of the document topic proportions.
inline std::vector<double> corpus_topic_proportions(const LdaModel& model, const DocTermMatrix& dtm) {
  if (model.num_docs() != dtm.num_docs()) throw Error(Errc::DimensionMismatch, "model rows != document count");
  const Matrix theta = doc_topic_proportions(model);
  std::vector<double> out(model.num_topics(), 0.0);
  double total = 0.0;
  for (std::size_t d = 0; d < dtm.num_docs(); ++d) {
    const double len = static_cast<double>(dtm.doc_length(d));
    total += len;
    for (std::size_t k = 0; k < out.size(); ++k) out[k] += len * theta(d, k);
  }
  if (total > 0.0)
    for (double& x : out) x /= total;
  return out;
}

/// Argmax topic per document; the lowest index wins ties.
inline std::vector<std::size_t> dominant_topics(const LdaModel& model) {
  std::vector<std::size_t> out(model.num_docs());
  for (std::size_t d = 0; d < out.size(); ++d) {
    const auto row = model.gamma.row(d);
    out[d] = static_cast<std::size_t>(std::max_element(row.begin(), row.end()) - row.begin());
  }
  return out;
}

/// P(w | documents in topic) - P(w | documents outside it), using within-group
/// relative frequencies. Sorted by importance, then term.
inline std::vector<WeightedTerm> word_importance(const DocTermMatrix& dtm, const std::vector<std::size_t>& doc_topics,
                                                 std::size_t topic) {
  if (doc_topics.size() != dtm.num_docs()) throw Error(Errc::DimensionMismatch, "one topic index per document required");
  const std::size_t V = dtm.num_terms();
  std::vector<double> in(V, 0.0), out(V, 0.0);
  double in_total = 0.0, out_total = 0.0;
  std::size_t in_docs = 0;
  for (std::size_t d = 0; d < dtm.num_docs(); ++d) {
    const bool inside = doc_topics[d] == topic;
    in_docs += inside;
    auto& bucket = inside ? in : out;
    double& total = inside ? in_total : out_total;
    for (const auto& e : dtm.rows[d]) {
      bucket[e.term] += e.count;
      total += e.count;
    }
  }
  if (in_docs == 0) throw Error(Errc::EmptyGroup, "no documents assigned to topic " + std::to_string(topic));
  std::vector<WeightedTerm> result;
  result.reserve(V);
  for (std::size_t v = 0; v < V; ++v) {
    const double p_in = in_total > 0.0 ? in[v] / in_total : 0.0;
    const double p_out = out_total > 0.0 ? out[v] / out_total : 0.0;
    result.emplace_back(dtm.vocab.term(v), p_in - p_out);
  }
  analysis_detail::sort_desc(result);
  return result;
}

struct FrequencyTable {
  std::vector<std::pair<std::string, std::uint64_t>> entries;  // count descending, ties by term
  std::string scope_tag;
};

inline FrequencyTable frequency_table(const std::vector<TokenStream>& streams, const WordList& extra_stops,
                                      std::size_t top_n, std::string scope_tag = "all") {
  std::map<std::string, std::uint64_t> counts;
  for (const auto& s : streams)
    for (const auto& t : s.tokens)
      if (!extra_stops.contains(t)) ++counts[t];
  FrequencyTable table;
  table.scope_tag = std::move(scope_tag);
  table.entries.assign(counts.begin(), counts.end());
  std::stable_sort(table.entries.begin(), table.entries.end(),
                   [](const auto& a, const auto& b) { return a.second > b.second; });
  if (table.entries.size() > top_n) table.entries.resize(top_n);
  return table;
}

// --- time series ---------------------------------------------------------------

enum class Period { Day, Week, Month };

constexpr std::string_view to_string(Period p) noexcept {
  switch (p) {
    case Period::Day: return "day";
    case Period::Week: return "week";
    case Period::Month: return "month";
  }
  return "?";
}

inline std::optional<Period> parse_period(std::string_view s) {
  if (s == "day") return Period::Day;
  if (s == "week") return Period::Week;
  if (s == "month") return Period::Month;
  return std::nullopt;
}

/// First day of the period containing `d`. Weeks start on Monday.
inline Date period_start(const Date& d, Period p) {
  using namespace std::chrono;
  switch (p) {
    case Period::Day: return d;
    case Period::Week: {
      const sys_days s{d};
      return Date{s - (weekday{s} - Monday)};
    }
    case Period::Month: return Date{d.year(), d.month(), day{1}};
  }
  return d;
}

struct TimePoint {
  Date date;
  std::vector<double> values;
};

struct TimeSeries {
  Period period = Period::Day;
  std::vector<std::string> columns;  // names of the value-vector entries
  std::vector<TimePoint> points;     // strictly increasing dates
};

struct VolumeSeries {
  TimeSeries series;
  std::size_t undated = 0;
};

/// Documents per calendar day from the first to the last dated document,
/// with zero-filled gaps.
inline VolumeSeries volume_by_day(const Corpus& docs) {
  std::map<Date, std::uint64_t> counts;
  VolumeSeries out;
  for (const auto& d : docs) {
    if (d.date) ++counts[*d.date];
    else ++out.undated;
  }
  if (counts.empty()) throw Error(Errc::NoDatedDocuments, std::to_string(out.undated) + " undated documents");
  out.series.period = Period::Day;
  out.series.columns = {"count"};
  using std::chrono::sys_days;
  const sys_days first{counts.begin()->first}, last{counts.rbegin()->first};
  for (sys_days day = first; day <= last; day += std::chrono::days{1}) {
    auto it = counts.find(Date{day});
    out.series.points.push_back({Date{day}, {it == counts.end() ? 0.0 : static_cast<double>(it->second)}});
  }
  return out;
}

/// The n busiest days, count descending, earlier date first on ties.
inline std::vector<std::pair<Date, double>> top_active_days(const TimeSeries& series, std::size_t n) {
  std::vector<std::pair<Date, double>> days;
  for (const auto& p : series.points) {
    if (p.values.size() != 1) throw Error(Errc::DimensionMismatch, "top_active_days needs a scalar series");
    days.emplace_back(p.date, p.values[0]);
  }
  std::stable_sort(days.begin(), days.end(), [](const auto& a, const auto& b) { return a.second > b.second; });
  if (days.size() > n) days.resize(n);
  return days;
}

/// Dates for each matrix row, looked up by document id.
inline std::vector<std::optional<Date>> row_dates(const DocTermMatrix& dtm, const Corpus& docs) {
  std::unordered_map<std::string_view, const Document*> by_id;
  for (const auto& d : docs) by_id.emplace(d.id, &d);
  std::vector<std::optional<Date>> out(dtm.num_docs());
  for (std::size_t r = 0; r < out.size(); ++r)
    if (auto it = by_id.find(dtm.doc_ids[r]); it != by_id.end()) out[r] = it->second->date;
  return out;
}

/// Token-weighted mean topic proportions per period; periods without
/// documents are omitted.
inline TimeSeries topic_prevalence_over_time(const LdaModel& model, const DocTermMatrix& dtm,
                                             const std::vector<std::optional<Date>>& dates, Period period) {
  if (dates.size() != dtm.num_docs() || model.num_docs() != dtm.num_docs())
    throw Error(Errc::DimensionMismatch, "dates, model and matrix rows must align");
  const Matrix theta = doc_topic_proportions(model);
  const std::size_t K = model.num_topics();
  struct Acc {
    std::vector<double> mass;
    double tokens = 0.0;
  };
  std::map<Date, Acc> buckets;
  for (std::size_t d = 0; d < dates.size(); ++d) {
    if (!dates[d]) continue;
    auto& acc = buckets[period_start(*dates[d], period)];
    acc.mass.resize(K, 0.0);
    const double len = static_cast<double>(dtm.doc_length(d));
    acc.tokens += len;
    for (std::size_t k = 0; k < K; ++k) acc.mass[k] += len * theta(d, k);
  }
  if (buckets.empty()) throw Error(Errc::NoDatedDocuments, "no matrix row carries a date");
  TimeSeries ts;
  ts.period = period;
  for (std::size_t k = 0; k < K; ++k) ts.columns.push_back(std::to_string(k));
  for (auto& [date, acc] : buckets) {
    if (acc.tokens <= 0.0) continue;
    for (double& x : acc.mass) x /= acc.tokens;
    ts.points.push_back({date, std::move(acc.mass)});
  }
  return ts;
}

// --- export ----------------------------------------------------------------------

inline void write_top_terms_csv(std::ostream& out, const std::vector<TopTerms>& tables) {
  out << "topic,rank,term,beta\n";
  for (const auto& t : tables)
    for (std::size_t r = 0; r < t.entries.size(); ++r)
      out << t.topic << ',' << r + 1 << ',' << fmt::csv_field(t.entries[r].first) << ',' << fmt::num(t.entries[r].second)
          << '\n';
}

inline nlohmann::json top_terms_json(const std::vector<TopTerms>& tables) {
  auto rows = nlohmann::json::array();
  for (const auto& t : tables)
    for (std::size_t r = 0; r < t.entries.size(); ++r)
      rows.push_back({{"topic", t.topic}, {"rank", r + 1}, {"term", t.entries[r].first}, {"beta", t.entries[r].second}});
  return rows;
}

inline void write_proportions_csv(std::ostream& out, const std::vector<double>& props) {
  out << "topic,proportion\n";
  for (std::size_t k = 0; k < props.size(); ++k) out << k << ',' << fmt::num(props[k]) << '\n';
}

inline nlohmann::json proportions_json(const std::vector<double>& props) {
  auto rows = nlohmann::json::array();
  for (std::size_t k = 0; k < props.size(); ++k) rows.push_back({{"topic", k}, {"proportion", props[k]}});
  return rows;
}

inline void write_importance_csv(std::ostream& out, std::size_t topic, const std::vector<WeightedTerm>& terms,
                                 bool header = true) {
  if (header) out << "topic,term,importance\n";
  for (const auto& [term, v] : terms) out << topic << ',' << fmt::csv_field(term) << ',' << fmt::num(v) << '\n';
}

inline void write_frequency_csv(std::ostream& out, const FrequencyTable& t) {
  out << "scope,term,count\n";
  for (const auto& [term, n] : t.entries) out << fmt::csv_field(t.scope_tag) << ',' << fmt::csv_field(term) << ',' << n << '\n';
}

inline nlohmann::json frequency_json(const FrequencyTable& t) {
  auto rows = nlohmann::json::array();
  for (const auto& [term, n] : t.entries) rows.push_back({{"scope", t.scope_tag}, {"term", term}, {"count", n}});
  return rows;
}

inline void write_timeseries_csv(std::ostream& out, const TimeSeries& ts) {
  out << "date";
  for (const auto& c : ts.columns) out << ',' << fmt::csv_field(c);
  out << '\n';
  for (const auto& p : ts.points) {
    out << format_date(p.date);
    for (double v : p.values) out << ',' << fmt::num(v);
    out << '\n';
  }
}

inline nlohmann::json timeseries_json(const TimeSeries& ts) {
  auto rows = nlohmann::json::array();
  for (const auto& p : ts.points)
    for (std::size_t i = 0; i < p.values.size(); ++i)
      rows.push_back({{"date", format_date(p.date)},
                      {"period", std::string(to_string(ts.period))},
                      {"series", ts.columns.at(i)},
                      {"value", p.values[i]}});
  return rows;
}

inline void write_top_days_csv(std::ostream& out, const std::vector<std::pair<Date, double>>& days) {
  out << "date,count\n";
  for (const auto& [d, n] : days) out << format_date(d) << ',' << fmt::num(n) << '\n';
}

}  // namespace topicmine
