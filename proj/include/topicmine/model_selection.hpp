#pragma once

// Topic-count selection metrics and the per-K comparison report.
//
//   Griffiths2004  log harmonic mean of Gibbs samples of P(w | z)   maximise
//   CaoJuan2009    mean pairwise cosine similarity of beta rows     minimise
//   Arun2010       symmetric KL between normalised singular values  minimise
//                  of beta and length-weighted topic mass
//   Deveaud2014    mean pairwise Jensen-Shannon divergence (bits)   maximise

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <functional>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

#include "topicmine/error.hpp"
#include "topicmine/format.hpp"
#include "topicmine/lda.hpp"
#include "topicmine/parallel.hpp"
#include "topicmine/text_prep.hpp"

namespace topicmine {

enum class Metric { Griffiths2004, CaoJuan2009, Arun2010, Deveaud2014 };
enum class Direction { Minimize, Maximize };

inline constexpr std::array<Metric, 4> kAllMetrics{Metric::Griffiths2004, Metric::CaoJuan2009, Metric::Arun2010,
                                                   Metric::Deveaud2014};

constexpr std::string_view to_string(Metric m) noexcept {
  switch (m) {
    case Metric::Griffiths2004: return "Griffiths2004";
    case Metric::CaoJuan2009: return "CaoJuan2009";
    case Metric::Arun2010: return "Arun2010";
    case Metric::Deveaud2014: return "Deveaud2014";
  }
  return "?";
}

constexpr std::string_view to_string(Direction d) noexcept { return d == Direction::Minimize ? "minimize" : "maximize"; }

constexpr Direction direction_of(Metric m) noexcept {
  return (m == Metric::CaoJuan2009 || m == Metric::Arun2010) ? Direction::Minimize : Direction::Maximize;
}

namespace metric_detail {

inline void require_topics(const LdaModel& model) {
  if (model.num_topics() < 2) throw Error(Errc::InvalidConfig, "metric needs at least 2 topics");
}

inline double kl(std::span<const double> p, std::span<const double> q, double floor) {
  double s = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    const double a = std::max(p[i], floor), b = std::max(q[i], floor);
    s += a * std::log(a / b);
  }
  return s;
}

}  // namespace metric_detail

inline double cosine_similarity(std::span<const double> a, std::span<const double> b) {
  double dot = 0.0, na = 0.0, nb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    dot += a[i] * b[i];
    na += a[i] * a[i];
    nb += b[i] * b[i];
  }
  if (na == 0.0 || nb == 0.0) throw Error(Errc::DegenerateTopics, "topic row with zero norm");
  return dot / std::sqrt(na * nb);
}

/// Jensen-Shannon divergence in bits; lies in [0, 1].
inline double jensen_shannon(std::span<const double> p, std::span<const double> q) {
  double s = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    const double m = 0.5 * (p[i] + q[i]);
    if (p[i] > 0.0) s += p[i] * std::log2(p[i] / m);
    if (q[i] > 0.0) s += q[i] * std::log2(q[i] / m);
  }
  return std::clamp(0.5 * s, 0.0, 1.0);
}

inline double symmetric_kl(std::span<const double> p, std::span<const double> q, double floor = 1e-12) {
  if (p.size() != q.size()) throw Error(Errc::DimensionMismatch, "distributions differ in length");
  return metric_detail::kl(p, q, floor) + metric_detail::kl(q, p, floor);
}

inline double metric_cao_juan(const LdaModel& model) {
  metric_detail::require_topics(model);
  const std::size_t K = model.num_topics();
  double total = 0.0;
  for (std::size_t i = 0; i < K; ++i)
    for (std::size_t j = i + 1; j < K; ++j) total += cosine_similarity(model.beta.row(i), model.beta.row(j));
  return total / static_cast<double>(K * (K - 1) / 2);
}

inline double metric_deveaud(const LdaModel& model) {
  metric_detail::require_topics(model);
  const std::size_t K = model.num_topics();
  double total = 0.0;
  for (std::size_t i = 0; i < K; ++i)
    for (std::size_t j = i + 1; j < K; ++j) total += jensen_shannon(model.beta.row(i), model.beta.row(j));
  return total / static_cast<double>(K * (K - 1) / 2);
}

/// Singular values of beta, descending, normalised to sum to one.
inline std::vector<double> normalized_singular_values(const Matrix& beta) {
  const auto K = static_cast<Eigen::Index>(beta.rows()), V = static_cast<Eigen::Index>(beta.cols());
  Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>> b(beta.data().data(), K, V);
  // Eigenvalues of the K x K Gram matrix are the squared singular values.
  const Eigen::MatrixXd gram = b * b.transpose();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(gram, Eigen::EigenvaluesOnly);
  std::vector<double> sv(static_cast<std::size_t>(K));
  for (Eigen::Index i = 0; i < K; ++i) sv[static_cast<std::size_t>(i)] = std::sqrt(std::max(0.0, eig.eigenvalues()(i)));
  std::sort(sv.begin(), sv.end(), std::greater<>());
  double s = 0.0;
  for (double x : sv) s += x;
  for (double& x : sv) x /= s;
  return sv;
}

/// Length-weighted topic mass sum_d len_d * theta_d, normalised and sorted descending.
inline std::vector<double> weighted_topic_mass(const LdaModel& model, const DocTermMatrix& dtm) {
  if (model.num_docs() != dtm.num_docs()) throw Error(Errc::DimensionMismatch, "model rows != document count");
  const Matrix theta = doc_topic_proportions(model);
  std::vector<double> mass(model.num_topics(), 0.0);
  for (std::size_t d = 0; d < dtm.num_docs(); ++d) {
    const double len = static_cast<double>(dtm.doc_length(d));
    for (std::size_t k = 0; k < mass.size(); ++k) mass[k] += len * theta(d, k);
  }
  double s = 0.0;
  for (double x : mass) s += x;
  for (double& x : mass) x /= s;
  std::sort(mass.begin(), mass.end(), std::greater<>());
  return mass;
}

inline double metric_arun(const LdaModel& model, const DocTermMatrix& dtm) {
  if (model.num_terms() != dtm.num_terms()) throw Error(Errc::DimensionMismatch, "model columns != vocabulary size");
  const auto c1 = normalized_singular_values(model.beta);
  const auto c2 = weighted_topic_mass(model, dtm);
  return symmetric_kl(c1, c2);
}

inline double metric_griffiths(const DocTermMatrix& dtm, const LdaConfig& config, const GibbsChain& chain) {
  const auto fit = fit_gibbs(dtm, config, chain);
  return log_harmonic_mean(fit.log_likelihoods);
}

struct MetricSeries {
  Metric metric;
  std::vector<double> raw;
  std::vector<double> rescaled;

  Direction direction() const noexcept { return direction_of(metric); }
};

struct MetricReport {
  std::vector<std::size_t> ks;
  std::vector<MetricSeries> series;  // one per metric, in kAllMetrics order

  const MetricSeries& get(Metric m) const {
    for (const auto& s : series)
      if (s.metric == m) return s;
    throw Error(Errc::InvalidConfig, "metric not in report");
  }
};

/// (v - min) / (max - min); an all-equal series maps to zeros.
inline std::vector<double> rescale(std::span<const double> v) {
  std::vector<double> out(v.size(), 0.0);
  if (v.empty()) return out;
  const auto [lo, hi] = std::minmax_element(v.begin(), v.end());
  const double range = *hi - *lo;
  if (range > 0.0)
    for (std::size_t i = 0; i < v.size(); ++i) out[i] = (v[i] - *lo) / range;
  return out;
}

struct SelectKOptions {
  LdaConfig base;                // k and alpha are overridden per candidate
  std::optional<double> alpha;   // fixed alpha; otherwise 50 / k
  GibbsChain chain;
  unsigned threads = 1;          // candidates fitted concurrently
};

/// Deterministic per-(seed, k, stream) seed via splitmix64.
inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t k, std::uint64_t stream) {
  std::uint64_t z = base ^ (k * 0x9E3779B97F4A7C15ULL) ^ (stream * 0xD1B54A32D192ED03ULL);
  z += 0x9E3779B97F4A7C15ULL;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

inline MetricReport select_k(const DocTermMatrix& dtm, const std::vector<std::size_t>& ks, const SelectKOptions& opts) {
  if (ks.empty()) throw Error(Errc::InvalidConfig, "empty K grid");
  for (auto k : ks)
    if (k < 2) throw Error(Errc::InvalidConfig, "every K must be >= 2, got " + std::to_string(k));

  std::vector<std::array<double, 4>> values(ks.size());
  parallel_for(ks.size(), opts.threads, [&](std::size_t i) {
    const std::size_t k = ks[i];
    LdaConfig cfg = opts.base;
    cfg.k = k;
    cfg.alpha = opts.alpha.value_or(50.0 / static_cast<double>(k));
    cfg.seed = derive_seed(opts.base.seed, k, 1);
    const LdaModel vem = fit_vem(dtm, cfg);
    LdaConfig gibbs_cfg = cfg;
    gibbs_cfg.seed = derive_seed(opts.base.seed, k, 2);
    values[i] = {metric_griffiths(dtm, gibbs_cfg, opts.chain), metric_cao_juan(vem), metric_arun(vem, dtm),
                 metric_deveaud(vem)};
  });

  MetricReport report;
  report.ks = ks;
  for (std::size_t m = 0; m < kAllMetrics.size(); ++m) {
    MetricSeries s{kAllMetrics[m], {}, {}};
    for (const auto& row : values) s.raw.push_back(row[m]);
    s.rescaled = rescale(s.raw);
    report.series.push_back(std::move(s));
  }
  return report;
}

inline void write_metric_csv(std::ostream& out, const MetricReport& r) {
  out << "k,metric,raw,rescaled,direction\n";
  for (const auto& s : r.series)
    for (std::size_t i = 0; i < r.ks.size(); ++i)
      out << r.ks[i] << ',' << to_string(s.metric) << ',' << fmt::num(s.raw[i]) << ',' << fmt::num(s.rescaled[i]) << ','
          << to_string(s.direction()) << '\n';
}

/// Long format: one object per (k, metric).
inline nlohmann::json metric_json(const MetricReport& r) {
  auto rows = nlohmann::json::array();
  for (const auto& s : r.series)
    for (std::size_t i = 0; i < r.ks.size(); ++i)
      rows.push_back({{"k", r.ks[i]},
                      {"metric", std::string(to_string(s.metric))},
                      {"raw", s.raw[i]},
                      {"rescaled", s.rescaled[i]},
                      {"direction", std::string(to_string(s.direction()))}});
  return rows;
}

}  // namespace topicmine
