#pragma once

// Latent Dirichlet allocation.
//
// Variational EM (mean field, point-estimated topics):
//   E-step, per document d and vocabulary entry v with count c:
//     phi[v][k]  ∝ beta[k][v] * exp(digamma(gamma[k]))
//     gamma[k]   = alpha + sum_v c * phi[v][k]
//   M-step, per topic k:
//     beta[k][v] ∝ delta - 1 + sum_d c * phi[v][k], never below kFloor
// The objective tracked in elbo_trace is the evidence lower bound plus the
// Dirichlet(delta) log prior on beta, which is the quantity both steps ascend.
//
// Collapsed Gibbs sampling is provided as a diagnostic backend; its samples of
// log P(w | z) feed the harmonic-mean evidence estimate.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <boost/math/special_functions/digamma.hpp>
#include <boost/math/special_functions/gamma.hpp>
#include <json.hpp>

#include "topicmine/error.hpp"
#include "topicmine/matrix.hpp"
#include "topicmine/parallel.hpp"
#include "topicmine/text_prep.hpp"

namespace topicmine {

enum class Backend { Vem, Gibbs };

constexpr std::string_view to_string(Backend b) noexcept { return b == Backend::Vem ? "vem" : "gibbs"; }

struct LdaConfig {
  std::size_t k = 2;
  double alpha = 25.0;
  double delta = 0.1;
  std::size_t max_em_iters = 200;
  double em_tol = 1e-6;
  std::size_t max_e_iters = 100;
  double e_tol = 1e-5;
  std::uint64_t seed = 0;

  /// Defaults for k topics: alpha = 50 / k, delta = 0.1.
  static LdaConfig for_topics(std::size_t k, std::uint64_t seed = 0) {
    LdaConfig c;
    c.k = k;
    c.alpha = 50.0 / static_cast<double>(k);
    c.seed = seed;
    return c;
  }

  friend bool operator==(const LdaConfig&, const LdaConfig&) = default;
};

inline void to_json(nlohmann::json& j, const LdaConfig& c) {
  j = nlohmann::json{{"k", c.k},           {"alpha", c.alpha},   {"delta", c.delta}, {"max_em_iters", c.max_em_iters},
                     {"em_tol", c.em_tol}, {"max_e_iters", c.max_e_iters}, {"e_tol", c.e_tol}, {"seed", c.seed}};
}

inline void from_json(const nlohmann::json& j, LdaConfig& c) {
  LdaConfig d;
  c.k = j.value("k", d.k);
  c.alpha = j.value("alpha", 50.0 / static_cast<double>(std::max<std::size_t>(c.k, 1)));
  c.delta = j.value("delta", d.delta);
  c.max_em_iters = j.value("max_em_iters", d.max_em_iters);
  c.em_tol = j.value("em_tol", d.em_tol);
  c.max_e_iters = j.value("max_e_iters", d.max_e_iters);
  c.e_tol = j.value("e_tol", d.e_tol);
  c.seed = j.value("seed", d.seed);
}

// k = 1 is accepted so the degenerate single-topic fit can be inspected;
// topic-count selection and the CLI require k >= 2.
inline void validate(const LdaConfig& c) {
  auto bad = [](const std::string& what) { return Error(Errc::InvalidConfig, what); };
  if (c.k < 1) throw bad("k must be >= 1");
  if (!(c.alpha > 0.0) || !std::isfinite(c.alpha)) throw bad("alpha must be > 0");
  if (!(c.delta > 0.0) || !std::isfinite(c.delta)) throw bad("delta must be > 0");
  if (c.max_em_iters < 1) throw bad("max_em_iters must be >= 1");
  if (!(c.em_tol > 0.0)) throw bad("em_tol must be > 0");
  if (c.max_e_iters < 1) throw bad("max_e_iters must be >= 1");
  if (!(c.e_tol > 0.0)) throw bad("e_tol must be > 0");
}

struct LdaModel {
  LdaConfig config;
  Matrix beta;   // K x V, rows are P(term | topic)
  Matrix gamma;  // M x K variational Dirichlet parameters
  std::vector<double> elbo_trace;
  Backend backend = Backend::Vem;

  std::size_t num_topics() const noexcept { return beta.rows(); }
  std::size_t num_terms() const noexcept { return beta.cols(); }
  std::size_t num_docs() const noexcept { return gamma.rows(); }

  friend bool operator==(const LdaModel&, const LdaModel&) = default;
};

/// Row d is gamma_d normalised to sum to one.
inline Matrix doc_topic_proportions(const LdaModel& model) {
  Matrix theta = model.gamma;
  for (std::size_t d = 0; d < theta.rows(); ++d) {
    auto row = theta.row(d);
    double s = 0.0;
    for (double g : row) s += g;
    for (double& g : row) g /= s;
  }
  return theta;
}

inline constexpr double kBetaFloor = 1e-12;

namespace lda_detail {

inline double digamma(double x) { return boost::math::digamma(x); }
inline double lgamma(double x) { return boost::math::lgamma(x); }

inline void require_corpus(const DocTermMatrix& dtm) {
  if (dtm.num_docs() == 0 || dtm.num_terms() == 0 || dtm.total_tokens() == 0)
    throw Error(Errc::EmptyCorpus, "document-term matrix has no tokens");
}

// Maximises sum_v weight[v] * log(b[v]) over the simplex with b[v] >= kBetaFloor
// and writes the maximiser to `out`. Non-positive weights sit on the floor.
inline void floored_normalize(std::span<const double> weight, std::span<double> out) {
  const std::size_t n = weight.size();
  std::vector<char> floored(n, 0);
  std::size_t n_floored = 0;
  for (std::size_t v = 0; v < n; ++v)
    if (!(weight[v] > 0.0)) floored[v] = 1, ++n_floored;
  for (;;) {
    if (n_floored == n) {
      std::fill(out.begin(), out.end(), 1.0 / static_cast<double>(n));
      return;
    }
    double free_weight = 0.0;
    for (std::size_t v = 0; v < n; ++v)
      if (!floored[v]) free_weight += weight[v];
    const double mass = 1.0 - static_cast<double>(n_floored) * kBetaFloor;
    bool changed = false;
    for (std::size_t v = 0; v < n; ++v) {
      if (floored[v]) {
        out[v] = kBetaFloor;
      } else {
        out[v] = weight[v] * mass / free_weight;
        if (out[v] < kBetaFloor) floored[v] = 1, ++n_floored, changed = true;
      }
    }
    if (!changed) return;
  }
}

// Expected sufficient statistics -> beta.
inline void m_step(const Matrix& expected_counts, double delta, Matrix& beta) {
  std::vector<double> weight(expected_counts.cols());
  for (std::size_t k = 0; k < beta.rows(); ++k) {
    auto ss = expected_counts.row(k);
    for (std::size_t v = 0; v < weight.size(); ++v) weight[v] = ss[v] + delta - 1.0;
    floored_normalize(weight, beta.row(k));
  }
}

inline double log_beta_prior(const Matrix& beta, double delta) {
  const double v = static_cast<double>(beta.cols());
  double total = 0.0;
  for (std::size_t k = 0; k < beta.rows(); ++k) {
    double s = 0.0;
    for (double b : beta.row(k)) s += std::log(b);
    total += lgamma(v * delta) - v * lgamma(delta) + (delta - 1.0) * s;
  }
  return total;
}

// Mean-field state of one document; phi is (entries x K) row-major.
struct DocState {
  std::vector<double> phi;
  std::vector<double> digamma_gamma;
};

// phi <- normalise(beta[., v] * exp(digamma(gamma))) in log space.
inline void update_phi(const SparseRow& row, std::span<const double> gamma, const Matrix& log_beta, DocState& st) {
  const std::size_t K = gamma.size();
  st.digamma_gamma.resize(K);
  for (std::size_t k = 0; k < K; ++k) st.digamma_gamma[k] = digamma(gamma[k]);
  st.phi.resize(row.size() * K);
  for (std::size_t n = 0; n < row.size(); ++n) {
    double* p = st.phi.data() + n * K;
    double mx = -std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < K; ++k) {
      p[k] = log_beta(k, row[n].term) + st.digamma_gamma[k];
      mx = std::max(mx, p[k]);
    }
    double s = 0.0;
    for (std::size_t k = 0; k < K; ++k) s += (p[k] = std::exp(p[k] - mx));
    for (std::size_t k = 0; k < K; ++k) p[k] /= s;
  }
}

inline double update_gamma(const SparseRow& row, double alpha, const DocState& st, std::span<double> gamma) {
  const std::size_t K = gamma.size();
  double change = 0.0;
  for (std::size_t k = 0; k < K; ++k) {
    double g = alpha;
    for (std::size_t n = 0; n < row.size(); ++n) g += row[n].count * st.phi[n * K + k];
    change += std::abs(g - gamma[k]);
    gamma[k] = g;
  }
  return change / static_cast<double>(K);
}

// Per-document bound L_d(gamma, phi; beta, alpha).
inline double doc_bound(const SparseRow& row, std::span<const double> gamma, const Matrix& log_beta, double alpha,
                        const DocState& st) {
  const std::size_t K = gamma.size();
  double gsum = 0.0;
  for (double g : gamma) gsum += g;
  const double dg_sum = digamma(gsum);
  std::vector<double> elog(K);
  for (std::size_t k = 0; k < K; ++k) elog[k] = digamma(gamma[k]) - dg_sum;

  double bound = lgamma(alpha * static_cast<double>(K)) - static_cast<double>(K) * lgamma(alpha) - lgamma(gsum);
  for (std::size_t k = 0; k < K; ++k) bound += (alpha - gamma[k]) * elog[k] + lgamma(gamma[k]);
  for (std::size_t n = 0; n < row.size(); ++n) {
    const double c = row[n].count;
    for (std::size_t k = 0; k < K; ++k) {
      const double p = st.phi[n * K + k];
      if (p > 0.0) bound += c * p * (elog[k] + log_beta(k, row[n].term) - std::log(p));
    }
  }
  return bound;
}

// Coordinate ascent on one document from the given gamma; leaves phi
// consistent with the final gamma and returns the document bound.
inline double e_step(const SparseRow& row, std::span<double> gamma, const Matrix& log_beta, const LdaConfig& config,
                     DocState& st) {
  for (std::size_t it = 0; it < config.max_e_iters; ++it) {
    update_phi(row, gamma, log_beta, st);
    if (update_gamma(row, config.alpha, st, gamma) < config.e_tol) break;
  }
  update_phi(row, gamma, log_beta, st);
  return doc_bound(row, gamma, log_beta, config.alpha, st);
}

inline Matrix log_of(const Matrix& m) {
  Matrix out = m;
  for (double& x : out.data()) x = std::log(x);
  return out;
}

}  // namespace lda_detail

/// Bound evaluated at (beta, gamma) with phi recomputed from gamma.
inline double elbo(const DocTermMatrix& dtm, const LdaModel& model, unsigned threads = 1) {
  if (model.backend != Backend::Vem) throw Error(Errc::InvalidConfig, "elbo requires a VEM model");
  if (model.num_docs() != dtm.num_docs() || model.num_terms() != dtm.num_terms())
    throw Error(Errc::DimensionMismatch, "model does not match document-term matrix");
  const Matrix log_beta = lda_detail::log_of(model.beta);
  std::vector<double> per_doc(dtm.num_docs());
  parallel_for(dtm.num_docs(), threads, [&](std::size_t d) {
    lda_detail::DocState st;
    lda_detail::update_phi(dtm.rows[d], model.gamma.row(d), log_beta, st);
    per_doc[d] = lda_detail::doc_bound(dtm.rows[d], model.gamma.row(d), log_beta, model.config.alpha, st);
  });
  double total = lda_detail::log_beta_prior(model.beta, model.config.delta);
  for (double x : per_doc) total += x;
  if (!std::isfinite(total)) throw Error(Errc::NonFiniteValue, "elbo is not finite");
  return total;
}

struct FitOptions {
  unsigned threads = 1;
  // Called after every EM iteration with the iteration index and the model
  // state the newest trace entry was evaluated at.
  std::function<void(std::size_t, const LdaModel&)> on_iteration = {};
};

inline LdaModel fit_vem(const DocTermMatrix& dtm, const LdaConfig& config, const FitOptions& opts = {}) {
  validate(config);
  lda_detail::require_corpus(dtm);
  const std::size_t K = config.k, V = dtm.num_terms(), M = dtm.num_docs();

  LdaModel model;
  model.config = config;
  model.backend = Backend::Vem;
  model.beta = Matrix(K, V);
  model.gamma = Matrix(M, K);

  // Random start: each token position draws phi ~ Dirichlet(1, ..., 1); tokens
  // sharing a vocabulary entry are averaged since the updates only see sums.
  std::vector<lda_detail::DocState> states(M);
  {
    std::mt19937_64 rng(config.seed);
    std::gamma_distribution<double> unit_gamma(1.0, 1.0);
    std::vector<double> draw(K);
    for (std::size_t d = 0; d < M; ++d) {
      const auto& row = dtm.rows[d];
      auto& phi = states[d].phi;
      phi.assign(row.size() * K, 0.0);
      for (std::size_t n = 0; n < row.size(); ++n) {
        for (std::uint32_t t = 0; t < row[n].count; ++t) {
          double s = 0.0;
          for (auto& x : draw) s += (x = unit_gamma(rng));
          for (std::size_t k = 0; k < K; ++k) phi[n * K + k] += draw[k] / s;
        }
        for (std::size_t k = 0; k < K; ++k) phi[n * K + k] /= row[n].count;
      }
      lda_detail::update_gamma(row, config.alpha, states[d], model.gamma.row(d));
    }
  }

  Matrix expected(K, V);
  auto accumulate = [&] {
    std::fill(expected.data().begin(), expected.data().end(), 0.0);
    for (std::size_t d = 0; d < M; ++d) {
      const auto& row = dtm.rows[d];
      const auto& phi = states[d].phi;
      for (std::size_t n = 0; n < row.size(); ++n)
        for (std::size_t k = 0; k < K; ++k) expected(k, row[n].term) += row[n].count * phi[n * K + k];
    }
  };

  std::vector<double> per_doc(M);
  for (std::size_t iter = 0; iter < config.max_em_iters; ++iter) {
    accumulate();
    lda_detail::m_step(expected, config.delta, model.beta);
    const Matrix log_beta = lda_detail::log_of(model.beta);

    parallel_for(M, opts.threads, [&](std::size_t d) {
      const auto& row = dtm.rows[d];
      auto gamma = model.gamma.row(d);
      // Warm start from the previous gamma (never lowers the bound) and a
      // cold start from alpha + N/K (lets a document leave a topic it locked
      // onto); keep whichever reaches the higher bound.
      std::vector<double> cold(K, config.alpha + static_cast<double>(dtm.doc_length(d)) / static_cast<double>(K));
      lda_detail::DocState cold_state;
      const double warm_bound = lda_detail::e_step(row, gamma, log_beta, config, states[d]);
      const double cold_bound = lda_detail::e_step(row, cold, log_beta, config, cold_state);
      if (cold_bound > warm_bound) {
        std::copy(cold.begin(), cold.end(), gamma.begin());
        states[d] = std::move(cold_state);
        per_doc[d] = cold_bound;
      } else {
        per_doc[d] = warm_bound;
      }
    });

    double bound = lda_detail::log_beta_prior(model.beta, config.delta);
    for (double x : per_doc) bound += x;
    if (!std::isfinite(bound))
      throw Error(Errc::NonFiniteValue, "elbo is not finite at EM iteration " + std::to_string(iter));
    model.elbo_trace.push_back(bound);
    if (opts.on_iteration) opts.on_iteration(iter, model);

    if (iter > 0) {
      const double prev = model.elbo_trace[iter - 1];
      if ((bound - prev) / std::abs(prev) < config.em_tol) break;
    }
  }
  return model;
}

// --- collapsed Gibbs ----------------------------------------------------------

struct TopicAssignmentState {
  std::vector<std::vector<std::uint32_t>> z;       // per document, per token
  std::vector<std::vector<std::uint32_t>> words;   // term index of each token
  std::vector<std::uint32_t> topic_term_counts;    // K x V row-major
  std::vector<std::uint32_t> doc_topic_counts;     // M x K row-major
  std::vector<std::uint32_t> topic_totals;         // K
};

struct GibbsChain {
  std::size_t burn_in = 1000;
  std::size_t samples = 100;
  std::size_t thin = 10;
};

inline void to_json(nlohmann::json& j, const GibbsChain& c) {
  j = nlohmann::json{{"burn_in", c.burn_in}, {"samples", c.samples}, {"thin", c.thin}};
}

inline void from_json(const nlohmann::json& j, GibbsChain& c) {
  GibbsChain d;
  c.burn_in = j.value("burn_in", d.burn_in);
  c.samples = j.value("samples", d.samples);
  c.thin = j.value("thin", d.thin);
}

class GibbsSampler {
 public:
  GibbsSampler(const DocTermMatrix& dtm, const LdaConfig& config)
      : config_(config), V_(dtm.num_terms()), rng_(config.seed), prob_(config.k) {
    validate(config);
    lda_detail::require_corpus(dtm);
    const std::size_t K = config.k, M = dtm.num_docs();
    s_.topic_term_counts.assign(K * V_, 0);
    s_.doc_topic_counts.assign(M * K, 0);
    s_.topic_totals.assign(K, 0);
    s_.z.resize(M);
    s_.words.resize(M);
    std::uniform_int_distribution<std::uint32_t> pick(0, static_cast<std::uint32_t>(K - 1));
    for (std::size_t d = 0; d < M; ++d) {
      for (const auto& e : dtm.rows[d]) {
        for (std::uint32_t t = 0; t < e.count; ++t) {
          const std::uint32_t k = pick(rng_);
          s_.words[d].push_back(e.term);
          s_.z[d].push_back(k);
          ++s_.topic_term_counts[k * V_ + e.term];
          ++s_.doc_topic_counts[d * K + k];
          ++s_.topic_totals[k];
        }
      }
    }
  }

  void sweep() {
    const std::size_t K = config_.k;
    const double alpha = config_.alpha, delta = config_.delta, vdelta = static_cast<double>(V_) * delta;
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    for (std::size_t d = 0; d < s_.z.size(); ++d) {
      std::uint32_t* ndk = s_.doc_topic_counts.data() + d * K;
      for (std::size_t i = 0; i < s_.z[d].size(); ++i) {
        const std::uint32_t w = s_.words[d][i];
        std::uint32_t k = s_.z[d][i];
        --ndk[k];
        --s_.topic_term_counts[k * V_ + w];
        --s_.topic_totals[k];
        double total = 0.0;
        for (std::size_t j = 0; j < K; ++j) {
          total += (ndk[j] + alpha) * (s_.topic_term_counts[j * V_ + w] + delta) / (s_.topic_totals[j] + vdelta);
          prob_[j] = total;
        }
        const double u = unif(rng_) * total;
        k = static_cast<std::uint32_t>(std::upper_bound(prob_.begin(), prob_.end(), u) - prob_.begin());
        if (k >= K) k = static_cast<std::uint32_t>(K - 1);
        s_.z[d][i] = k;
        ++ndk[k];
        ++s_.topic_term_counts[k * V_ + w];
        ++s_.topic_totals[k];
      }
    }
  }

  /// log P(w | z) with topics integrated out under Dirichlet(delta).
  double log_likelihood() const {
    const std::size_t K = config_.k;
    const double delta = config_.delta, vdelta = static_cast<double>(V_) * delta;
    const double lg_delta = lda_detail::lgamma(delta);
    double ll = static_cast<double>(K) * (lda_detail::lgamma(vdelta) - static_cast<double>(V_) * lg_delta);
    for (std::size_t k = 0; k < K; ++k) {
      for (std::size_t v = 0; v < V_; ++v) {
        const std::uint32_t n = s_.topic_term_counts[k * V_ + v];
        ll += n == 0 ? lg_delta : lda_detail::lgamma(n + delta);
      }
      ll -= lda_detail::lgamma(s_.topic_totals[k] + vdelta);
    }
    return ll;
  }

  /// Posterior-mean estimates from the current assignment.
  LdaModel model() const {
    const std::size_t K = config_.k, M = s_.z.size();
    LdaModel m;
    m.config = config_;
    m.backend = Backend::Gibbs;
    m.beta = Matrix(K, V_);
    m.gamma = Matrix(M, K);
    const double vdelta = static_cast<double>(V_) * config_.delta;
    for (std::size_t k = 0; k < K; ++k)
      for (std::size_t v = 0; v < V_; ++v)
        m.beta(k, v) = (s_.topic_term_counts[k * V_ + v] + config_.delta) / (s_.topic_totals[k] + vdelta);
    for (std::size_t d = 0; d < M; ++d)
      for (std::size_t k = 0; k < K; ++k) m.gamma(d, k) = config_.alpha + s_.doc_topic_counts[d * K + k];
    return m;
  }

  const TopicAssignmentState& state() const noexcept { return s_; }

 private:
  LdaConfig config_;
  std::size_t V_;
  std::mt19937_64 rng_;
  std::vector<double> prob_;
  TopicAssignmentState s_;
};

struct GibbsFit {
  LdaModel model;
  std::vector<double> log_likelihoods;  // retained samples of log P(w | z)
};

inline GibbsFit fit_gibbs(const DocTermMatrix& dtm, const LdaConfig& config, const GibbsChain& chain) {
  if (chain.samples < 1) throw Error(Errc::InvalidConfig, "samples must be >= 1");
  if (chain.thin < 1) throw Error(Errc::InvalidConfig, "thin must be >= 1");
  GibbsSampler sampler(dtm, config);
  for (std::size_t i = 0; i < chain.burn_in; ++i) sampler.sweep();
  GibbsFit fit;
  fit.log_likelihoods.reserve(chain.samples);
  for (std::size_t s = 0; s < chain.samples; ++s) {
    for (std::size_t t = 0; t < chain.thin; ++t) sampler.sweep();
    fit.log_likelihoods.push_back(sampler.log_likelihood());
  }
  fit.model = sampler.model();
  return fit;
}

/// log of the harmonic mean of exp(log_likelihoods), via log-sum-exp.
inline double log_harmonic_mean(std::span<const double> log_likelihoods) {
  if (log_likelihoods.empty()) throw Error(Errc::InvalidConfig, "harmonic mean of no samples");
  double mx = -std::numeric_limits<double>::infinity();
  for (double l : log_likelihoods) mx = std::max(mx, -l);
  double s = 0.0;
  for (double l : log_likelihoods) s += std::exp(-l - mx);
  return std::log(static_cast<double>(log_likelihoods.size())) - (mx + std::log(s));
}

}  // namespace topicmine
