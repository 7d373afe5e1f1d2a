#pragma once

// Exact log P(w) for collapsed LDA on toy corpora, by summing over all K^N
// topic assignments:
//   P(w) = sum_z P(w | z) P(z)
//   P(w | z) = prod_k  G(V d) / G(n_k + V d)  prod_v G(n_kv + d) / G(d)
//   P(z)     = prod_d  G(K a) / G(N_d + K a)  prod_k G(n_dk + a) / G(a)
// Uses std::lgamma only; nothing here is shared with the library.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <vector>

namespace topicmine::synth {

// Collapsed log P(w | z) for one assignment; also the oracle for the
// sampler's log_likelihood().
inline double collapsed_log_likelihood(const std::vector<std::vector<std::uint32_t>>& words,
                                       const std::vector<std::vector<std::uint32_t>>& z, std::size_t V, std::size_t K,
                                       double delta) {
  std::vector<std::vector<double>> nkv(K, std::vector<double>(V, 0.0));
  std::vector<double> nk(K, 0.0);
  for (std::size_t d = 0; d < words.size(); ++d)
    for (std::size_t i = 0; i < words[d].size(); ++i) {
      nkv[z[d][i]][words[d][i]] += 1.0;
      nk[z[d][i]] += 1.0;
    }
  double ll = 0.0;
  const double vd = static_cast<double>(V) * delta;
  for (std::size_t k = 0; k < K; ++k) {
    ll += std::lgamma(vd) - std::lgamma(nk[k] + vd);
    for (std::size_t v = 0; v < V; ++v) ll += std::lgamma(nkv[k][v] + delta) - std::lgamma(delta);
  }
  return ll;
}

inline double log_prior_of_assignment(const std::vector<std::vector<std::uint32_t>>& z, std::size_t K, double alpha) {
  double lp = 0.0;
  const double ka = static_cast<double>(K) * alpha;
  for (const auto& zd : z) {
    std::vector<double> ndk(K, 0.0);
    for (auto k : zd) ndk[k] += 1.0;
    lp += std::lgamma(ka) - std::lgamma(static_cast<double>(zd.size()) + ka);
    for (std::size_t k = 0; k < K; ++k) lp += std::lgamma(ndk[k] + alpha) - std::lgamma(alpha);
  }
  return lp;
}

inline double exact_log_evidence(const std::vector<std::vector<std::uint32_t>>& words, std::size_t V, std::size_t K,
                                 double alpha, double delta) {
  std::vector<std::vector<std::uint32_t>> z;
  for (const auto& d : words) z.emplace_back(d.size(), 0);
  std::vector<double> terms;
  for (;;) {
    terms.push_back(collapsed_log_likelihood(words, z, V, K, delta) + log_prior_of_assignment(z, K, alpha));
    // odometer increment over every token's topic
    bool carried = true;
    for (std::size_t d = 0; d < z.size() && carried; ++d)
      for (std::size_t i = 0; i < z[d].size() && carried; ++i) {
        if (++z[d][i] < K) carried = false;
        else z[d][i] = 0;
      }
    if (carried) break;
  }
  const double mx = *std::max_element(terms.begin(), terms.end());
  double s = 0.0;
  for (double t : terms) s += std::exp(t - mx);
  return mx + std::log(s);
}

inline std::size_t assignment_count(const std::vector<std::vector<std::uint32_t>>& words, std::size_t K) {
  std::size_t c = 1;
  for (const auto& d : words)
    for (std::size_t i = 0; i < d.size(); ++i) c *= K;
  return c;
}

}  // namespace topicmine::synth
