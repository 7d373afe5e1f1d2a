#pragma once

// Randomized fixtures for the analysis property checks: a dated corpus, a
// matching document-term matrix and a model with arbitrary positive gamma.

#include <chrono>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "topicmine/corpus_io.hpp"
#include "topicmine/lda.hpp"
#include "topicmine/text_prep.hpp"

namespace topicmine::synth {

struct AnalysisFixture {
  Corpus docs;
  DocTermMatrix dtm;
  LdaModel model;
  std::size_t dated = 0;
};

inline AnalysisFixture random_fixture(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> n_docs(1, 40), n_topics(2, 8), n_words(1, 25), vocab(3, 30), day_offset(0, 400);
  std::bernoulli_distribution has_date(0.8);
  std::gamma_distribution<double> gamma_draw(0.4, 2.0);

  AnalysisFixture f;
  const int M = n_docs(rng), K = n_topics(rng), V = vocab(rng);
  std::uniform_int_distribution<int> word(0, V - 1);
  const std::chrono::sys_days base{std::chrono::year{2001} / 1 / 1};
  std::vector<TokenStream> streams;
  for (int d = 0; d < M; ++d) {
    Document doc;
    doc.id = "doc" + std::to_string(d);
    for (int i = n_words(rng); i > 0; --i) doc.text += "w" + std::to_string(word(rng)) + " ";
    if (has_date(rng)) {
      doc.date = Date{base + std::chrono::days{day_offset(rng)}};
      ++f.dated;
    }
    streams.push_back(tokenize(doc));
    f.docs.push_back(std::move(doc));
  }
  f.dtm = build_dtm(streams);
  f.model.config.k = static_cast<std::size_t>(K);
  f.model.beta = Matrix(K, f.dtm.num_terms(), 1.0 / static_cast<double>(f.dtm.num_terms()));
  f.model.gamma = Matrix(f.dtm.num_docs(), K);
  for (double& g : f.model.gamma.data()) g = 1e-3 + gamma_draw(rng);
  return f;
}

}  // namespace topicmine::synth
