#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "topicmine/pipeline.hpp"

namespace fs = std::filesystem;
using namespace topicmine;

int main(int argc, char** argv) {
  CLI::App app{"Corpus mining: quality gate, preprocessing, LDA topic models and summaries"};
  app.require_subcommand(1);
  app.fallthrough();
  app.set_version_flag("--version", std::string(kVersion));

  std::optional<std::string> config_path, out_dir, corpus, model, dictionary;
  std::optional<std::uint64_t> seed;
  std::optional<unsigned> threads;
  std::optional<std::size_t> k;
  app.add_option("--config", config_path, "JSON pipeline configuration");
  app.add_option("--seed", seed, "random seed (overrides config)");
  app.add_option("--out-dir", out_dir, "output root; each command writes <out-dir>/<command>/");
  app.add_option("--threads", threads, "worker threads (results do not depend on it)")->check(CLI::PositiveNumber);

  struct Sub {
    Command cmd;
    const char* help;
  };
  const Sub subs[] = {
      {Command::Quality, "score documents against a dictionary, drop/keep/correct"},
      {Command::Prep, "tokenize, remove stop words, stem, write the document-term matrix"},
      {Command::Fit, "fit an LDA model by variational EM"},
      {Command::SelectK, "compare topic counts with four metrics"},
      {Command::Analyze, "top terms, topic proportions, word importance and frequencies"},
      {Command::Timeline, "document volume, busiest days and topic prevalence over time"},
  };
  std::optional<Command> chosen;
  for (const auto& s : subs) {
    auto* sc = app.add_subcommand(std::string(to_string(s.cmd)), s.help);
    sc->add_option("--corpus", corpus, "corpus path (overrides config)");
    if (s.cmd == Command::Quality) sc->add_option("--dictionary", dictionary, "dictionary word list");
    if (s.cmd == Command::Fit || s.cmd == Command::Analyze || s.cmd == Command::Timeline)
      sc->add_option("--k", k, "number of topics");
    if (s.cmd == Command::Analyze || s.cmd == Command::Timeline)
      sc->add_option("--model", model, "model archive from `fit`; fitted on the fly when absent");
    sc->callback([&chosen, cmd = s.cmd] { chosen = cmd; });
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitConfig;
  }

  PipelineConfig config;
  try {
    if (config_path) config = load_pipeline_config(*config_path);
    else config = parse_pipeline_config(nlohmann::json::object());
    // flags win over the file
    if (corpus) config.corpus = *corpus;
    if (dictionary) config.dictionary = fs::path(*dictionary);
    if (model) config.model = fs::path(*model);
    if (out_dir) config.out_dir = *out_dir;
    if (seed) config.seed = config.lda.seed = *seed;
    if (threads) config.threads = *threads;
    if (k) {
      // alpha tracks k unless it was set to something other than 50/k
      const bool default_alpha = config.lda.alpha == 50.0 / static_cast<double>(config.lda.k);
      config.lda.k = *k;
      if (default_alpha && *k > 0) config.lda.alpha = 50.0 / static_cast<double>(*k);
    }
  } catch (const Error& e) {
    std::cerr << "topicmine: " << e.what() << '\n';
    return kExitConfig;
  }
  return run_guarded(*chosen, config, std::cerr);
}
