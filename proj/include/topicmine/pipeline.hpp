#pragma once

// Subcommand implementations behind the CLI. Each command reads a
// PipelineConfig, writes its files into <out_dir>/<command>/ and finishes
// with manifest.json listing the config hash, input hashes and output hashes.
//
// Exit codes: 0 success, 2 configuration error, 3 data error.

#include <algorithm>
#include <array>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>
#include <openssl/evp.h>

#include "topicmine/analysis.hpp"
#include "topicmine/archive.hpp"
#include "topicmine/corpus_io.hpp"
#include "topicmine/error.hpp"
#include "topicmine/lda.hpp"
#include "topicmine/model_selection.hpp"
#include "topicmine/quality_gate.hpp"
#include "topicmine/text_prep.hpp"
#include "topicmine/version.hpp"

namespace topicmine {

namespace fs = std::filesystem;

enum ExitCode : int { kExitOk = 0, kExitConfig = 2, kExitData = 3 };

/// Which errors are the caller's configuration rather than the data.
inline bool is_config_error(Errc c) noexcept {
  return c == Errc::InvalidConfig || c == Errc::InvalidThresholds || c == Errc::InvalidN;
}

inline std::string sha256_hex(std::string_view bytes) {
  std::array<unsigned char, EVP_MAX_MD_SIZE> md{};
  unsigned len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), md.data(), &len, EVP_sha256(), nullptr) != 1)
    throw std::runtime_error("sha256 failed");
  static constexpr char hex[] = "0123456789abcdef";
  std::string out;
  for (unsigned i = 0; i < len; ++i) {
    out.push_back(hex[md[i] >> 4]);
    out.push_back(hex[md[i] & 0xF]);
  }
  return out;
}

struct AnalysisOptions {
  std::size_t top_n = 10;             // terms per topic
  std::size_t frequency_top_n = 50;   // rows in word-frequency tables
  std::vector<fs::path> extra_stops;  // e.g. salutations, applied to frequency tables
  Period period = Period::Month;
  std::size_t top_days = 10;
};

struct PipelineConfig {
  fs::path corpus;
  CorpusFormat corpus_format = CorpusFormat::JsonLines;
  std::vector<fs::path> stopwords;
  std::optional<fs::path> dictionary;
  std::optional<fs::path> model;  // archive for analyze / timeline; fitted on the fly when absent
  QualityThresholds quality;
  std::size_t max_edit_distance = 2;
  DtmThresholds prep{2, 5};
  bool stem = true;
  LdaConfig lda = LdaConfig::for_topics(10);
  std::vector<std::size_t> k_grid;
  std::optional<double> select_alpha;
  GibbsChain chain;
  AnalysisOptions analysis;
  fs::path out_dir = "out";
  std::uint64_t seed = 0;
  unsigned threads = 1;
};

inline std::vector<std::size_t> default_k_grid() {
  std::vector<std::size_t> ks;
  for (std::size_t k = 2; k <= 30; k += 2) ks.push_back(k);
  return ks;
}

namespace pipeline_detail {

inline Error config_error(const std::string& field, const std::string& what) {
  return Error(Errc::InvalidConfig, field + ": " + what);
}

inline void reject_unknown(const nlohmann::json& j, std::initializer_list<std::string_view> known, const std::string& where) {
  for (const auto& [key, value] : j.items())
    if (std::find(known.begin(), known.end(), key) == known.end())
      throw config_error(where.empty() ? key : where + "." + key, "unknown key");
}

inline fs::path resolve(const fs::path& base, const std::string& p) {
  const fs::path path(p);
  return path.is_absolute() || base.empty() ? path : base / path;
}

inline std::vector<std::size_t> parse_k_grid(const nlohmann::json& j) {
  std::vector<std::size_t> ks;
  if (j.is_array()) {
    ks = j.get<std::vector<std::size_t>>();
  } else {
    reject_unknown(j, {"from", "to", "step"}, "k_grid");
    const std::size_t from = j.value("from", 2u), to = j.value("to", 30u), step = j.value("step", 2u);
    if (step == 0) throw config_error("k_grid.step", "must be >= 1");
    for (std::size_t k = from; k <= to; k += step) ks.push_back(k);
  }
  return ks;
}

}  // namespace pipeline_detail

/// Reads the JSON form. Relative paths resolve against `base_dir`.
inline PipelineConfig parse_pipeline_config(const nlohmann::json& j, const fs::path& base_dir = {}) {
  using namespace pipeline_detail;
  if (!j.is_object()) throw config_error("config", "top level must be an object");
  reject_unknown(j,
                 {"corpus", "stopwords", "dictionary", "model", "quality", "prep", "lda", "k_grid", "select_alpha",
                  "chain", "analysis", "out_dir", "seed", "threads"},
                 "");
  PipelineConfig c;
  try {
    if (j.contains("corpus")) {
      const auto& cj = j["corpus"];
      if (cj.is_string()) {
        c.corpus = resolve(base_dir, cj.get<std::string>());
      } else {
        reject_unknown(cj, {"path", "format"}, "corpus");
        c.corpus = resolve(base_dir, cj.at("path").get<std::string>());
        const auto format = cj.value("format", std::string("jsonl"));
        if (format == "jsonl") c.corpus_format = CorpusFormat::JsonLines;
        else if (format == "text-dir") c.corpus_format = CorpusFormat::DirectoryOfTextFiles;
        else throw config_error("corpus.format", "expected jsonl or text-dir, got " + format);
      }
    }
    if (j.contains("stopwords")) {
      const auto& s = j["stopwords"];
      if (s.is_string()) c.stopwords.push_back(resolve(base_dir, s.get<std::string>()));
      else
        for (const auto& p : s) c.stopwords.push_back(resolve(base_dir, p.get<std::string>()));
    }
    if (j.contains("dictionary")) c.dictionary = resolve(base_dir, j["dictionary"].get<std::string>());
    if (j.contains("model")) c.model = resolve(base_dir, j["model"].get<std::string>());
    if (j.contains("quality")) {
      const auto& q = j["quality"];
      reject_unknown(q, {"low", "high", "max_edit_distance"}, "quality");
      c.quality.low = q.value("low", c.quality.low);
      c.quality.high = q.value("high", c.quality.high);
      c.max_edit_distance = q.value("max_edit_distance", c.max_edit_distance);
    }
    if (j.contains("prep")) {
      const auto& p = j["prep"];
      reject_unknown(p, {"min_term_count", "min_doc_length", "stem"}, "prep");
      c.prep.min_term_count = p.value("min_term_count", c.prep.min_term_count);
      c.prep.min_doc_length = p.value("min_doc_length", c.prep.min_doc_length);
      c.stem = p.value("stem", c.stem);
    }
    if (j.contains("lda")) {
      reject_unknown(j["lda"], {"k", "alpha", "delta", "max_em_iters", "em_tol", "max_e_iters", "e_tol", "seed"}, "lda");
      c.lda = j["lda"].get<LdaConfig>();
    }
    c.k_grid = j.contains("k_grid") ? parse_k_grid(j["k_grid"]) : default_k_grid();
    if (j.contains("select_alpha") && !j["select_alpha"].is_null()) c.select_alpha = j["select_alpha"].get<double>();
    if (j.contains("chain")) {
      reject_unknown(j["chain"], {"burn_in", "samples", "thin"}, "chain");
      c.chain = j["chain"].get<GibbsChain>();
    }
    if (j.contains("analysis")) {
      const auto& a = j["analysis"];
      reject_unknown(a, {"top_n", "frequency_top_n", "extra_stops", "period", "top_days"}, "analysis");
      c.analysis.top_n = a.value("top_n", c.analysis.top_n);
      c.analysis.frequency_top_n = a.value("frequency_top_n", c.analysis.frequency_top_n);
      c.analysis.top_days = a.value("top_days", c.analysis.top_days);
      if (a.contains("extra_stops"))
        for (const auto& p : a["extra_stops"]) c.analysis.extra_stops.push_back(resolve(base_dir, p.get<std::string>()));
      if (a.contains("period")) {
        const auto p = a["period"].get<std::string>();
        auto period = parse_period(p);
        if (!period) throw config_error("analysis.period", "expected day, week or month, got " + p);
        c.analysis.period = *period;
      }
    }
    if (j.contains("out_dir")) c.out_dir = resolve(base_dir, j["out_dir"].get<std::string>());
    c.seed = j.value("seed", c.lda.seed);
    c.threads = j.value("threads", c.threads);
  } catch (const nlohmann::json::exception& e) {
    throw config_error("config", e.what());
  }
  c.lda.seed = c.seed;
  return c;
}

inline PipelineConfig load_pipeline_config(const fs::path& path) {
  std::string text;
  try {
    text = detail::read_file(path);
  } catch (const Error& e) {
    throw pipeline_detail::config_error("--config", e.what());
  }
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw pipeline_detail::config_error("--config", e.what());
  }
  return parse_pipeline_config(j, path.parent_path());
}

/// The effective configuration as JSON. out_dir and threads are left out:
/// neither changes what a command computes, so neither enters the hash.
inline nlohmann::json to_json(const PipelineConfig& c) {
  nlohmann::json j;
  j["corpus"] = {{"path", c.corpus.generic_string()},
                 {"format", c.corpus_format == CorpusFormat::JsonLines ? "jsonl" : "text-dir"}};
  auto stops = nlohmann::json::array();
  for (const auto& p : c.stopwords) stops.push_back(p.generic_string());
  j["stopwords"] = stops;
  j["dictionary"] = c.dictionary ? nlohmann::json(c.dictionary->generic_string()) : nlohmann::json();
  j["model"] = c.model ? nlohmann::json(c.model->generic_string()) : nlohmann::json();
  j["quality"] = {{"low", c.quality.low}, {"high", c.quality.high}, {"max_edit_distance", c.max_edit_distance}};
  j["prep"] = {{"min_term_count", c.prep.min_term_count}, {"min_doc_length", c.prep.min_doc_length}, {"stem", c.stem}};
  j["lda"] = c.lda;
  j["k_grid"] = c.k_grid;
  j["select_alpha"] = c.select_alpha ? nlohmann::json(*c.select_alpha) : nlohmann::json();
  j["chain"] = c.chain;
  auto extra = nlohmann::json::array();
  for (const auto& p : c.analysis.extra_stops) extra.push_back(p.generic_string());
  j["analysis"] = {{"top_n", c.analysis.top_n},
                   {"frequency_top_n", c.analysis.frequency_top_n},
                   {"extra_stops", extra},
                   {"period", std::string(to_string(c.analysis.period))},
                   {"top_days", c.analysis.top_days}};
  j["seed"] = c.seed;
  return j;
}

// --- validation ---------------------------------------------------------------

enum class Command { Quality, Prep, Fit, SelectK, Analyze, Timeline };

constexpr std::string_view to_string(Command c) noexcept {
  switch (c) {
    case Command::Quality: return "quality";
    case Command::Prep: return "prep";
    case Command::Fit: return "fit";
    case Command::SelectK: return "select-k";
    case Command::Analyze: return "analyze";
    case Command::Timeline: return "timeline";
  }
  return "?";
}

inline void validate(const PipelineConfig& c, Command cmd) {
  using pipeline_detail::config_error;
  auto need_path = [](const fs::path& p, const std::string& field) {
    if (p.empty()) throw config_error(field, "required");
    if (!fs::exists(p)) throw config_error(field, "path does not exist: " + p.string());
  };
  need_path(c.corpus, "corpus");
  for (const auto& p : c.stopwords) need_path(p, "stopwords");
  for (const auto& p : c.analysis.extra_stops) need_path(p, "analysis.extra_stops");
  if (cmd == Command::Quality) {
    if (!c.dictionary) throw config_error("dictionary", "required by quality");
    need_path(*c.dictionary, "dictionary");
    if (!c.quality.valid())
      throw config_error("quality", "need 0 <= low <= high <= 1, got (" + fmt::num(c.quality.low) + ", " +
                                        fmt::num(c.quality.high) + ")");
  }
  if (c.model && (cmd == Command::Analyze || cmd == Command::Timeline)) need_path(*c.model, "model");
  if (c.prep.min_term_count < 1) throw config_error("prep.min_term_count", "must be >= 1");
  if (cmd == Command::Fit || cmd == Command::Analyze || cmd == Command::Timeline) {
    try {
      validate(c.lda);
    } catch (const Error& e) {
      throw config_error("lda", e.what());
    }
    if (c.lda.k < 2) throw config_error("lda.k", "must be >= 2");
  }
  if (cmd == Command::SelectK) {
    if (c.k_grid.empty()) throw config_error("k_grid", "empty");
    for (auto k : c.k_grid)
      if (k < 2) throw config_error("k_grid", "every K must be >= 2, got " + std::to_string(k));
    if (c.select_alpha && !(*c.select_alpha > 0.0)) throw config_error("select_alpha", "must be > 0");
    if (c.chain.samples < 1 || c.chain.thin < 1) throw config_error("chain", "samples and thin must be >= 1");
  }
  if (cmd == Command::Analyze && c.analysis.top_n < 1) throw config_error("analysis.top_n", "must be >= 1");
  if (cmd == Command::Timeline && c.analysis.top_days < 1) throw config_error("analysis.top_days", "must be >= 1");
  if (c.threads < 1) throw config_error("threads", "must be >= 1");
}

// --- output bookkeeping -----------------------------------------------------------

/// Collects the files written by one command and emits the manifest.
class OutputDir {
 public:
  OutputDir(const PipelineConfig& config, Command cmd) : dir_(config.out_dir / std::string(to_string(cmd))), cmd_(cmd) {
    config_hash_ = sha256_hex(to_json(config).dump());
    config_json_ = to_json(config);
    fs::create_directories(dir_);
  }

  const fs::path& path() const noexcept { return dir_; }

  /// Hashes an input; the path is recorded as given in the config.
  std::string input(const fs::path& p) {
    std::string bytes = detail::read_file(p);
    inputs_.push_back({{"path", p.generic_string()}, {"sha256", sha256_hex(bytes)}});
    return bytes;
  }

  void input_tree(const fs::path& dir) {
    // directory corpora: hash the sorted (name, content hash) listing
    std::vector<fs::path> files;
    for (const auto& e : fs::directory_iterator(dir))
      if (e.is_regular_file() && e.path().extension() == ".txt") files.push_back(e.path());
    std::sort(files.begin(), files.end());
    std::string listing;
    for (const auto& f : files) listing += f.filename().string() + " " + sha256_hex(detail::read_file(f)) + "\n";
    inputs_.push_back({{"path", dir.generic_string()}, {"sha256", sha256_hex(listing)}});
  }

  void write(const std::string& name, std::string_view bytes) {
    const fs::path p = dir_ / name;
    std::ofstream out(p, std::ios::binary | std::ios::trunc);
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    out.close();
    if (!out) throw Error(Errc::UnreadablePath, "cannot write " + p.string());
    outputs_.push_back({{"file", name}, {"sha256", sha256_hex(bytes)}});
  }

  template <typename Fn>
  void write_with(const std::string& name, Fn&& fn) {
    std::ostringstream s;
    fn(s);
    write(name, s.str());
  }

  void write_json(const std::string& name, const nlohmann::json& j) { write(name, j.dump(2) + "\n"); }

  void finish() {
    nlohmann::json m;
    m["command"] = std::string(to_string(cmd_));
    m["tool_version"] = std::string(kVersion);
    m["artifact_format"] = kArtifactFormat;
    m["config_sha256"] = config_hash_;
    m["config"] = config_json_;
    m["inputs"] = inputs_;
    m["outputs"] = outputs_;
    const std::string text = m.dump(2) + "\n";
    std::ofstream out(dir_ / "manifest.json", std::ios::binary | std::ios::trunc);
    out << text;
    if (!out) throw Error(Errc::UnreadablePath, "cannot write manifest");
  }

 private:
  fs::path dir_;
  Command cmd_;
  std::string config_hash_;
  nlohmann::json config_json_;
  nlohmann::json inputs_ = nlohmann::json::array();
  nlohmann::json outputs_ = nlohmann::json::array();
};

namespace pipeline_detail {

inline Corpus read_corpus(const PipelineConfig& c, OutputDir& out) {
  Corpus docs;
  if (c.corpus_format == CorpusFormat::JsonLines) {
    docs = parse_corpus_jsonl(out.input(c.corpus));
  } else {
    out.input_tree(c.corpus);
    docs = load_corpus(c.corpus, c.corpus_format);
  }
  if (docs.empty()) throw Error(Errc::EmptyCorpus, "corpus " + c.corpus.string() + " has no documents");
  return docs;
}

inline WordList read_lists(const std::vector<fs::path>& paths, WordListKind kind, OutputDir& out) {
  WordList all({}, kind);
  for (const auto& p : paths) all = all.merged(parse_wordlist(out.input(p), kind));
  return all;
}

inline DocTermMatrix prepare_matrix(const PipelineConfig& c, const Corpus& docs, OutputDir& out) {
  PrepOptions opts{read_lists(c.stopwords, WordListKind::StopWords, out), c.stem};
  auto dtm = build_dtm(prepare(docs, opts), c.prep);
  if (dtm.num_docs() == 0)
    throw Error(Errc::EmptyCorpus, "every document is shorter than min_doc_length=" + std::to_string(c.prep.min_doc_length));
  return dtm;
}

inline LdaModel fit_or_load(const PipelineConfig& c, const DocTermMatrix& dtm, OutputDir& out) {
  if (!c.model) return fit_vem(dtm, c.lda, {.threads = c.threads});
  auto archive = decode_model(out.input(*c.model));
  if (archive.vocab != dtm.vocab || archive.doc_ids != dtm.doc_ids)
    throw Error(Errc::DimensionMismatch, "model archive was fitted on a different document-term matrix");
  return std::move(archive.model);
}

}  // namespace pipeline_detail

// --- commands ------------------------------------------------------------------------

/// quality_report.csv, kept.jsonl
inline void cmd_quality(const PipelineConfig& c) {
  validate(c, Command::Quality);
  OutputDir out(c, Command::Quality);
  const auto docs = pipeline_detail::read_corpus(c, out);
  const auto dict = parse_wordlist(out.input(*c.dictionary), WordListKind::Dictionary);
  const auto gate = gate_corpus(docs, dict, c.quality, c.max_edit_distance, c.threads);
  out.write_with("quality_report.csv", [&](std::ostream& s) { write_quality_csv(s, gate.reports); });
  out.write_with("kept.jsonl", [&](std::ostream& s) { write_corpus_jsonl(s, gate.kept); });
  out.finish();
}

/// dtm.txt (triplets), vocab.txt, excluded_ids.txt
inline void cmd_prep(const PipelineConfig& c) {
  validate(c, Command::Prep);
  OutputDir out(c, Command::Prep);
  const auto docs = pipeline_detail::read_corpus(c, out);
  const auto dtm = pipeline_detail::prepare_matrix(c, docs, out);
  out.write_with("dtm.txt", [&](std::ostream& s) { write_dtm_triplets(s, dtm); });
  out.write_with("vocab.txt", [&](std::ostream& s) { write_vocabulary(s, dtm.vocab); });
  out.write_with("excluded_ids.txt", [&](std::ostream& s) {
    for (const auto& id : dtm.excluded_ids) s << detail::encode_id(id) << '\n';
  });
  out.finish();
}

/// model.tar, top_terms.csv/json, proportions.csv/json
inline void cmd_fit(const PipelineConfig& c) {
  validate(c, Command::Fit);
  OutputDir out(c, Command::Fit);
  const auto docs = pipeline_detail::read_corpus(c, out);
  const auto dtm = pipeline_detail::prepare_matrix(c, docs, out);
  const auto model = fit_vem(dtm, c.lda, {.threads = c.threads});
  out.write("model.tar", encode_model({model, dtm.vocab, dtm.doc_ids}));
  const auto terms = top_terms(model, dtm.vocab, std::min(c.analysis.top_n, dtm.num_terms()));
  const auto props = corpus_topic_proportions(model, dtm);
  out.write_with("top_terms.csv", [&](std::ostream& s) { write_top_terms_csv(s, terms); });
  out.write_json("top_terms.json", top_terms_json(terms));
  out.write_with("proportions.csv", [&](std::ostream& s) { write_proportions_csv(s, props); });
  out.write_json("proportions.json", proportions_json(props));
  out.finish();
}

/// metrics.csv, metrics.json
inline void cmd_select_k(const PipelineConfig& c) {
  validate(c, Command::SelectK);
  OutputDir out(c, Command::SelectK);
  const auto docs = pipeline_detail::read_corpus(c, out);
  const auto dtm = pipeline_detail::prepare_matrix(c, docs, out);
  SelectKOptions opts{c.lda, c.select_alpha, c.chain, c.threads};
  const auto report = select_k(dtm, c.k_grid, opts);
  out.write_with("metrics.csv", [&](std::ostream& s) { write_metric_csv(s, report); });
  out.write_json("metrics.json", metric_json(report));
  out.finish();
}

/// top_terms, proportions, importance.csv, frequency.csv/json
inline void cmd_analyze(const PipelineConfig& c) {
  validate(c, Command::Analyze);
  OutputDir out(c, Command::Analyze);
  const auto docs = pipeline_detail::read_corpus(c, out);
  const auto dtm = pipeline_detail::prepare_matrix(c, docs, out);
  const auto model = pipeline_detail::fit_or_load(c, dtm, out);

  const auto terms = top_terms(model, dtm.vocab, std::min(c.analysis.top_n, dtm.num_terms()));
  const auto props = corpus_topic_proportions(model, dtm);
  out.write_with("top_terms.csv", [&](std::ostream& s) { write_top_terms_csv(s, terms); });
  out.write_json("top_terms.json", top_terms_json(terms));
  out.write_with("proportions.csv", [&](std::ostream& s) { write_proportions_csv(s, props); });
  out.write_json("proportions.json", proportions_json(props));

  const auto groups = dominant_topics(model);
  out.write_with("importance.csv", [&](std::ostream& s) {
    s << "topic,term,importance\n";
    for (std::size_t k = 0; k < model.num_topics(); ++k) {
      if (std::find(groups.begin(), groups.end(), k) == groups.end()) continue;  // no document leads with k
      auto imp = word_importance(dtm, groups, k);
      if (imp.size() > c.analysis.top_n) imp.resize(c.analysis.top_n);
      write_importance_csv(s, k, imp, false);
    }
  });

  // Word frequencies are reported on surface forms (no stemming) so they read
  // as words.
  PrepOptions surface{pipeline_detail::read_lists(c.stopwords, WordListKind::StopWords, out), false};
  const auto extra = pipeline_detail::read_lists(c.analysis.extra_stops, WordListKind::StopWords, out);
  const auto freq = frequency_table(prepare(docs, surface), extra, c.analysis.frequency_top_n);
  out.write_with("frequency.csv", [&](std::ostream& s) { write_frequency_csv(s, freq); });
  out.write_json("frequency.json", frequency_json(freq));
  out.finish();
}

/// volume.csv/json, top_days.csv, top_day_terms.csv, prevalence.csv/json
inline void cmd_timeline(const PipelineConfig& c) {
  validate(c, Command::Timeline);
  OutputDir out(c, Command::Timeline);
  const auto docs = pipeline_detail::read_corpus(c, out);
  const auto volume = volume_by_day(docs);
  const auto days = top_active_days(volume.series, c.analysis.top_days);
  out.write_with("volume.csv", [&](std::ostream& s) { write_timeseries_csv(s, volume.series); });
  nlohmann::json vj = {{"undated", volume.undated}, {"points", timeseries_json(volume.series)}};
  out.write_json("volume.json", vj);
  out.write_with("top_days.csv", [&](std::ostream& s) { write_top_days_csv(s, days); });

  PrepOptions surface{pipeline_detail::read_lists(c.stopwords, WordListKind::StopWords, out), false};
  const auto extra = pipeline_detail::read_lists(c.analysis.extra_stops, WordListKind::StopWords, out);
  out.write_with("top_day_terms.csv", [&](std::ostream& s) {
    s << "scope,term,count\n";
    for (const auto& [day, n] : days) {
      std::vector<TokenStream> streams;
      for (const auto& d : docs)
        if (d.date == day) streams.push_back(prepare(d, surface));
      auto table = frequency_table(streams, extra, c.analysis.frequency_top_n, format_date(day));
      for (const auto& [term, count] : table.entries)
        s << table.scope_tag << ',' << fmt::csv_field(term) << ',' << count << '\n';
    }
  });

  const auto dtm = pipeline_detail::prepare_matrix(c, docs, out);
  const auto model = pipeline_detail::fit_or_load(c, dtm, out);
  const auto prevalence = topic_prevalence_over_time(model, dtm, row_dates(dtm, docs), c.analysis.period);
  out.write_with("prevalence.csv", [&](std::ostream& s) { write_timeseries_csv(s, prevalence); });
  out.write_json("prevalence.json", timeseries_json(prevalence));
  out.finish();
}

inline void run_command(Command cmd, const PipelineConfig& c) {
  switch (cmd) {
    case Command::Quality: return cmd_quality(c);
    case Command::Prep: return cmd_prep(c);
    case Command::Fit: return cmd_fit(c);
    case Command::SelectK: return cmd_select_k(c);
    case Command::Analyze: return cmd_analyze(c);
    case Command::Timeline: return cmd_timeline(c);
  }
}

/// Runs a command and maps failures onto the exit-code contract, printing
/// the error to `err`.
inline int run_guarded(Command cmd, const PipelineConfig& c, std::ostream& err) {
  try {
    run_command(cmd, c);
    return kExitOk;
  } catch (const Error& e) {
    err << "topicmine " << to_string(cmd) << ": " << e.what() << '\n';
    return is_config_error(e.code()) ? kExitConfig : kExitData;
  } catch (const fs::filesystem_error& e) {
    err << "topicmine " << to_string(cmd) << ": " << e.what() << '\n';
    return kExitData;
  }
}

}  // namespace topicmine
