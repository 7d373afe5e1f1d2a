// Acceptance run: prints one PASS/FAIL line per criterion and exits nonzero
// if any fails. Every check builds its own inputs; nothing is read from the
// unit-test binaries.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "support/enumeration.hpp"
#include "support/fixtures.hpp"
#include "support/synthetic.hpp"
#include "topicmine/pipeline.hpp"

namespace fs = std::filesystem;
using namespace topicmine;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

int failures = 0;

void report(int id, const std::string& title, const std::function<Outcome()>& check) {
  const auto t0 = std::chrono::steady_clock::now();
  Outcome o;
  try {
    o = check();
  } catch (const std::exception& e) {
    o = {false, std::string("exception: ") + e.what()};
  }
  const double sec = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (!o.pass) ++failures;
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2fs", sec);
  std::cout << (o.pass ? "PASS" : "FAIL") << " [" << id << "] " << title << " -- " << o.detail << " (" << buf << ")"
            << std::endl;
}

std::string fixed(double x, int digits = 4) {
  std::ostringstream s;
  s.precision(digits);
  s << std::fixed << x;
  return s.str();
}

// --- 1: quality tiers ---------------------------------------------------------

// 4,165 documents: 1,087 below 0.5, 477 above 0.9 (each carrying one
// misspelling), the rest in [0.5, 0.9] including both boundaries.
Outcome quality_tiers() {
  const std::vector<std::string> known{
      "farm",    "crop",     "harvest", "grain",   "wheat",   "cattle",  "drought", "water",   "river",  "county",
      "senator", "letter",   "support", "funding", "project", "hearing", "family",  "school",  "bridge", "hospital",
      "doctor",  "veterans", "service", "energy",  "price",   "market",  "program", "federal", "public", "workers"};
  std::string dict_text;
  for (const auto& w : known) dict_text += w + "\n";
  const auto dict = parse_wordlist(dict_text, WordListKind::Dictionary);

  std::mt19937_64 rng(1087);
  std::uniform_int_distribution<std::size_t> pick(0, known.size() - 1);
  std::uniform_int_distribution<int> letter('a', 'z');
  auto junk = [&] {
    // 'q' + consonants: never within reach of a dictionary word's spelling
    std::string s = "q";
    for (int i = 0; i < 5; ++i) s += "bcdfghjklmnpvwxz"[rng() % 16];
    return s;
  };
  auto doc = [&](std::size_t n_known, std::size_t n_junk, bool typo) {
    std::vector<std::string> w;
    for (std::size_t i = 0; i < n_known; ++i) w.push_back(known[pick(rng)]);
    for (std::size_t i = 0; i < n_junk; ++i) w.push_back(junk());
    if (typo) {
      std::string t = known[pick(rng)];
      t[t.size() / 2] = t[t.size() / 2] == 'x' ? 'y' : 'x';  // one substitution
      w.push_back(t);
    }
    std::shuffle(w.begin(), w.end(), rng);
    std::string text;
    for (const auto& x : w) text += (text.empty() ? "" : " ") + x;
    return text + ".";
  };

  Corpus docs;
  auto add = [&](std::string text) { docs.push_back({"doc" + std::to_string(docs.size()), std::move(text), {}, {}}); };
  const std::size_t drop = 1087, correct = 477, total = 4165;
  for (std::size_t i = 0; i < drop; ++i) {
    const std::size_t k = i % 5;  // 0/10 .. 4/10, plus 0.49 on every fifth
    if (i % 50 == 0) add(doc(49, 51, false));
    else add(doc(k, 10 - k, false));
  }
  for (std::size_t i = 0; i < correct; ++i) add(doc(19, 0, true));  // 19/20
  for (std::size_t i = 0; docs.size() < total; ++i) {
    switch (i % 4) {
      case 0: add(doc(5, 5, false)); break;   // exactly 0.5
      case 1: add(doc(9, 1, false)); break;   // exactly 0.9
      case 2: add(doc(6, 3, true)); break;    // 0.6, typo left alone
      default: add(doc(8, 2, false)); break;  // 0.8
    }
  }
  std::shuffle(docs.begin(), docs.end(), rng);

  const auto gate = gate_corpus(docs, dict, {0.5, 0.9});
  std::size_t n_drop = 0, n_correct = 0, n_keep = 0, repaired = 0, touched_keep = 0;
  std::map<std::string, const Document*> kept_by_id;
  for (const auto& d : gate.kept) kept_by_id[d.id] = &d;
  for (std::size_t i = 0; i < docs.size(); ++i) {
    const auto& r = gate.reports[i];
    if (r.tier == Tier::Drop) ++n_drop;
    if (r.tier == Tier::Keep) {
      ++n_keep;
      if (kept_by_id.at(r.doc_id)->text != docs[i].text) ++touched_keep;
    }
    if (r.tier == Tier::Correct) {
      ++n_correct;
      const auto* out = kept_by_id.at(r.doc_id);
      if (out->text != docs[i].text && score_document(*out, dict, {0.5, 0.9}).score == 1.0) ++repaired;
    }
  }
  const bool ok = docs.size() == total && n_drop == drop && n_correct == correct && repaired == correct &&
                  touched_keep == 0 && gate.kept.size() == 3078;
  return {ok, "dropped " + std::to_string(n_drop) + ", corrected " + std::to_string(n_correct) + " (" +
                  std::to_string(repaired) + " repaired), kept " + std::to_string(n_keep) + ", remaining " +
                  std::to_string(gate.kept.size())};
}

// --- 2: Porter vectors --------------------------------------------------------------

Outcome porter_vectors() {
  std::ifstream in(fs::path(TOPICMINE_SOURCE_DIR) / "tests" / "data" / "porter_vectors.txt");
  if (!in) return {false, "reference file missing"};
  std::size_t pairs = 0, mismatches = 0;
  std::string first_bad;
  for (std::string line; std::getline(in, line); ++pairs) {
    // "word stem"; the stem may be empty ("s ")
    const auto sp = line.find(' ');
    if (sp == std::string::npos) return {false, "malformed line: " + line};
    const auto word = line.substr(0, sp), expect = line.substr(sp + 1);
    if (stem(word) != expect) {
      if (mismatches++ == 0) first_bad = word + " -> " + stem(word) + " (want " + expect + ")";
    }
  }
  return {pairs >= 500 && mismatches == 0,
          std::to_string(pairs) + " pairs, " + std::to_string(mismatches) + " mismatches" +
              (first_bad.empty() ? "" : ", first: " + first_bad)};
}

// --- 3: VEM monotone and recovers topics ----------------------------------------------

Outcome vem_recovery() {
  synth::SyntheticSpec spec;
  spec.topics = 3;
  spec.vocab = 30;
  spec.docs = 200;
  spec.tokens_per_doc = 50;
  spec.alpha = 0.5;
  spec.delta = 0.1;
  spec.seed = 2024;
  const auto corpus = synth::sample_corpus(spec);
  const auto dtm = build_dtm(corpus.streams);
  LdaConfig config;
  config.k = 3;
  config.alpha = 0.5;
  config.delta = 0.1;
  config.seed = 1;
  const auto model = fit_vem(dtm, config);

  std::size_t drops = 0;
  const auto& tr = model.elbo_trace;
  for (std::size_t i = 1; i < tr.size(); ++i)
    if (tr[i] < tr[i - 1] - 1e-6 * std::abs(tr[i - 1])) ++drops;
  const auto truth = synth::truth_on_vocab(corpus, dtm.vocab);
  const double tv = synth::greedy_matched_tv(truth, model.num_topics(), [&](std::size_t k) {
    auto row = model.beta.row(k);
    return std::vector<double>(row.begin(), row.end());
  });
  return {drops == 0 && tv <= 0.1, std::to_string(tr.size()) + " iterations, " + std::to_string(drops) +
                                       " decreases, mean matched TV " + fixed(tv)};
}

// --- 4: harmonic mean vs exact evidence -----------------------------------------------------

Outcome harmonic_mean_bracket() {
  const std::vector<std::vector<std::uint32_t>> words{{0, 0, 1}, {2, 2, 1}};
  DocTermMatrix dtm;
  dtm.vocab = Vocabulary({"a", "b", "c"});
  dtm.rows = {{{0, 2}, {1, 1}}, {{1, 1}, {2, 2}}};
  dtm.doc_ids = {"d0", "d1"};
  const double alpha = 1.0, delta = 0.5;
  const double exact = synth::exact_log_evidence(words, 3, 2, alpha, delta);
  bool ok = synth::assignment_count(words, 2) == 64;
  std::string detail = "exact " + fixed(exact) + ", estimates";
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    LdaConfig c;
    c.k = 2;
    c.alpha = alpha;
    c.delta = delta;
    c.seed = seed;
    const double hm = log_harmonic_mean(fit_gibbs(dtm, c, GibbsChain{}).log_likelihoods);
    ok = ok && std::abs(hm - exact) <= 0.5;
    detail += " " + fixed(hm);
  }
  return {ok, detail};
}

// --- 5: K selection -----------------------------------------------------------------------------

Outcome k_selection() {
  synth::SyntheticSpec spec;
  spec.topics = 5;
  spec.vocab = 100;
  spec.docs = 500;
  spec.tokens_per_doc = 100;
  spec.alpha = 0.1;
  spec.delta = 1.0;
  spec.seed = 1;
  const auto dtm = build_dtm(synth::sample_corpus(spec).streams);
  SelectKOptions opts;
  opts.base.seed = 11;
  opts.base.delta = 1.0;
  opts.alpha = 0.1;
  std::vector<std::size_t> ks;
  for (std::size_t k = 2; k <= 10; ++k) ks.push_back(k);
  const auto r = select_k(dtm, ks, opts);

  auto arg = [&](Metric m, bool maximize) {
    const auto& raw = r.get(m).raw;
    auto it = maximize ? std::max_element(raw.begin(), raw.end()) : std::min_element(raw.begin(), raw.end());
    return ks[static_cast<std::size_t>(it - raw.begin())];
  };
  const auto cao = arg(Metric::CaoJuan2009, false), dev = arg(Metric::Deveaud2014, true);
  auto near5 = [](std::size_t k) { return k >= 4 && k <= 6; };
  bool rescaled_ok = true;
  for (const auto& s : r.series) {
    const auto [lo, hi] = std::minmax_element(s.rescaled.begin(), s.rescaled.end());
    rescaled_ok = rescaled_ok && *lo == 0.0 && *hi == 1.0;
    for (double v : s.rescaled) rescaled_ok = rescaled_ok && v >= 0.0 && v <= 1.0;
  }
  return {near5(cao) && near5(dev) && rescaled_ok,
          "CaoJuan2009 argmin " + std::to_string(cao) + ", Deveaud2014 argmax " + std::to_string(dev) +
              ", Griffiths2004 argmax " + std::to_string(arg(Metric::Griffiths2004, true)) + ", Arun2010 argmin " +
              std::to_string(arg(Metric::Arun2010, false)) + ", rescaled " + (rescaled_ok ? "ok" : "bad")};
}

// --- 6: analysis invariants ---------------------------------------------------------------------

Outcome analysis_invariants() {
  std::size_t props = 0, prev = 0, imp = 0, vol = 0, bad = 0;
  for (std::uint64_t seed = 1; seed <= 400 && (props < 100 || prev < 100 || imp < 100 || vol < 100); ++seed) {
    const auto f = synth::random_fixture(seed);
    double s = 0.0;
    for (double p : corpus_topic_proportions(f.model, f.dtm)) s += p;
    bad += std::abs(s - 1.0) > 1e-9;
    ++props;

    const auto dates = row_dates(f.dtm, f.docs);
    if (f.dated > 0) {
      for (auto period : {Period::Day, Period::Week, Period::Month}) {
        for (const auto& pt : topic_prevalence_over_time(f.model, f.dtm, dates, period).points) {
          double t = 0.0;
          for (double v : pt.values) t += v;
          bad += std::abs(t - 1.0) > 1e-9;
        }
      }
      ++prev;
      const auto v = volume_by_day(f.docs);
      double n = 0.0;
      for (const auto& pt : v.series.points) n += pt.values[0];
      bad += n != static_cast<double>(f.dated) || v.undated + f.dated != f.docs.size();
      ++vol;
    }

    const auto groups = dominant_topics(f.model);
    for (std::size_t k = 0; k < f.model.num_topics(); ++k) {
      const auto in = std::count(groups.begin(), groups.end(), k);
      if (in == 0 || in == static_cast<std::ptrdiff_t>(groups.size())) continue;
      double t = 0.0;
      for (const auto& [term, v] : word_importance(f.dtm, groups, k)) t += v;
      bad += std::abs(t) > 1e-9;
      ++imp;
      break;
    }
  }
  const bool ok = bad == 0 && props >= 100 && prev >= 100 && imp >= 100 && vol >= 100;
  return {ok, "cases: proportions " + std::to_string(props) + ", prevalence " + std::to_string(prev) +
                  ", importance " + std::to_string(imp) + ", volume " + std::to_string(vol) + "; violations " +
                  std::to_string(bad)};
}

// --- 7: byte-identical reruns -----------------------------------------------------------------------

Outcome determinism() {
  const auto root = fs::temp_directory_path() / "topicmine_acceptance_determinism";
  fs::remove_all(root);
  auto base = load_pipeline_config(fs::path(TOPICMINE_SOURCE_DIR) / "data" / "configs" / "synthetic.json");
  std::size_t compared = 0;
  std::string problem;
  for (auto cmd : {Command::Fit, Command::SelectK}) {
    std::vector<std::map<std::string, std::string>> runs;
    for (int run = 0; run < 3; ++run) {
      auto c = base;
      c.out_dir = root / ("run" + std::to_string(run));
      c.threads = static_cast<unsigned>(run + 1);  // must not matter
      run_command(cmd, c);
      const auto dir = c.out_dir / std::string(to_string(cmd));
      const auto manifest = nlohmann::json::parse(detail::read_file(dir / "manifest.json"));
      std::map<std::string, std::string> files;
      for (const auto& o : manifest["outputs"]) {
        const auto name = o["file"].get<std::string>();
        files[name] = detail::read_file(dir / name);
        if (sha256_hex(files[name]) != o["sha256"]) problem = name + " does not match its manifest hash";
      }
      files["manifest.json"] = detail::read_file(dir / "manifest.json");
      runs.push_back(std::move(files));
    }
    for (int run = 1; run < 3; ++run) {
      if (runs[run] != runs[0]) problem = std::string(to_string(cmd)) + " run " + std::to_string(run) + " differs";
      compared += runs[run].size();
    }
  }
  fs::remove_all(root);
  return {problem.empty(), problem.empty() ? std::to_string(compared) + " files identical across 3 runs of fit and select-k"
                                           : problem};
}

// --- 8: archive round trip -----------------------------------------------------------------------------

Outcome archive_round_trip() {
  synth::SyntheticSpec spec;
  spec.docs = 60;
  spec.seed = 5;
  const auto dtm = build_dtm(synth::sample_corpus(spec).streams);
  const ModelArchive a{fit_vem(dtm, LdaConfig::for_topics(4, 3)), dtm.vocab, dtm.doc_ids};
  const auto path = fs::temp_directory_path() / "topicmine_acceptance_model.tar";
  save_model(path, a);
  const auto b = load_model(path);
  fs::remove(path);
  auto same_bits = [](const std::vector<double>& x, const std::vector<double>& y) {
    return x.size() == y.size() && std::memcmp(x.data(), y.data(), x.size() * sizeof(double)) == 0;
  };
  const bool beta = same_bits(a.model.beta.data(), b.model.beta.data()) && a.model.beta.rows() == b.model.beta.rows();
  const bool gamma =
      same_bits(a.model.gamma.data(), b.model.gamma.data()) && a.model.gamma.rows() == b.model.gamma.rows();
  const bool trace = same_bits(a.model.elbo_trace, b.model.elbo_trace);
  const bool config = a.model.config == b.model.config;
  return {beta && gamma && trace && config && a.vocab == b.vocab && a.doc_ids == b.doc_ids,
          std::string("beta ") + (beta ? "ok" : "differs") + ", gamma " + (gamma ? "ok" : "differs") + ", trace " +
              (trace ? "ok" : "differs") + ", config " + (config ? "ok" : "differs")};
}

}  // namespace

int main() {
  report(1, "quality tiers on a 4,165-document corpus", quality_tiers);
  report(2, "Porter stemmer against reference vectors", porter_vectors);
  report(3, "VEM bound is monotone and recovers topics", vem_recovery);
  report(4, "harmonic-mean evidence within 0.5 nats of enumeration", harmonic_mean_bracket);
  report(5, "K selection on a 5-topic corpus", k_selection);
  report(6, "analysis invariants on random fixtures", analysis_invariants);
  report(7, "fit and select-k reruns are byte-identical", determinism);
  report(8, "model archive round trip is bit-exact", archive_round_trip);
  std::cout << (failures == 0 ? "all criteria passed" : std::to_string(failures) + " criteria failed") << std::endl;
  return failures == 0 ? 0 : 1;
}
