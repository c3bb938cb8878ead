// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any
// criterion fails.

#include <sys/resource.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <iostream>
#include <numeric>
#include <random>
#include <sstream>
#include <thread>

#include "deqe/analysis.hpp"
#include "deqe/metrics.hpp"
#include "deqe/scoring.hpp"
#include "deqe/wcm.hpp"
#include "support/oracles.hpp"
#include "support/synthetic.hpp"

using namespace deqe;
namespace t = deqe::testing;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;

  void require(bool ok, const std::string& what) {
    if (!ok && pass) detail = "failed: " + what + (detail.empty() ? "" : "; " + detail);
    pass = pass && ok;
  }
  void note(const std::string& text) { detail += (detail.empty() ? "" : "; ") + text; }
};

std::string fmt(const char* format, double value) {
  char buf[64];
  std::snprintf(buf, sizeof buf, format, value);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

std::string serialize(const CooccurrenceMatrix& m) {
  std::ostringstream out;
  write_wcm(m, out);
  return out.str();
}

TokenizedSegment words(const std::string& text) { return {t::split_words(text)}; }

// ---------------------------------------------------------------------------

Outcome wcm_oracle() {
  Outcome o;
  std::mt19937_64 rng(1001);
  std::size_t entries = 0;
  for (int trial = 0; trial < 200; ++trial) {
    const auto corpus = t::random_corpus(rng, {.max_segments = 50, .max_vocab = 30});
    for (const auto mode : {CountMode::Binary, CountMode::Product}) {
      const auto config = t::random_config(rng, mode);
      const auto m = t::build_from_pairs(corpus, config);
      const bool same = t::as_oracle(m) == t::brute_force_wcm(corpus, config);
      o.require(same, "corpus " + std::to_string(trial) + " mode " + std::string(count_mode_name(mode)));
      entries += m.size();
    }
  }
  o.note("400 builds, " + std::to_string(entries) + " entries compared");
  return o;
}

Outcome serialization() {
  Outcome o;
  std::mt19937_64 rng(2002);
  t::TempDir dir("accept-io");
  std::vector<CooccurrenceMatrix> matrices;
  std::vector<std::string> serialized_4;
  matrices.push_back(CooccurrenceMatrix::from_entries({}, {}));
  matrices.push_back(CooccurrenceMatrix::from_entries({7, 100, CountMode::Product}, {{"é", "ü", 9}}, {"the"}));
  serialized_4.push_back(serialize(matrices[0]));
  serialized_4.push_back(serialize(matrices[1]));
  while (matrices.size() < 100) {
    const auto corpus = t::random_corpus(rng);
    const auto config = t::random_config(rng, matrices.size() % 2 ? CountMode::Product : CountMode::Binary);
    matrices.push_back(t::build_from_pairs(corpus, config, 1));
    serialized_4.push_back(serialize(t::build_from_pairs(corpus, config, 4)));
  }
  std::size_t empty = 0;
  std::size_t single = 0;
  for (std::size_t i = 0; i < matrices.size(); ++i) {
    const auto& m = matrices[i];
    empty += m.empty() ? 1 : 0;
    single += m.size() == 1 ? 1 : 0;
    const auto path = dir / ("m" + std::to_string(i) + ".wcm");
    save_wcm(m, path);
    const auto loaded = load_wcm(path);
    o.require(loaded == m && loaded.entries() == m.entries() && loaded.config() == m.config() &&
                  loaded.excluded_source() == m.excluded_source() &&
                  loaded.excluded_target() == m.excluded_target(),
              "round trip of matrix " + std::to_string(i));
    o.require(serialize(m) == serialized_4[i], "threads 1 vs 4 bytes differ for matrix " + std::to_string(i));
  }
  o.note("100 matrices (" + std::to_string(empty) + " empty, " + std::to_string(single) + " single-entry)");
  return o;
}

Outcome scoring_properties() {
  Outcome o;
  std::mt19937_64 rng(3003);
  std::bernoulli_distribution coin(0.5);
  auto random_segment = [&](const std::vector<std::string>& pool, char oov) {
    std::uniform_int_distribution<std::size_t> len(0, 12);
    TokenizedSegment s;
    for (auto n = len(rng); n > 0; --n) {
      if (pool.empty() || coin(rng) && coin(rng)) {
        s.tokens.push_back(std::string(1, oov) + "oov" + std::to_string(rng() % 5));
      } else {
        s.tokens.push_back(pool[rng() % pool.size()]);
      }
    }
    return s;
  };
  for (int trial = 0; trial < 1000; ++trial) {
    const auto corpus = t::random_corpus(rng, {.max_segments = 40, .max_vocab = 15});
    const auto config = t::random_config(rng, coin(rng) ? CountMode::Binary : CountMode::Product);
    const auto m = t::build_from_pairs(corpus, config);
    const auto sv = t::side_vocabulary(corpus, Side::Source);
    const auto tv = t::side_vocabulary(corpus, Side::Target);
    const auto source = random_segment(sv.tokens(), 's');
    const auto hypothesis = random_segment(tv.tokens(), 't');
    const bool by_type = trial % 4 == 3;

    const auto de = de_score(m, source, hypothesis, by_type);
    const auto rev = reverse_de_score(m, source, hypothesis, by_type);

    auto permuted = hypothesis;
    std::shuffle(permuted.tokens.begin(), permuted.tokens.end(), rng);
    o.require(de_score(m, source, permuted, by_type) == de, "permutation invariance");

    auto doubled = hypothesis;
    doubled.tokens.insert(doubled.tokens.end(), hypothesis.tokens.begin(), hypothesis.tokens.end());
    o.require(de_score(m, source, doubled, by_type) == de, "duplication invariance");

    // Add random entries that respect the exclusion lists and threshold.
    auto entries = m.entries();
    std::vector<std::string> sources;
    std::vector<std::string> targets;
    for (const auto& w : sv.tokens()) if (!m.is_excluded_source(w)) sources.push_back(w);
    for (const auto& w : tv.tokens()) if (!m.is_excluded_target(w)) targets.push_back(w);
    if (!sources.empty() && !targets.empty()) {
      for (int k = 0; k < 5; ++k) {
        WcmEntry extra{sources[rng() % sources.size()], targets[rng() % targets.size()],
                       config.min_cooccurrence};
        if (!m.count(extra.source, extra.target) &&
            std::find_if(entries.begin(), entries.end(), [&](const WcmEntry& e) {
              return e.source == extra.source && e.target == extra.target;
            }) == entries.end()) {
          entries.push_back(extra);
        }
      }
    }
    const auto richer = CooccurrenceMatrix::from_entries(config, entries, m.excluded_source(), m.excluded_target());
    o.require(de_score(richer, source, hypothesis, by_type).value >= de.value, "evidence monotonicity");
    o.require(reverse_de_score(richer, source, hypothesis, by_type).value >= rev.value,
              "reverse evidence monotonicity");

    o.require(de_score(m.transposed(), hypothesis, source, by_type) == rev, "transpose duality");
  }
  o.note("1000 trials");
  return o;
}

Outcome bleu_oracle() {
  Outcome o;
  std::mt19937_64 rng(4004);
  auto random_segments = [&](std::size_t count, std::size_t min_len) {
    std::uniform_int_distribution<std::size_t> len(min_len, 10);
    std::vector<TokenizedSegment> out(count);
    for (auto& s : out) {
      for (auto n = len(rng); n > 0; --n) s.tokens.push_back("w" + std::to_string(rng() % 8));
    }
    return out;
  };
  double worst = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const auto n = 1 + rng() % 10;
    const auto hyps = random_segments(n, 0);
    const auto refs = random_segments(n, 1);
    const auto got = corpus_bleu(hyps, refs);
    const auto want = t::naive_corpus_bleu(hyps, refs);
    worst = std::max(worst, std::fabs(got.score - want.score));
    for (std::size_t k = 0; k < kBleuOrder; ++k) {
      worst = std::max(worst, std::fabs(got.precisions[k] - want.precisions[k]));
    }
    worst = std::max(worst, std::fabs(got.brevity_penalty - want.brevity_penalty));
  }
  o.require(worst <= 1e-9, "oracle deviation " + fmt("%.3g", worst));

  const std::vector<TokenizedSegment> hyp = {words("the cat sat on the mat")};
  const std::vector<TokenizedSegment> ref = {words("the cat sat on a mat")};
  const double example = corpus_bleu(hyp, ref).score;
  o.require(std::fabs(example - 53.73) <= 0.01, "hand example gave " + fmt("%.4f", example));

  double self_worst = 0.0;
  for (const auto& h : random_segments(100, 1)) {
    self_worst = std::max(self_worst, std::fabs(sentence_bleu(h, h).score - 100.0));
  }
  o.require(self_worst <= 1e-9, "sentence_bleu(h,h) off by " + fmt("%.3g", self_worst));
  o.note("max oracle deviation " + fmt("%.2g", worst) + ", example " + fmt("%.4f", example));
  return o;
}

Outcome pearson_checks() {
  Outcome o;
  std::mt19937_64 rng(5005);
  std::normal_distribution<double> noise(0.0, 1.0);
  std::uniform_real_distribution<double> positive(0.01, 100.0);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<double> xs(3 + rng() % 60);
    for (auto& x : xs) x = noise(rng) * 10;
    std::vector<double> ys = xs;
    std::vector<double> neg;
    for (double x : xs) neg.push_back(-x);
    o.require(std::fabs(pearson(xs, ys).r - 1.0) <= 1e-12, "identity r");
    o.require(std::fabs(pearson(xs, neg).r + 1.0) <= 1e-12, "anti-identity r");

    for (auto& y : ys) y = 0.3 * y + noise(rng);
    const double base = pearson(xs, ys).r;
    const double a = positive(rng);
    const double b = noise(rng) * 1000;
    std::vector<double> moved_x;
    std::vector<double> moved_y;
    for (double x : xs) moved_x.push_back(a * x + b);
    for (double y : ys) moved_y.push_back(a * y - b);
    o.require(std::fabs(pearson(moved_x, ys).r - base) <= 1e-12, "affine invariance in x");
    o.require(std::fabs(pearson(xs, moved_y).r - base) <= 1e-12, "affine invariance in y");
  }
  const std::vector<double> xs = {1, 2, 3, 4, 5};
  const std::vector<double> ys = {2, 1, 4, 3, 5};
  const double r = pearson(xs, ys).r;
  o.require(std::fabs(r - 0.8) <= 1e-12, "hand case r = " + fmt("%.15f", r));

  const double df = static_cast<double>(kExactTMaxSamples - 2);
  double worst = 0.0;
  for (double tv = 0.0; tv <= 10.0; tv += 0.005) {
    worst = std::max(worst, std::fabs(t_test_p_exact(tv, df) - t_test_p_normal(tv, df)));
  }
  o.require(worst <= 1e-4, "p-value disagreement " + fmt("%.3g", worst));
  o.note("max |p_exact - p_normal| at n=200: " + fmt("%.2g", worst));
  return o;
}

// Shared synthetic bitext for the end-to-end criteria. Words are drawn
// uniformly from the lexicon; the Zipf profile is reported as a diagnostic.
const t::SyntheticSpec kSynthetic{.lexicon_size = 500, .min_length = 3, .max_length = 15, .zipf_exponent = 0.0};
const t::SyntheticSpec kZipfSynthetic{.lexicon_size = 500, .min_length = 3, .max_length = 15, .zipf_exponent = 1.0};
constexpr std::size_t kPairs = 20000;
constexpr std::size_t kTest = 2000;

std::vector<t::SyntheticPair> synthetic_corpus(const t::SyntheticLexicon& lexicon, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<t::SyntheticPair> pairs;
  pairs.reserve(kPairs);
  for (std::size_t i = 0; i < kPairs; ++i) pairs.push_back(lexicon.sample(rng));
  return pairs;
}

std::vector<std::size_t> pick(std::size_t n, std::size_t k, std::mt19937_64& rng) {
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  std::shuffle(idx.begin(), idx.end(), rng);
  idx.resize(k);
  return idx;
}

Outcome gradation(const t::SyntheticSpec& spec) {
  Outcome o;
  const t::SyntheticLexicon lexicon(spec, 6006);
  const auto corpus = synthetic_corpus(lexicon, 6007);
  std::mt19937_64 rng(6008);

  std::vector<TokenizedPair> train;
  for (std::size_t i = 0; i + kTest < kPairs; ++i) train.push_back({words(corpus[i].source), words(corpus[i].target)});
  const auto m = t::build_from_pairs(train, {20, 10000, CountMode::Binary});

  std::vector<TokenizedPair> test;
  std::vector<TokenizedSegment> hyps;
  std::vector<TokenizedSegment> refs;
  std::vector<bool> corrupted(kTest, false);
  for (auto i : pick(kTest, kTest * 3 / 10, rng)) corrupted[i] = true;
  for (std::size_t i = 0; i < kTest; ++i) {
    const auto& pair = corpus[kPairs - kTest + i];
    auto hyp = lexicon.machine_translate(pair.target, rng, 0.1, 0.1);
    if (corrupted[i]) hyp = t::SyntheticLexicon::corrupt(hyp, rng);
    test.push_back({words(pair.source), words(hyp)});
    hyps.push_back(words(hyp));
    refs.push_back(words(pair.target));
  }
  ScoreOptions options;
  const auto scored = score_pairs(m, test, options);
  std::vector<DeScore> scores;
  for (const auto& s : scored) scores.push_back(s.de);

  const auto buckets = parse_buckets("<50,>=50");
  const auto report = bucket_eval(scores, hyps, refs, buckets);
  const double low = report.rows[0].bleu ? report.rows[0].bleu->score : 0.0;
  const double high = report.rows[1].bleu ? report.rows[1].bleu->score : 0.0;
  o.require(report.rows[0].bleu && report.rows[1].bleu, "a bucket is empty");
  o.require(high - low >= 5.0, "BLEU gap " + fmt("%.2f", high - low));

  const auto corr = correlate_de_bleu(scores, hyps, refs);
  o.require(corr.r > 0.3, "r = " + fmt("%.4f", corr.r));
  o.require(corr.p_value < 0.001, "p = " + fmt("%.3g", corr.p_value));
  o.note("WCM " + std::to_string(m.size()) + " entries; <50: " + std::to_string(report.rows[0].segments) +
         " segs BLEU " + fmt("%.2f", low) + "; >=50: " + std::to_string(report.rows[1].segments) +
         " segs BLEU " + fmt("%.2f", high) + "; r=" + fmt("%.4f", corr.r) + " p=" + fmt("%.2g", corr.p_value));
  return o;
}

long peak_rss_kib() {
  rusage usage{};
  getrusage(RUSAGE_SELF, &usage);
  return usage.ru_maxrss;
}

Outcome scale() {
  Outcome o;
  constexpr std::size_t kSegments = 1000000;
  t::TempDir dir("accept-scale");
  {
    const t::SyntheticLexicon lexicon({.lexicon_size = 50000, .min_length = 3, .max_length = 30}, 7007);
    std::mt19937_64 rng(7008);
    std::ofstream src(dir / "big.src", std::ios::binary);
    std::ofstream tgt(dir / "big.tgt", std::ios::binary);
    for (std::size_t i = 0; i < kSegments; ++i) {
      auto p = lexicon.sample(rng);
      src << p.source << '\n';
      tgt << p.target << '\n';
    }
  }
  const auto start = std::chrono::steady_clock::now();
  auto reader = load_parallel_corpus(dir / "big.src", dir / "big.tgt");
  const auto ingested = ingest(reader, {});
  BuildOptions options;
  options.threads = 0;
  const auto m = build_wcm(ingested.corpus, ingested.source_vocab, ingested.target_vocab, WcmConfig{}, options);
  save_wcm(m, dir / "big.wcm");
  const double elapsed = seconds_since(start);
  const double peak_gib = static_cast<double>(peak_rss_kib()) / (1024.0 * 1024.0);
  o.require(ingested.corpus.size() == kSegments, "segment count");
  o.require(elapsed < 300.0, "build took " + fmt("%.1f", elapsed) + " s");
  o.require(peak_gib < 4.0, "peak RSS " + fmt("%.2f", peak_gib) + " GiB");
  o.note(std::to_string(ingested.corpus.source.token_count()) + " source tokens, " + std::to_string(m.size()) +
         " entries, ingest+build+save " + fmt("%.1f", elapsed) + " s, peak RSS " + fmt("%.2f", peak_gib) +
         " GiB, " + std::to_string(std::thread::hardware_concurrency()) + " hw threads");
  return o;
}

Outcome filtering(const t::SyntheticSpec& spec) {
  Outcome o;
  const t::SyntheticLexicon lexicon(spec, 6006);
  auto corpus = synthetic_corpus(lexicon, 6007);
  std::mt19937_64 rng(8008);
  for (auto i : pick(kPairs, kPairs / 10, rng)) {
    corpus[i].target = t::SyntheticLexicon::corrupt(corpus[i].target, rng);
    corpus[i].corrupted = true;
  }
  std::vector<TokenizedPair> pairs;
  std::string src;
  std::string tgt;
  for (const auto& p : corpus) {
    pairs.push_back({words(p.source), words(p.target)});
    src += p.source + '\n';
    tgt += p.target + '\n';
  }
  const auto m = t::build_from_pairs(pairs, {20, 10000, CountMode::Binary});

  std::istringstream src_in(src);
  std::istringstream tgt_in(tgt);
  ParallelCorpusReader reader(src_in, tgt_in);
  std::ostringstream ks, kt, ds, dt;
  const auto summary = filter_corpus(m, reader, 50, {ks, kt}, {ds, dt});

  // Recover the routing of each pair from the dropped stream, which keeps
  // input order.
  std::istringstream dropped_src(ds.str());
  std::istringstream dropped_tgt(dt.str());
  std::string next_src;
  std::string next_tgt;
  bool have = static_cast<bool>(std::getline(dropped_src, next_src)) &&
              static_cast<bool>(std::getline(dropped_tgt, next_tgt));
  std::size_t corrupted = 0;
  std::size_t corrupted_removed = 0;
  std::size_t clean = 0;
  std::size_t clean_removed = 0;
  for (const auto& p : corpus) {
    const bool removed = have && next_src == p.source && next_tgt == p.target;
    if (removed) {
      have = static_cast<bool>(std::getline(dropped_src, next_src)) &&
             static_cast<bool>(std::getline(dropped_tgt, next_tgt));
    }
    (p.corrupted ? corrupted : clean) += 1;
    (p.corrupted ? corrupted_removed : clean_removed) += removed ? 1 : 0;
  }
  o.require(!have, "dropped stream out of order");
  o.require(corrupted_removed + clean_removed == summary.dropped, "dropped count mismatch");
  const double corrupted_rate = 100.0 * static_cast<double>(corrupted_removed) / static_cast<double>(corrupted);
  const double clean_rate = 100.0 * static_cast<double>(clean_removed) / static_cast<double>(clean);
  o.require(corrupted_rate >= 80.0, "removed " + fmt("%.1f", corrupted_rate) + "% of corrupted pairs");
  o.require(clean_rate <= 10.0, "removed " + fmt("%.1f", clean_rate) + "% of clean pairs");
  o.note("corrupted removed " + std::to_string(corrupted_removed) + "/" + std::to_string(corrupted) + " (" +
         fmt("%.1f", corrupted_rate) + "%), clean removed " + std::to_string(clean_removed) + "/" +
         std::to_string(clean) + " (" + fmt("%.2f", clean_rate) + "%)");
  return o;
}

struct Criterion {
  int id;
  const char* name;
  double time_limit;  // seconds; 0 means the criterion times itself
  std::function<Outcome()> run;
};

}  // namespace

int main() {
  const std::vector<Criterion> criteria = {
      {1, "WCM oracle equivalence", 10.0, wcm_oracle},
      {2, "serialization round trip", 5.0, serialization},
      {3, "DE scoring properties", 5.0, scoring_properties},
      {4, "BLEU oracle", 0.0, bleu_oracle},
      {5, "Pearson", 0.0, pearson_checks},
      {6, "synthetic gradation", 60.0, [] { return gradation(kSynthetic); }},
      {7, "scale smoke test", 0.0, scale},
      {8, "filter_corpus", 0.0, [] { return filtering(kSynthetic); }},
  };
  // Same checks on Zipf-distributed words; reported, not gating.
  const std::vector<Criterion> diagnostics = {
      {6, "gradation, Zipf words", 0.0, [] { return gradation(kZipfSynthetic); }},
      {8, "filter_corpus, Zipf words", 0.0, [] { return filtering(kZipfSynthetic); }},
  };
  int failures = 0;
  for (const auto& c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome outcome;
    try {
      outcome = c.run();
    } catch (const std::exception& e) {
      outcome.require(false, std::string("exception: ") + e.what());
    }
    const double elapsed = seconds_since(start);
    if (c.time_limit > 0.0) {
      outcome.require(elapsed < c.time_limit,
                      "took " + fmt("%.2f", elapsed) + " s, limit " + fmt("%.0f", c.time_limit) + " s");
    }
    failures += outcome.pass ? 0 : 1;
    std::printf("%s  [%d] %-26s %7.2f s  %s\n", outcome.pass ? "PASS" : "FAIL", c.id, c.name, elapsed,
                outcome.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failures, criteria.size());
  for (const auto& d : diagnostics) {
    Outcome outcome;
    try {
      outcome = d.run();
    } catch (const std::exception& e) {
      outcome.require(false, std::string("exception: ") + e.what());
    }
    std::printf("INFO  [%d] %-26s %s  %s\n", d.id, d.name, outcome.pass ? "would pass" : "would fail",
                outcome.detail.c_str());
  }
  return failures == 0 ? 0 : 1;
}
