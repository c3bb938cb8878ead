// de-qe: reference-free translation quality estimation from a word
// co-occurrence matrix built over the training bitext.

#include <CLI11.hpp>

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include "deqe/analysis.hpp"
#include "deqe/corpus.hpp"
#include "deqe/error.hpp"
#include "deqe/log.hpp"
#include "deqe/metrics.hpp"
#include "deqe/parallel.hpp"
#include "deqe/report.hpp"
#include "deqe/scoring.hpp"
#include "deqe/wcm.hpp"

namespace {

using namespace deqe;

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitData = 2;

struct UsageError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

unsigned threads_from(unsigned flag) {
  if (flag > 0) return flag;
  if (const char* env = std::getenv("DE_QE_THREADS")) {
    try {
      const long v = std::stol(env);
      if (v > 0) return static_cast<unsigned>(v);
    } catch (const std::exception&) {
    }
    log_warn(std::string("ignoring invalid DE_QE_THREADS='") + env + "'");
  }
  return resolve_threads(0);
}

// "-" selects stdout.
class Output {
 public:
  explicit Output(const std::string& path) : path_(path) {
    if (path == "-" || path.empty()) {
      stream_ = &std::cout;
    } else {
      file_ = std::make_unique<std::ofstream>(path, std::ios::binary);
      if (!*file_) throw DataError("cannot write '" + path + "'");
      stream_ = file_.get();
    }
  }
  std::ostream& operator*() { return *stream_; }
  void close() {
    stream_->flush();
    if (!*stream_) throw DataError("error writing '" + path_ + "'");
  }

 private:
  std::string path_;
  std::unique_ptr<std::ofstream> file_;
  std::ostream* stream_ = nullptr;
};

std::ifstream open_input(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open '" + path + "'");
  return in;
}

std::vector<double> read_reals(const std::string& path) {
  auto in = open_input(path);
  std::vector<double> values;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line.front() == '#') continue;
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(line, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || line.find_first_not_of(" \t", used) != std::string::npos) {
      throw FormatError("'" + path + "' line " + std::to_string(line_no) + ": expected one real number");
    }
    values.push_back(v);
  }
  return values;
}

struct TokenizerFlags {
  bool lowercase = false;
  bool strip_punct = false;

  void add_to(CLI::App* app) {
    app->add_flag("--lowercase", lowercase, "Case-fold tokens");
    app->add_flag("--strip-punct", strip_punct, "Remove punctuation characters from tokens");
  }
  TokenizerConfig config() const { return {lowercase, strip_punct}; }
  void echo(RunConfig& rc) const { rc.set("lowercase", lowercase).set("strip_punct", strip_punct); }
};

ParallelCorpusReader open_corpus(const std::string& source, const std::string& target,
                                 const std::string& tsv) {
  if (!tsv.empty()) {
    if (!source.empty() || !target.empty()) throw UsageError("--tsv excludes --source/--target");
    return ParallelCorpusReader::open_tsv(tsv);
  }
  if (source.empty() || target.empty()) throw UsageError("--source and --target are required (or --tsv)");
  return ParallelCorpusReader::open(source, target);
}

std::vector<TokenizedSegment> read_segments(const std::string& path, const TokenizerConfig& config) {
  auto in = open_input(path);
  std::vector<TokenizedSegment> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (!is_valid_utf8(line)) {
      throw FormatError("invalid UTF-8 in '" + path + "' at line " + std::to_string(line_no + 1));
    }
    out.push_back(tokenize(line, config));
    ++line_no;
  }
  return out;
}

void require_same_length(std::size_t a, const std::string& a_name, std::size_t b,
                         const std::string& b_name) {
  if (a != b) {
    throw AlignmentError("line count mismatch: '" + a_name + "' has " + std::to_string(a) +
                         " lines, '" + b_name + "' has " + std::to_string(b) + " lines");
  }
}

// --- subcommands ----------------------------------------------------------

struct VocabStatsCmd {
  std::string source, target, tsv, out = "-";
  TokenizerFlags tok;
  std::vector<std::uint64_t> thresholds{1, 5, 10, 20};
  std::uint64_t hifreq_cutoff = 10000;

  CLI::App* command = nullptr;

  void add(CLI::App& app) {
    auto* sub = app.add_subcommand("vocab-stats", "Vocabulary frequency statistics for both sides");
    sub->add_option("--source", source, "Source side, one segment per line");
    sub->add_option("--target", target, "Target side, one segment per line");
    sub->add_option("--tsv", tsv, "Single file with source<TAB>target per line");
    sub->add_option("--thresholds", thresholds, "Frequency thresholds")->delimiter(',');
    sub->add_option("--hifreq-cutoff", hifreq_cutoff, "High-frequency cutoff")->check(CLI::PositiveNumber);
    sub->add_option("--out", out, "Output report (default stdout)");
    tok.add_to(sub);
    command = sub;
  }

  void run() {
    if (thresholds.empty()) throw UsageError("--thresholds must list at least one value");
    auto reader = open_corpus(source, target, tsv);
    Vocabulary source_vocab(Side::Source);
    Vocabulary target_vocab(Side::Target);
    while (auto pair = reader.next()) {
      source_vocab.add(tokenize(pair->source, tok.config()));
      target_vocab.add(tokenize(pair->target, tok.config()));
    }
    RunConfig rc("vocab-stats");
    rc.set("source", source).set("target", target).set("tsv", tsv);
    tok.echo(rc);
    std::string joined;
    for (auto t : thresholds) joined += (joined.empty() ? "" : ",") + std::to_string(t);
    rc.set("thresholds", joined).set("hifreq_cutoff", hifreq_cutoff);
    rc.set("segments", reader.lines_read());

    Output o(out);
    rc.write_header(*o);
    *o << "#side\tmetric\tthreshold\ttypes\tpercent\n";
    write_vocab_stats(*o, "source", vocab_stats(source_vocab, thresholds, hifreq_cutoff));
    write_vocab_stats(*o, "target", vocab_stats(target_vocab, thresholds, hifreq_cutoff));
    o.close();
  }
};

struct BuildWcmCmd {
  std::string source, target, tsv, out;
  TokenizerFlags tok;
  std::uint64_t min_cooc = 20;
  std::uint64_t hifreq_cutoff = 10000;
  std::string count_mode = "binary";
  bool no_target_exclusion = false;
  unsigned threads = 0;

  CLI::App* command = nullptr;

  void add(CLI::App& app) {
    auto* sub = app.add_subcommand("build-wcm", "Build the word co-occurrence matrix from a bitext");
    sub->add_option("--source", source, "Source side, one segment per line");
    sub->add_option("--target", target, "Target side, one segment per line");
    sub->add_option("--tsv", tsv, "Single file with source<TAB>target per line");
    sub->add_option("--out", out, "Output WCM file")->required();
    sub->add_option("--min-cooc", min_cooc, "Minimum co-occurrence count kept")->check(CLI::PositiveNumber);
    sub->add_option("--hifreq-cutoff", hifreq_cutoff, "Exclude types more frequent than this")
        ->check(CLI::PositiveNumber);
    sub->add_option("--count-mode", count_mode, "binary (per segment) or product (occurrence product)")
        ->check(CLI::IsMember({"binary", "product"}));
    sub->add_flag("--no-target-exclusion", no_target_exclusion,
                  "Apply the high-frequency exclusion to source types only");
    sub->add_option("--threads", threads, "Worker threads (default: DE_QE_THREADS or all cores)");
    tok.add_to(sub);
    command = sub;
  }

  void run() {
    auto reader = open_corpus(source, target, tsv);
    WcmConfig config{min_cooc, hifreq_cutoff, parse_count_mode(count_mode)};
    BuildOptions options;
    options.threads = threads_from(threads);
    options.exclude_target_hifreq = !no_target_exclusion;

    const auto ingested = ingest(reader, tok.config());
    log_info("read " + std::to_string(ingested.corpus.size()) + " segments; vocabulary " +
             std::to_string(ingested.source_vocab.size()) + " source / " +
             std::to_string(ingested.target_vocab.size()) + " target types");
    const auto matrix = build_wcm(ingested.corpus, ingested.source_vocab, ingested.target_vocab,
                                  config, options);
    log_info("matrix has " + std::to_string(matrix.size()) + " entries over " +
             std::to_string(matrix.source_tokens().size()) + " source types");
    save_wcm(matrix, out);
  }
};

struct ScoreCmd {
  std::string wcm, source, hypothesis, out = "-";
  TokenizerFlags tok;
  bool reverse = false;
  bool by_type = false;
  unsigned threads = 0;

  CLI::App* command = nullptr;

  void add(CLI::App& app) {
    auto* sub = app.add_subcommand("score", "Per-segment DE scores for source/hypothesis files");
    sub->add_option("--wcm", wcm, "WCM file from build-wcm")->required();
    sub->add_option("--source", source, "Source segments")->required();
    sub->add_option("--hypothesis", hypothesis, "Translations to score")->required();
    sub->add_option("--out", out, "Output TSV (default stdout)");
    sub->add_flag("--reverse", reverse, "Also emit the target-to-source score");
    sub->add_flag("--by-type", by_type, "Count distinct types instead of tokens");
    sub->add_option("--threads", threads, "Worker threads (default: DE_QE_THREADS or all cores)");
    tok.add_to(sub);
    command = sub;
  }

  void run() {
    const auto matrix = load_wcm(wcm);
    ScoreOptions options{tok.config(), by_type, reverse, threads_from(threads)};
    const auto scores = score_file(matrix, source, hypothesis, options);

    RunConfig rc("score");
    rc.set("wcm", wcm).set("source", source).set("hypothesis", hypothesis);
    rc.set("reverse", reverse).set("by_type", by_type);
    tok.echo(rc);
    Output o(out);
    rc.write_header(*o);
    *o << "#index\tde\teligible\tevidenced" << (reverse ? "\treverse_de" : "") << '\n';
    write_scores(*o, scores);
    o.close();
  }
};

struct BleuCmd {
  std::string hypothesis, reference, out;
  TokenizerFlags tok;
  bool sentence_level = false;

  CLI::App* command = nullptr;

  void add(CLI::App& app) {
    auto* sub = app.add_subcommand("bleu", "Corpus BLEU, optionally per-sentence smoothed BLEU");
    sub->add_option("--hypothesis", hypothesis, "Hypothesis file")->required();
    sub->add_option("--reference", reference, "Reference file")->required();
    sub->add_flag("--sentence-level", sentence_level, "Write per-sentence BLEU to --out");
    sub->add_option("--out", out, "Per-sentence output (with --sentence-level)");
    tok.add_to(sub);
    command = sub;
  }

  void run() {
    if (sentence_level && out.empty()) throw UsageError("--sentence-level requires --out");
    const auto hyps = read_segments(hypothesis, tok.config());
    const auto refs = read_segments(reference, tok.config());
    require_same_length(hyps.size(), hypothesis, refs.size(), reference);

    RunConfig rc("bleu");
    rc.set("hypothesis", hypothesis).set("reference", reference);
    tok.echo(rc);
    rc.set("sentence_level", sentence_level);
    if (sentence_level) {
      Output o(out);
      rc.write_header(*o);
      *o << "#index\tbleu\n";
      for (std::size_t i = 0; i < hyps.size(); ++i) {
        *o << i << '\t' << format_fixed(sentence_bleu(hyps[i], refs[i]).score, 6) << '\n';
      }
      o.close();
    }
    Output summary("-");
    rc.write_header(*summary);
    write_bleu(*summary, corpus_bleu(hyps, refs));
    summary.close();
  }
};

struct CorrelateCmd {
  std::string x, y;

  CLI::App* command = nullptr;

  void add(CLI::App& app) {
    auto* sub = app.add_subcommand("correlate", "Pearson correlation of two columns of reals");
    sub->add_option("--x", x, "One real per line")->required();
    sub->add_option("--y", y, "One real per line")->required();
    command = sub;
  }

  void run() {
    const auto xs = read_reals(x);
    const auto ys = read_reals(y);
    require_same_length(xs.size(), x, ys.size(), y);
    const auto result = pearson(xs, ys);
    RunConfig rc("correlate");
    rc.set("x", x).set("y", y);
    Output o("-");
    rc.write_header(*o);
    write_correlation(*o, result);
    o.close();
  }
};

struct BucketEvalCmd {
  std::string wcm, source, hypothesis, reference, out = "-";
  std::string buckets = "<20,<30,<40,<50,>=50,>=60,>=70,>=80,>=90";
  TokenizerFlags tok;
  bool by_type = false;
  unsigned threads = 0;

  CLI::App* command = nullptr;

  void add(CLI::App& app) {
    auto* sub = app.add_subcommand("bucket-eval", "Corpus BLEU per DE-score bucket");
    sub->add_option("--wcm", wcm, "WCM file from build-wcm")->required();
    sub->add_option("--source", source, "Source segments")->required();
    sub->add_option("--hypothesis", hypothesis, "MT output")->required();
    sub->add_option("--reference", reference, "Reference translations")->required();
    sub->add_option("--buckets", buckets, "Comma-separated buckets such as <50,>=50");
    sub->add_option("--out", out, "Output report (default stdout)");
    sub->add_flag("--by-type", by_type, "Count distinct types instead of tokens");
    sub->add_option("--threads", threads, "Worker threads (default: DE_QE_THREADS or all cores)");
    tok.add_to(sub);
    command = sub;
  }

  void run() {
    const auto specs = parse_buckets(buckets);
    const auto matrix = load_wcm(wcm);
    ScoreOptions options{tok.config(), by_type, false, threads_from(threads)};
    const auto scored = score_file(matrix, source, hypothesis, options);
    const auto refs = read_segments(reference, tok.config());
    require_same_length(scored.size(), hypothesis, refs.size(), reference);

    std::vector<DeScore> scores;
    std::vector<TokenizedSegment> hyps = read_segments(hypothesis, tok.config());
    for (const auto& s : scored) scores.push_back(s.de);
    const auto report = bucket_eval(scores, hyps, refs, specs);

    RunConfig rc("bucket-eval");
    rc.set("wcm", wcm).set("source", source).set("hypothesis", hypothesis).set("reference", reference);
    rc.set("buckets", buckets).set("by_type", by_type);
    tok.echo(rc);
    Output o(out);
    rc.write_header(*o);
    try {
      const auto c = correlate_de_bleu(scores, hyps, refs);
      o.operator*() << "# sentence_correlation r=" << format_fixed(c.r, 6)
                    << " t=" << format_fixed(c.t_statistic, 6) << " p=" << c.p_value
                    << " n=" << c.n << '\n';
    } catch (const DataError& e) {
      *o << "# sentence_correlation undefined: " << e.what() << '\n';
    }
    write_bucket_report(*o, report);
    o.close();
  }
};

struct HistogramCmd {
  std::string scores, out = "-", chart;
  double bin_width = 5.0;

  CLI::App* command = nullptr;

  void add(CLI::App& app) {
    auto* sub = app.add_subcommand("histogram", "Histogram of DE scores from a score file");
    sub->add_option("--scores", scores, "Output of `de-qe score`")->required();
    sub->add_option("--bin-width", bin_width, "Bin width; must divide 100");
    sub->add_option("--out", out, "Output TSV (default stdout)");
    sub->add_option("--chart", chart, "Also write a text bar chart here");
    command = sub;
  }

  void run() {
    auto in = open_input(scores);
    const auto values = read_de_scores(in);
    const auto report = histogram(values, bin_width);
    RunConfig rc("histogram");
    rc.set("scores", scores).set("bin_width", bin_width);
    Output o(out);
    rc.write_header(*o);
    *o << "# total=" << report.total << '\n';
    write_histogram(*o, report);
    o.close();
    if (!chart.empty()) {
      Output c(chart);
      render_histogram_chart(*c, report);
      c.close();
    }
  }
};

struct FilterCmd {
  std::string wcm, source, target, tsv, kept_prefix, dropped_prefix, out = "-";
  double min_de = 50.0;
  double bin_width = 5.0;
  TokenizerFlags tok;
  bool by_type = false;
  unsigned threads = 0;

  CLI::App* command = nullptr;

  void add(CLI::App& app) {
    auto* sub = app.add_subcommand("filter", "Split a bitext by DE score of target against source");
    sub->add_option("--wcm", wcm, "WCM file from build-wcm")->required();
    sub->add_option("--source", source, "Source side");
    sub->add_option("--target", target, "Target side");
    sub->add_option("--tsv", tsv, "Single file with source<TAB>target per line");
    sub->add_option("--min-de", min_de, "Keep pairs scoring at least this")->check(CLI::Range(0.0, 100.0));
    sub->add_option("--kept-prefix", kept_prefix, "Writes <prefix>.src and <prefix>.tgt")->required();
    sub->add_option("--dropped-prefix", dropped_prefix, "Writes <prefix>.src and <prefix>.tgt")->required();
    sub->add_option("--bin-width", bin_width, "Histogram bin width in the summary");
    sub->add_option("--out", out, "Summary report (default stdout)");
    sub->add_flag("--by-type", by_type, "Count distinct types instead of tokens");
    sub->add_option("--threads", threads, "Worker threads (default: DE_QE_THREADS or all cores)");
    tok.add_to(sub);
    command = sub;
  }

  void run() {
    const auto matrix = load_wcm(wcm);
    auto reader = open_corpus(source, target, tsv);
    Output kept_src(kept_prefix + ".src");
    Output kept_tgt(kept_prefix + ".tgt");
    Output dropped_src(dropped_prefix + ".src");
    Output dropped_tgt(dropped_prefix + ".tgt");
    FilterOptions options;
    options.tokenizer = tok.config();
    options.by_type = by_type;
    options.histogram_bin_width = bin_width;
    options.threads = threads_from(threads);
    const auto summary = filter_corpus(matrix, reader, min_de, {*kept_src, *kept_tgt},
                                       {*dropped_src, *dropped_tgt}, options);
    kept_src.close();
    kept_tgt.close();
    dropped_src.close();
    dropped_tgt.close();

    RunConfig rc("filter");
    rc.set("wcm", wcm).set("source", source).set("target", target).set("tsv", tsv);
    rc.set("min_de", min_de).set("kept_prefix", kept_prefix).set("dropped_prefix", dropped_prefix);
    rc.set("bin_width", bin_width).set("by_type", by_type);
    tok.echo(rc);
    Output o(out);
    rc.write_header(*o);
    write_filter_summary(*o, summary);
    o.close();
  }
};

void print_usage_for(const CLI::App& app, std::ostream& out) {
  for (const auto* sub : app.get_subcommands()) {
    out << sub->help();
    return;
  }
  out << app.help();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"de-qe: direct-evidence translation quality estimation"};
  app.name("de-qe");
  app.require_subcommand(1);
  bool verbose = false;
  bool quiet = false;
  app.add_flag("-v,--verbose", verbose, "Progress and summary messages on stderr");
  app.add_flag("-q,--quiet", quiet, "Only errors on stderr");

  VocabStatsCmd vocab_stats_cmd;
  BuildWcmCmd build_wcm_cmd;
  ScoreCmd score_cmd;
  BleuCmd bleu_cmd;
  CorrelateCmd correlate_cmd;
  BucketEvalCmd bucket_eval_cmd;
  HistogramCmd histogram_cmd;
  FilterCmd filter_cmd;
  vocab_stats_cmd.add(app);
  build_wcm_cmd.add(app);
  score_cmd.add(app);
  bleu_cmd.add(app);
  correlate_cmd.add(app);
  bucket_eval_cmd.add(app);
  histogram_cmd.add(app);
  filter_cmd.add(app);
  try {
    app.parse(argc, argv);
    set_log_level(quiet ? LogLevel::Quiet : verbose ? LogLevel::Info : LogLevel::Warn);
    if (vocab_stats_cmd.command->parsed()) vocab_stats_cmd.run();
    if (build_wcm_cmd.command->parsed()) build_wcm_cmd.run();
    if (score_cmd.command->parsed()) score_cmd.run();
    if (bleu_cmd.command->parsed()) bleu_cmd.run();
    if (correlate_cmd.command->parsed()) correlate_cmd.run();
    if (bucket_eval_cmd.command->parsed()) bucket_eval_cmd.run();
    if (histogram_cmd.command->parsed()) histogram_cmd.run();
    if (filter_cmd.command->parsed()) filter_cmd.run();
  } catch (const CLI::Success& e) {
    return app.exit(e) == 0 ? kExitOk : kExitUsage;
  } catch (const CLI::ParseError& e) {
    std::cerr << "de-qe: " << e.what() << "\n\n";
    print_usage_for(app, std::cerr);
    return kExitUsage;
  } catch (const UsageError& e) {
    std::cerr << "de-qe: " << e.what() << "\n\n";
    print_usage_for(app, std::cerr);
    return kExitUsage;
  } catch (const std::invalid_argument& e) {
    std::cerr << "de-qe: " << e.what() << '\n';
    return kExitUsage;
  } catch (const DataError& e) {
    std::cerr << "de-qe: " << e.what() << '\n';
    return kExitData;
  } catch (const std::exception& e) {
    std::cerr << "de-qe: " << e.what() << '\n';
    return kExitData;
  }
  return kExitOk;
}
