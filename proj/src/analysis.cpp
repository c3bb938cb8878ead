#include "deqe/analysis.hpp"

#include <charconv>
#include <cmath>
#include <ostream>
#include <stdexcept>

#include "deqe/error.hpp"

namespace deqe {

namespace {

void check_aligned(std::size_t scores, std::size_t hypotheses, std::size_t references,
                   std::string_view what) {
  if (scores != hypotheses || scores != references) {
    throw AlignmentError(std::string(what) + ": " + std::to_string(scores) + " scores, " +
                         std::to_string(hypotheses) + " hypotheses, " +
                         std::to_string(references) + " references");
  }
}

std::string format_threshold(double t) {
  char buf[32];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, t);
  return std::string(buf, end);
}

}  // namespace

std::string BucketSpec::label() const {
  return (kind == Kind::Below ? "<" : ">=") + format_threshold(threshold);
}

BucketSpec BucketSpec::parse(std::string_view text) {
  while (!text.empty() && text.front() == ' ') text.remove_prefix(1);
  while (!text.empty() && text.back() == ' ') text.remove_suffix(1);
  BucketSpec spec;
  if (text.starts_with(">=")) {
    spec.kind = Kind::AtOrAbove;
    text.remove_prefix(2);
  } else if (text.starts_with("<")) {
    spec.kind = Kind::Below;
    text.remove_prefix(1);
  } else {
    throw std::invalid_argument("bucket '" + std::string(text) + "' must start with '<' or '>='");
  }
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), spec.threshold);
  if (ec != std::errc() || ptr != text.data() + text.size() || text.empty()) {
    throw std::invalid_argument("bad bucket threshold '" + std::string(text) + "'");
  }
  if (!(spec.threshold >= 0.0 && spec.threshold <= 100.0)) {
    throw std::invalid_argument("bucket threshold " + std::string(text) + " outside [0, 100]");
  }
  return spec;
}

std::vector<BucketSpec> parse_buckets(std::string_view list) {
  std::vector<BucketSpec> out;
  while (!list.empty()) {
    const auto comma = list.find(',');
    out.push_back(BucketSpec::parse(list.substr(0, comma)));
    if (comma == std::string_view::npos) break;
    list.remove_prefix(comma + 1);
  }
  if (out.empty()) throw std::invalid_argument("empty bucket list");
  return out;
}

std::vector<BucketSpec> default_buckets() {
  using K = BucketSpec::Kind;
  return {{K::Below, 20},     {K::Below, 30},     {K::Below, 40},
          {K::Below, 50},     {K::AtOrAbove, 50}, {K::AtOrAbove, 60},
          {K::AtOrAbove, 70}, {K::AtOrAbove, 80}, {K::AtOrAbove, 90}};
}

BucketReport bucket_eval(std::span<const DeScore> scores,
                         std::span<const TokenizedSegment> hypotheses,
                         std::span<const TokenizedSegment> references,
                         std::span<const BucketSpec> buckets) {
  check_aligned(scores.size(), hypotheses.size(), references.size(), "bucket_eval");
  std::vector<NgramStats> stats;
  stats.reserve(scores.size());
  for (std::size_t i = 0; i < scores.size(); ++i) stats.push_back(ngram_stats(hypotheses[i], references[i]));

  BucketReport report;
  report.total = scores.size();
  for (const auto& s : scores) report.degenerate += s.degenerate ? 1 : 0;
  for (const auto& spec : buckets) {
    BucketRow row{spec, 0, 0, std::nullopt};
    NgramStats pooled;
    for (std::size_t i = 0; i < scores.size(); ++i) {
      if (!spec.contains(scores[i].value)) continue;
      ++row.segments;
      if (scores[i].degenerate) ++row.degenerate;
      pooled += stats[i];
    }
    if (row.segments > 0) row.bleu = bleu_from_stats(pooled, false);
    report.rows.push_back(row);
  }
  return report;
}

HistogramReport histogram(std::span<const double> values, double bin_width) {
  if (!(bin_width > 0.0 && bin_width <= 100.0)) {
    throw std::invalid_argument("histogram bin width must be in (0, 100]");
  }
  const double ratio = 100.0 / bin_width;
  const auto bins = static_cast<std::size_t>(std::llround(ratio));
  if (bins == 0 || std::fabs(ratio - static_cast<double>(bins)) > 1e-9 * ratio) {
    throw std::invalid_argument("histogram bin width " + format_threshold(bin_width) +
                                " does not divide 100 evenly");
  }
  HistogramReport report;
  report.bin_width = bin_width;
  report.total = values.size();
  for (std::size_t k = 0; k < bins; ++k) {
    report.bins.push_back({static_cast<double>(k) * bin_width,
                           k + 1 == bins ? 100.0 : static_cast<double>(k + 1) * bin_width, 0});
  }
  for (double v : values) {
    if (!(v >= 0.0 && v <= 100.0)) {
      throw DataError("histogram value " + format_threshold(v) + " outside [0, 100]");
    }
    auto k = std::min(bins - 1, static_cast<std::size_t>(v / bin_width));
    // Settle rounding in v / w against the bounds as actually stored.
    while (k + 1 < bins && v >= report.bins[k + 1].lower) ++k;
    while (k > 0 && v < report.bins[k].lower) --k;
    ++report.bins[k].count;
  }
  return report;
}

HistogramReport histogram(std::span<const DeScore> scores, double bin_width) {
  std::vector<double> values;
  values.reserve(scores.size());
  for (const auto& s : scores) values.push_back(s.value);
  return histogram(std::span<const double>(values), bin_width);
}

CorrelationResult correlate_de_bleu(std::span<const DeScore> scores,
                                    std::span<const TokenizedSegment> hypotheses,
                                    std::span<const TokenizedSegment> references) {
  check_aligned(scores.size(), hypotheses.size(), references.size(), "correlate_de_bleu");
  std::vector<double> de;
  std::vector<double> bleu;
  de.reserve(scores.size());
  bleu.reserve(scores.size());
  for (std::size_t i = 0; i < scores.size(); ++i) {
    de.push_back(scores[i].value);
    bleu.push_back(sentence_bleu(hypotheses[i], references[i]).score);
  }
  return pearson(de, bleu);
}

FilterSummary filter_corpus(const CooccurrenceMatrix& matrix, ParallelCorpusReader& corpus,
                            double min_de, PairSink kept, PairSink dropped,
                            const FilterOptions& options) {
  if (!(min_de >= 0.0 && min_de <= 100.0)) {
    throw std::invalid_argument("min_de must be in [0, 100], got " + format_threshold(min_de));
  }
  FilterSummary summary;
  summary.min_de = min_de;

  ScoreOptions score_options;
  score_options.by_type = options.by_type;
  score_options.threads = options.threads;

  std::vector<double> values;
  std::vector<SegmentPair> raw;
  std::vector<TokenizedPair> chunk;
  const std::size_t chunk_size = std::max<std::size_t>(1, options.chunk_size);
  auto flush = [&] {
    const auto scored = score_pairs(matrix, chunk, score_options);
    for (std::size_t i = 0; i < raw.size(); ++i) {
      const auto& de = scored[i].de;
      values.push_back(de.value);
      if (de.degenerate) ++summary.degenerate;
      auto& sink = de.value >= min_de ? kept : dropped;
      (de.value >= min_de ? summary.kept : summary.dropped) += 1;
      sink.source << raw[i].source << '\n';
      sink.target << raw[i].target << '\n';
    }
    summary.total += raw.size();
    raw.clear();
    chunk.clear();
  };
  while (auto pair = corpus.next()) {
    chunk.push_back({tokenize(pair->source, options.tokenizer), tokenize(pair->target, options.tokenizer)});
    raw.push_back(std::move(*pair));
    if (raw.size() == chunk_size) flush();
  }
  if (!raw.empty()) flush();
  summary.histogram = histogram(std::span<const double>(values), options.histogram_bin_width);
  return summary;
}

}  // namespace deqe
