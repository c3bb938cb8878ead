#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "deqe/corpus.hpp"
#include "deqe/metrics.hpp"
#include "deqe/scoring.hpp"
#include "deqe/wcm.hpp"

namespace deqe {

struct BucketSpec {
  enum class Kind { Below, AtOrAbove };

  Kind kind = Kind::Below;
  double threshold = 0.0;

  bool contains(double de) const { return kind == Kind::Below ? de < threshold : de >= threshold; }
  std::string label() const;

  // "<20" or ">=50"; throws std::invalid_argument on anything else or on a
  // threshold outside [0, 100].
  static BucketSpec parse(std::string_view text);

  friend bool operator==(const BucketSpec&, const BucketSpec&) = default;
};

// Comma-separated list of BucketSpec::parse items.
std::vector<BucketSpec> parse_buckets(std::string_view list);

// <20, <30, <40, <50, >=50, >=60, >=70, >=80, >=90
std::vector<BucketSpec> default_buckets();

struct BucketRow {
  BucketSpec spec;
  std::size_t segments = 0;
  // Members with no eligible words (scored 0).
  std::size_t degenerate = 0;
  // Absent for an empty bucket.
  std::optional<BleuResult> bleu;
};

struct BucketReport {
  std::size_t total = 0;
  std::size_t degenerate = 0;
  std::vector<BucketRow> rows;
};

// Corpus BLEU over the members of each bucket. Throws AlignmentError when the
// three inputs differ in length.
BucketReport bucket_eval(std::span<const DeScore> scores,
                         std::span<const TokenizedSegment> hypotheses,
                         std::span<const TokenizedSegment> references,
                         std::span<const BucketSpec> buckets);

struct HistogramBin {
  double lower = 0.0;
  double upper = 0.0;
  std::size_t count = 0;
};

// Bins are [k*w, (k+1)*w) except the last, which is closed at 100.
struct HistogramReport {
  double bin_width = 5.0;
  std::size_t total = 0;
  std::vector<HistogramBin> bins;
};

// Throws std::invalid_argument unless bin_width > 0 divides 100 evenly, and
// DataError for a value outside [0, 100].
HistogramReport histogram(std::span<const double> values, double bin_width = 5.0);
HistogramReport histogram(std::span<const DeScore> scores, double bin_width = 5.0);

// Pearson correlation between DE values and smoothed sentence BLEU.
CorrelationResult correlate_de_bleu(std::span<const DeScore> scores,
                                    std::span<const TokenizedSegment> hypotheses,
                                    std::span<const TokenizedSegment> references);

struct PairSink {
  std::ostream& source;
  std::ostream& target;
};

struct FilterOptions {
  TokenizerConfig tokenizer;
  bool by_type = false;
  double histogram_bin_width = 5.0;
  unsigned threads = 1;
  std::size_t chunk_size = 50000;
};

struct FilterSummary {
  double min_de = 0.0;
  std::size_t total = 0;
  std::size_t kept = 0;
  std::size_t dropped = 0;
  std::size_t degenerate = 0;
  HistogramReport histogram;
};

// Scores every pair with the target side as hypothesis and routes the raw
// lines to `kept` (DE >= min_de) or `dropped`, preserving input order within
// each stream. Throws std::invalid_argument when min_de is outside [0, 100].
FilterSummary filter_corpus(const CooccurrenceMatrix& matrix, ParallelCorpusReader& corpus,
                            double min_de, PairSink kept, PairSink dropped,
                            const FilterOptions& options = {});

}  // namespace deqe
