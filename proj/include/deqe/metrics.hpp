#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>

#include "deqe/corpus.hpp"
#include "deqe/error.hpp"

namespace deqe {

inline constexpr std::size_t kBleuOrder = 4;

// Clipped n-gram matches and hypothesis n-gram totals for orders 1..4, plus
// lengths. Corpus BLEU pools these over segments before taking ratios.
struct NgramStats {
  std::array<std::uint64_t, kBleuOrder> matches{};
  std::array<std::uint64_t, kBleuOrder> totals{};
  std::uint64_t hypothesis_length = 0;
  std::uint64_t reference_length = 0;

  NgramStats& operator+=(const NgramStats& other);
};

NgramStats ngram_stats(const TokenizedSegment& hypothesis, const TokenizedSegment& reference);

struct BleuResult {
  double score = 0.0;
  std::array<double, kBleuOrder> precisions{};
  double brevity_penalty = 0.0;
  std::uint64_t hypothesis_length = 0;
  std::uint64_t reference_length = 0;
};

// Turns pooled statistics into a score. With `smooth`, orders >= 2 use
// (matches + 1) / (totals + 1); an order with no hypothesis n-grams then
// contributes 1/1.
BleuResult bleu_from_stats(const NgramStats& stats, bool smooth);

// Single-reference BLEU-4 with no smoothing. Throws DataError on an empty
// corpus and AlignmentError on differing list lengths.
BleuResult corpus_bleu(std::span<const TokenizedSegment> hypotheses,
                       std::span<const TokenizedSegment> references);

// BLEU-4 on one pair with add-one smoothing for orders >= 2. An empty
// hypothesis scores 0 with brevity penalty 0.
BleuResult sentence_bleu(const TokenizedSegment& hypothesis, const TokenizedSegment& reference);

class UndefinedCorrelation : public DataError {
 public:
  using DataError::DataError;
};

struct CorrelationResult {
  double r = 0.0;
  std::size_t n = 0;
  double t_statistic = 0.0;
  double p_value = 1.0;
};

// Sample sizes above this use the normal approximation for the p-value.
inline constexpr std::size_t kExactTMaxSamples = 200;

// Pearson r with a two-tailed p-value from Student's t on n - 2 degrees of
// freedom. Throws UndefinedCorrelation when either input is constant,
// AlignmentError on a length mismatch and DataError when n < 3.
CorrelationResult pearson(std::span<const double> xs, std::span<const double> ys);

// Regularized incomplete beta I_x(a, b), evaluated with a continued fraction.
double incomplete_beta(double a, double b, double x);

double t_test_p_exact(double t, double df);
// Normal tail after the df-corrected transform
// z = t (1 - 1/(4 df)) / sqrt(1 + t^2 / (2 df)).
double t_test_p_normal(double t, double df);

}  // namespace deqe
