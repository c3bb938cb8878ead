#include <algorithm>
#include <cmath>
#include <string>
#include <unordered_map>

#include "deqe/metrics.hpp"

namespace deqe {

namespace {

using NgramCounts = std::unordered_map<std::string, std::uint32_t>;

// Tokens carry no whitespace, so a space-joined key is unambiguous.
NgramCounts count_ngrams(const std::vector<std::string>& tokens, std::size_t n) {
  NgramCounts counts;
  if (tokens.size() < n) return counts;
  std::string key;
  for (std::size_t i = 0; i + n <= tokens.size(); ++i) {
    key = tokens[i];
    for (std::size_t k = 1; k < n; ++k) {
      key += ' ';
      key += tokens[i + k];
    }
    ++counts[key];
  }
  return counts;
}

}  // namespace

NgramStats& NgramStats::operator+=(const NgramStats& other) {
  for (std::size_t n = 0; n < kBleuOrder; ++n) {
    matches[n] += other.matches[n];
    totals[n] += other.totals[n];
  }
  hypothesis_length += other.hypothesis_length;
  reference_length += other.reference_length;
  return *this;
}

NgramStats ngram_stats(const TokenizedSegment& hypothesis, const TokenizedSegment& reference) {
  NgramStats stats;
  stats.hypothesis_length = hypothesis.length();
  stats.reference_length = reference.length();
  for (std::size_t n = 1; n <= kBleuOrder; ++n) {
    const auto hyp = count_ngrams(hypothesis.tokens, n);
    const auto ref = count_ngrams(reference.tokens, n);
    std::uint64_t clipped = 0;
    for (const auto& [gram, c] : hyp) {
      if (auto it = ref.find(gram); it != ref.end()) clipped += std::min(c, it->second);
    }
    stats.matches[n - 1] = clipped;
    stats.totals[n - 1] = hypothesis.length() >= n ? hypothesis.length() - n + 1 : 0;
  }
  return stats;
}

BleuResult bleu_from_stats(const NgramStats& stats, bool smooth) {
  BleuResult result;
  result.hypothesis_length = stats.hypothesis_length;
  result.reference_length = stats.reference_length;

  const auto hyp = static_cast<double>(stats.hypothesis_length);
  const auto ref = static_cast<double>(stats.reference_length);
  if (stats.hypothesis_length == 0) {
    result.brevity_penalty = stats.reference_length == 0 ? 1.0 : 0.0;
  } else if (stats.hypothesis_length >= stats.reference_length) {
    result.brevity_penalty = 1.0;
  } else {
    result.brevity_penalty = std::exp(1.0 - ref / hyp);
  }

  double log_sum = 0.0;
  bool zero = false;
  for (std::size_t n = 0; n < kBleuOrder; ++n) {
    const auto m = static_cast<double>(stats.matches[n]);
    const auto t = static_cast<double>(stats.totals[n]);
    double p = 0.0;
    if (smooth && n > 0) {
      p = (m + 1.0) / (t + 1.0);
    } else if (stats.totals[n] > 0) {
      p = m / t;
    }
    result.precisions[n] = p;
    if (p <= 0.0) {
      zero = true;
    } else {
      log_sum += std::log(p);
    }
  }
  if (zero || result.brevity_penalty == 0.0) {
    result.score = 0.0;
  } else {
    result.score = 100.0 * result.brevity_penalty * std::exp(log_sum / kBleuOrder);
  }
  return result;
}

BleuResult corpus_bleu(std::span<const TokenizedSegment> hypotheses,
                       std::span<const TokenizedSegment> references) {
  if (hypotheses.size() != references.size()) {
    throw AlignmentError("corpus_bleu: " + std::to_string(hypotheses.size()) +
                         " hypotheses vs " + std::to_string(references.size()) + " references");
  }
  if (hypotheses.empty()) throw DataError("corpus_bleu: empty corpus");
  NgramStats pooled;
  for (std::size_t i = 0; i < hypotheses.size(); ++i) pooled += ngram_stats(hypotheses[i], references[i]);
  return bleu_from_stats(pooled, false);
}

BleuResult sentence_bleu(const TokenizedSegment& hypothesis, const TokenizedSegment& reference) {
  if (hypothesis.empty()) {
    BleuResult empty;
    empty.reference_length = reference.length();
    return empty;
  }
  return bleu_from_stats(ngram_stats(hypothesis, reference), true);
}

}  // namespace deqe
