#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

#include "deqe/corpus.hpp"
#include "deqe/wcm.hpp"

namespace deqe {

// Percentage of eligible words with strong co-occurrence evidence.
// A segment with no eligible words scores 0 and is flagged degenerate.
struct DeScore {
  double value = 0.0;
  std::size_t eligible = 0;
  std::size_t evidenced = 0;
  bool degenerate = true;

  static DeScore from_counts(std::size_t eligible, std::size_t evidenced);

  friend bool operator==(const DeScore&, const DeScore&) = default;
};

struct ScoredSegment {
  std::size_t index = 0;
  DeScore de;
  std::optional<DeScore> reverse_de;
};

struct ScoreOptions {
  TokenizerConfig tokenizer;
  // Count distinct eligible types instead of token occurrences.
  bool by_type = false;
  bool reverse = false;
  unsigned threads = 1;
};

// Source -> hypothesis. Eligible source words are those not excluded as
// high-frequency; one is evidenced when it has an entry with any hypothesis
// type. OOV words stay in the denominator.
DeScore de_score(const CooccurrenceMatrix& matrix, const TokenizedSegment& source,
                 const TokenizedSegment& hypothesis, bool by_type = false);

// Hypothesis -> source, looking entries up through the column index. Low
// values point at target words the source does not support.
DeScore reverse_de_score(const CooccurrenceMatrix& matrix, const TokenizedSegment& source,
                         const TokenizedSegment& hypothesis, bool by_type = false);

// Scores aligned pairs in parallel; output is in input order.
std::vector<ScoredSegment> score_pairs(const CooccurrenceMatrix& matrix,
                                       std::span<const TokenizedPair> pairs,
                                       const ScoreOptions& options);

// Reads and tokenizes both files, then scores them. Throws AlignmentError on
// a line-count mismatch.
std::vector<ScoredSegment> score_file(const CooccurrenceMatrix& matrix,
                                      const std::filesystem::path& source_path,
                                      const std::filesystem::path& hypothesis_path,
                                      const ScoreOptions& options);

std::vector<TokenizedPair> read_tokenized_pairs(ParallelCorpusReader& reader,
                                                const TokenizerConfig& config);

// index TAB de TAB eligible TAB evidenced [TAB reverse_de]
void write_scores(std::ostream& out, std::span<const ScoredSegment> scores);

// Reads the forward scores back from write_scores output; '#' lines are
// skipped. Throws FormatError on malformed rows.
std::vector<DeScore> read_de_scores(std::istream& in);

}  // namespace deqe
