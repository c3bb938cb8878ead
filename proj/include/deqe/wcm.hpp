#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "deqe/corpus.hpp"

namespace deqe {

enum class CountMode {
  // +1 per segment in which both types appear.
  Binary,
  // +occurrences(i) * occurrences(j) per segment.
  Product,
};

std::string_view count_mode_name(CountMode mode);
// Accepts "binary"/"product" (and the long forms "per-segment-binary",
// "occurrence-product"). Throws std::invalid_argument otherwise.
CountMode parse_count_mode(std::string_view name);

inline constexpr std::uint64_t kNoCutoff = std::numeric_limits<std::uint64_t>::max();

struct WcmConfig {
  std::uint64_t min_cooccurrence = 20;
  // Types with raw frequency strictly above this are excluded.
  std::uint64_t hifreq_cutoff = 10000;
  CountMode count_mode = CountMode::Binary;

  void validate() const;

  friend bool operator==(const WcmConfig&, const WcmConfig&) = default;
};

struct BuildOptions {
  unsigned threads = 1;
  // Apply the high-frequency exclusion to target types as well.
  bool exclude_target_hifreq = true;
  std::size_t long_segment_tokens = 1000;
};

struct WcmEntry {
  std::string source;
  std::string target;
  std::uint64_t count = 0;

  friend bool operator==(const WcmEntry&, const WcmEntry&) = default;
  friend auto operator<=>(const WcmEntry&, const WcmEntry&) = default;
};

// Immutable sparse co-occurrence matrix. Tokens on each side are indexed in
// byte-lexicographic order, so two matrices with the same entries have the
// same internal layout no matter how they were produced. Rows (source ->
// targets) and columns (target -> sources) are both indexed for lookup.
class CooccurrenceMatrix {
 public:
  CooccurrenceMatrix() = default;

  // Validates and indexes. Throws FormatError when an entry is duplicated,
  // falls below config.min_cooccurrence, or touches an excluded token.
  static CooccurrenceMatrix from_entries(WcmConfig config, std::vector<WcmEntry> entries,
                                         std::vector<std::string> excluded_source = {},
                                         std::vector<std::string> excluded_target = {});

  const WcmConfig& config() const { return config_; }
  std::size_t size() const { return row_targets_.size(); }
  bool empty() const { return row_targets_.empty(); }

  // Entries sorted by (source, target).
  std::vector<WcmEntry> entries() const;

  const std::vector<std::string>& source_tokens() const { return source_tokens_; }
  const std::vector<std::string>& target_tokens() const { return target_tokens_; }
  std::optional<TokenId> source_id(std::string_view token) const;
  std::optional<TokenId> target_id(std::string_view token) const;

  std::optional<std::uint64_t> count(std::string_view source, std::string_view target) const;

  // Sorted target ids stored for a source id, and sorted source ids for a
  // target id.
  std::span<const TokenId> row(TokenId source) const;
  std::span<const TokenId> column(TokenId target) const;
  // Counts parallel to row(source).
  std::span<const std::uint64_t> row_counts(TokenId source) const;

  // True when `source` shares an entry with any id in `targets` (sorted).
  bool row_intersects(TokenId source, std::span<const TokenId> targets) const;
  bool column_intersects(TokenId target, std::span<const TokenId> sources) const;

  const std::vector<std::string>& excluded_source() const { return excluded_source_; }
  const std::vector<std::string>& excluded_target() const { return excluded_target_; }
  bool is_excluded_source(std::string_view token) const;
  bool is_excluded_target(std::string_view token) const;

  // Swaps the roles of the two languages.
  CooccurrenceMatrix transposed() const;

  friend bool operator==(const CooccurrenceMatrix& a, const CooccurrenceMatrix& b) {
    return a.config_ == b.config_ && a.source_tokens_ == b.source_tokens_ &&
           a.target_tokens_ == b.target_tokens_ && a.row_offsets_ == b.row_offsets_ &&
           a.row_targets_ == b.row_targets_ && a.row_counts_ == b.row_counts_ &&
           a.excluded_source_ == b.excluded_source_ && a.excluded_target_ == b.excluded_target_;
  }

 private:
  using TokenIndex = std::unordered_map<std::string, TokenId, StringHash, std::equal_to<>>;
  using TokenSet = std::unordered_set<std::string, StringHash, std::equal_to<>>;

  WcmConfig config_;
  std::vector<std::string> source_tokens_;
  std::vector<std::string> target_tokens_;
  TokenIndex source_index_;
  TokenIndex target_index_;

  // CSR over source ids.
  std::vector<std::size_t> row_offsets_{0};
  std::vector<TokenId> row_targets_;
  std::vector<std::uint64_t> row_counts_;
  // CSC over target ids.
  std::vector<std::size_t> column_offsets_{0};
  std::vector<TokenId> column_sources_;

  std::vector<std::string> excluded_source_;
  std::vector<std::string> excluded_target_;
  TokenSet excluded_source_set_;
  TokenSet excluded_target_set_;
};

// Counts co-occurrences over an id-encoded corpus. High-frequency types are
// dropped before counting, entries below min_cooccurrence after. Sharded
// partial counts are summed, so the result is independent of the thread count.
CooccurrenceMatrix build_wcm(const EncodedCorpus& corpus, const Vocabulary& source_vocab,
                             const Vocabulary& target_vocab, const WcmConfig& config,
                             const BuildOptions& options = {});

// Convenience overload over tokenized pairs. Throws DataError when a token is
// missing from its vocabulary.
CooccurrenceMatrix build_wcm(std::span<const TokenizedPair> pairs, const Vocabulary& source_vocab,
                             const Vocabulary& target_vocab, const WcmConfig& config,
                             const BuildOptions& options = {});

// True iff `source_token` has a stored entry with at least one of
// `target_tokens`. Unknown tokens simply have no entries.
bool evidence_lookup(const CooccurrenceMatrix& matrix, std::string_view source_token,
                     std::span<const std::string> target_tokens);

// Text format v1; see README for the layout.
inline constexpr std::string_view kWcmFormatVersion = "v1";

void write_wcm(const CooccurrenceMatrix& matrix, std::ostream& out);
CooccurrenceMatrix read_wcm(std::istream& in, std::string_view name = "wcm");

void save_wcm(const CooccurrenceMatrix& matrix, const std::filesystem::path& path);
CooccurrenceMatrix load_wcm(const std::filesystem::path& path);

}  // namespace deqe
