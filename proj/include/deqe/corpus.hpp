#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <istream>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

namespace deqe {

using TokenId = std::uint32_t;

// One line of an aligned bitext. `index` is the 0-based line ordinal.
struct SegmentPair {
  std::size_t index = 0;
  std::string source;
  std::string target;

  friend bool operator==(const SegmentPair&, const SegmentPair&) = default;
};

struct TokenizerConfig {
  bool lowercase = false;
  bool strip_punct = false;
};

struct TokenizedSegment {
  std::vector<std::string> tokens;

  std::size_t length() const { return tokens.size(); }
  bool empty() const { return tokens.empty(); }

  friend bool operator==(const TokenizedSegment&, const TokenizedSegment&) = default;
};

struct TokenizedPair {
  TokenizedSegment source;
  TokenizedSegment target;
};

// NFC-normalizes, splits on Unicode whitespace, then applies the optional
// case fold and punctuation strip. Tokens emptied by the strip are dropped.
TokenizedSegment tokenize(std::string_view text, const TokenizerConfig& config = {});

bool is_valid_utf8(std::string_view text);

// Streams aligned segment pairs from two parallel files (one segment per
// line) or from a single TSV file (source TAB target). CR before LF is
// stripped. Throws AlignmentError on line-count mismatch and FormatError on
// invalid UTF-8 or a malformed TSV line.
class ParallelCorpusReader {
 public:
  static ParallelCorpusReader open(const std::filesystem::path& source,
                                   const std::filesystem::path& target);
  static ParallelCorpusReader open_tsv(const std::filesystem::path& tsv);

  // Non-owning; the streams must outlive the reader.
  ParallelCorpusReader(std::istream& source, std::istream& target,
                       std::string source_name = "source",
                       std::string target_name = "target");
  ParallelCorpusReader(std::istream& tsv, std::string name = "tsv");

  ParallelCorpusReader(ParallelCorpusReader&&) noexcept = default;
  ParallelCorpusReader& operator=(ParallelCorpusReader&&) noexcept = default;

  std::optional<SegmentPair> next();

  std::size_t lines_read() const { return next_index_; }

 private:
  ParallelCorpusReader() = default;

  std::optional<SegmentPair> next_parallel();
  std::optional<SegmentPair> next_tsv();

  std::unique_ptr<std::istream> owned_source_;
  std::unique_ptr<std::istream> owned_target_;
  std::istream* source_ = nullptr;
  std::istream* target_ = nullptr;
  bool tsv_ = false;
  std::string source_name_;
  std::string target_name_;
  std::size_t next_index_ = 0;
  std::string source_line_;
  std::string target_line_;
};

inline ParallelCorpusReader load_parallel_corpus(const std::filesystem::path& source,
                                                 const std::filesystem::path& target) {
  return ParallelCorpusReader::open(source, target);
}

// Whole-file ingestion: slurps both files and splits them in memory. Same
// contract and errors as the streaming reader.
std::vector<SegmentPair> read_parallel_corpus(const std::filesystem::path& source,
                                              const std::filesystem::path& target);
std::vector<SegmentPair> read_parallel_corpus_tsv(const std::filesystem::path& tsv);

enum class Side { Source, Target };

std::string_view side_name(Side side);

struct StringHash {
  using is_transparent = void;
  std::size_t operator()(std::string_view s) const noexcept {
    return std::hash<std::string_view>{}(s);
  }
};

// Token <-> dense id mapping with raw frequencies. Ids follow first
// occurrence, so the same input always produces the same ids.
class Vocabulary {
 public:
  explicit Vocabulary(Side side = Side::Source) : side_(side) {}

  TokenId add(std::string_view token, std::uint64_t count = 1);
  void add(const TokenizedSegment& segment);

  // Appends tokens unseen so far in `other`'s id order and sums frequencies.
  // Merging per-chunk vocabularies in chunk order reproduces the sequential
  // build exactly.
  void merge(const Vocabulary& other);

  std::optional<TokenId> id(std::string_view token) const;
  const std::string& token(TokenId id) const { return tokens_[id]; }
  std::uint64_t frequency(TokenId id) const { return frequencies_[id]; }
  std::uint64_t frequency(std::string_view token) const;

  std::size_t size() const { return tokens_.size(); }
  bool empty() const { return tokens_.empty(); }
  std::uint64_t token_count() const { return token_count_; }
  Side side() const { return side_; }

  const std::vector<std::string>& tokens() const { return tokens_; }
  const std::vector<std::uint64_t>& frequencies() const { return frequencies_; }

 private:
  Side side_;
  std::vector<std::string> tokens_;
  std::vector<std::uint64_t> frequencies_;
  std::unordered_map<std::string, TokenId, StringHash, std::equal_to<>> index_;
  std::uint64_t token_count_ = 0;
};

// Builds the vocabulary over `segments`, sharding across `threads` workers
// with an order-preserving merge.
Vocabulary build_vocabulary(std::span<const TokenizedSegment> segments,
                            Side side = Side::Source, unsigned threads = 1);

struct ThresholdCount {
  std::uint64_t threshold = 0;
  std::size_t at_least = 0;  // types with frequency >= threshold
  std::size_t below = 0;     // types with frequency < threshold
};

struct VocabStats {
  std::size_t vocab_size = 0;
  std::uint64_t token_count = 0;
  std::size_t singletons = 0;
  std::vector<ThresholdCount> thresholds;
  std::uint64_t hifreq_cutoff = 0;
  // Types with frequency > hifreq_cutoff, most frequent first.
  std::vector<std::pair<std::string, std::uint64_t>> hifreq_types;

  double percent(std::size_t types) const {
    return vocab_size == 0 ? 0.0 : 100.0 * static_cast<double>(types) / vocab_size;
  }
};

// Throws std::invalid_argument when `thresholds` is empty.
VocabStats vocab_stats(const Vocabulary& vocab, std::span<const std::uint64_t> thresholds,
                       std::uint64_t hifreq_cutoff = 10000);

// Token ids of one corpus side, flattened with per-segment offsets.
class EncodedSide {
 public:
  void push(std::span<const TokenId> ids) {
    ids_.insert(ids_.end(), ids.begin(), ids.end());
    offsets_.push_back(ids_.size());
  }
  std::span<const TokenId> segment(std::size_t i) const {
    return std::span<const TokenId>(ids_).subspan(offsets_[i], offsets_[i + 1] - offsets_[i]);
  }
  std::size_t size() const { return offsets_.size() - 1; }
  std::size_t token_count() const { return ids_.size(); }
  void reserve(std::size_t segments, std::size_t tokens) {
    offsets_.reserve(segments + 1);
    ids_.reserve(tokens);
  }

 private:
  std::vector<TokenId> ids_;
  std::vector<std::size_t> offsets_{0};
};

struct EncodedCorpus {
  EncodedSide source;
  EncodedSide target;

  std::size_t size() const { return source.size(); }
};

// Maps tokenized pairs to ids. Throws DataError naming the token and segment
// when a token is missing from its vocabulary.
EncodedCorpus encode(std::span<const TokenizedPair> pairs, const Vocabulary& source_vocab,
                     const Vocabulary& target_vocab);

// A corpus read, tokenized and indexed in a single pass.
struct IngestedCorpus {
  Vocabulary source_vocab{Side::Source};
  Vocabulary target_vocab{Side::Target};
  EncodedCorpus corpus;
};

// Reads every pair from `reader`. Logs progress every `progress_every`
// segments at info level (0 disables).
IngestedCorpus ingest(ParallelCorpusReader& reader, const TokenizerConfig& config,
                      std::size_t progress_every = 100000);

}  // namespace deqe
