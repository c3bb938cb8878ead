#include "deqe/wcm.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

#include "deqe/error.hpp"
#include "deqe/log.hpp"
#include "deqe/parallel.hpp"

namespace deqe {

namespace {

bool intersects_sorted(std::span<const TokenId> a, std::span<const TokenId> b) {
  if (a.size() > b.size()) std::swap(a, b);
  return std::any_of(a.begin(), a.end(),
                     [&](TokenId x) { return std::binary_search(b.begin(), b.end(), x); });
}

// Distinct kept ids of one segment with their multiplicity.
void collect_types(std::span<const TokenId> ids, const std::vector<bool>& excluded,
                   std::vector<TokenId>& scratch,
                   std::vector<std::pair<TokenId, std::uint64_t>>& out) {
  scratch.clear();
  for (auto id : ids) {
    if (!excluded[id]) scratch.push_back(id);
  }
  std::sort(scratch.begin(), scratch.end());
  out.clear();
  for (auto id : scratch) {
    if (!out.empty() && out.back().first == id) {
      ++out.back().second;
    } else {
      out.emplace_back(id, 1);
    }
  }
}

std::vector<bool> excluded_ids(const Vocabulary& vocab, std::uint64_t cutoff, bool enabled) {
  std::vector<bool> excluded(vocab.size(), false);
  if (!enabled) return excluded;
  for (std::size_t i = 0; i < vocab.size(); ++i) {
    excluded[i] = vocab.frequency(static_cast<TokenId>(i)) > cutoff;
  }
  return excluded;
}

std::vector<std::string> excluded_tokens(const Vocabulary& vocab, const std::vector<bool>& mask) {
  std::vector<std::string> out;
  for (std::size_t i = 0; i < mask.size(); ++i) {
    if (mask[i]) out.push_back(vocab.token(static_cast<TokenId>(i)));
  }
  std::sort(out.begin(), out.end());
  return out;
}

// Position of each id when the vocabulary is sorted by token bytes.
std::vector<TokenId> lexicographic_ranks(const Vocabulary& vocab) {
  std::vector<TokenId> order(vocab.size());
  std::iota(order.begin(), order.end(), TokenId{0});
  std::sort(order.begin(), order.end(),
            [&](TokenId a, TokenId b) { return vocab.token(a) < vocab.token(b); });
  std::vector<TokenId> rank(vocab.size());
  for (std::size_t r = 0; r < order.size(); ++r) rank[order[r]] = static_cast<TokenId>(r);
  return rank;
}

void check_ids(const EncodedSide& side, std::size_t vocab_size, Side which) {
  for (std::size_t i = 0; i < side.size(); ++i) {
    for (auto id : side.segment(i)) {
      if (id >= vocab_size) {
        throw DataError(std::string(side_name(which)) + " segment " + std::to_string(i) +
                        " holds token id " + std::to_string(id) +
                        " outside the vocabulary (vocabulary/corpus mismatch)");
      }
    }
  }
}

}  // namespace

std::string_view count_mode_name(CountMode mode) {
  return mode == CountMode::Binary ? "binary" : "product";
}

CountMode parse_count_mode(std::string_view name) {
  if (name == "binary" || name == "per-segment-binary") return CountMode::Binary;
  if (name == "product" || name == "occurrence-product") return CountMode::Product;
  throw std::invalid_argument("unknown count mode '" + std::string(name) + "'");
}

void WcmConfig::validate() const {
  if (min_cooccurrence < 1) throw std::invalid_argument("min_cooccurrence must be >= 1");
  if (hifreq_cutoff < 1) throw std::invalid_argument("hifreq_cutoff must be >= 1");
}

CooccurrenceMatrix CooccurrenceMatrix::from_entries(WcmConfig config, std::vector<WcmEntry> entries,
                                                    std::vector<std::string> excluded_source,
                                                    std::vector<std::string> excluded_target) {
  config.validate();
  CooccurrenceMatrix m;
  m.config_ = config;

  auto normalize = [](std::vector<std::string>& v) {
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end()), v.end());
  };
  normalize(excluded_source);
  normalize(excluded_target);
  m.excluded_source_ = std::move(excluded_source);
  m.excluded_target_ = std::move(excluded_target);
  m.excluded_source_set_.insert(m.excluded_source_.begin(), m.excluded_source_.end());
  m.excluded_target_set_.insert(m.excluded_target_.begin(), m.excluded_target_.end());

  auto by_key = [](const WcmEntry& a, const WcmEntry& b) {
    return a.source != b.source ? a.source < b.source : a.target < b.target;
  };
  if (!std::is_sorted(entries.begin(), entries.end(), by_key)) {
    std::sort(entries.begin(), entries.end(), by_key);
  }

  for (std::size_t i = 0; i < entries.size(); ++i) {
    const auto& e = entries[i];
    if (i > 0 && entries[i - 1].source == e.source && entries[i - 1].target == e.target) {
      throw FormatError("duplicate entry (" + e.source + ", " + e.target + ")");
    }
    if (e.count < config.min_cooccurrence) {
      throw FormatError("entry (" + e.source + ", " + e.target + ") has count " +
                        std::to_string(e.count) + " below min_cooccurrence " +
                        std::to_string(config.min_cooccurrence));
    }
    if (m.excluded_source_set_.contains(e.source) || m.excluded_target_set_.contains(e.target)) {
      throw FormatError("entry (" + e.source + ", " + e.target + ") involves an excluded token");
    }
  }

  for (const auto& e : entries) {
    if (m.source_tokens_.empty() || m.source_tokens_.back() != e.source) {
      m.source_tokens_.push_back(e.source);
    }
    m.target_tokens_.push_back(e.target);
  }
  normalize(m.target_tokens_);
  for (std::size_t i = 0; i < m.source_tokens_.size(); ++i) {
    m.source_index_.emplace(m.source_tokens_[i], static_cast<TokenId>(i));
  }
  for (std::size_t i = 0; i < m.target_tokens_.size(); ++i) {
    m.target_index_.emplace(m.target_tokens_[i], static_cast<TokenId>(i));
  }

  m.row_targets_.reserve(entries.size());
  m.row_counts_.reserve(entries.size());
  m.row_offsets_.reserve(m.source_tokens_.size() + 1);
  std::vector<std::size_t> column_sizes(m.target_tokens_.size(), 0);
  TokenId current = 0;
  for (const auto& e : entries) {
    const TokenId s = m.source_index_.find(e.source)->second;
    const TokenId t = m.target_index_.find(e.target)->second;
    while (current < s) {
      m.row_offsets_.push_back(m.row_targets_.size());
      ++current;
    }
    m.row_targets_.push_back(t);
    m.row_counts_.push_back(e.count);
    ++column_sizes[t];
  }
  while (m.row_offsets_.size() < m.source_tokens_.size() + 1) {
    m.row_offsets_.push_back(m.row_targets_.size());
  }

  m.column_offsets_.assign(m.target_tokens_.size() + 1, 0);
  std::partial_sum(column_sizes.begin(), column_sizes.end(), m.column_offsets_.begin() + 1);
  m.column_sources_.resize(m.row_targets_.size());
  std::vector<std::size_t> fill(m.column_offsets_.begin(), m.column_offsets_.end() - 1);
  for (std::size_t s = 0; s < m.source_tokens_.size(); ++s) {
    for (std::size_t k = m.row_offsets_[s]; k < m.row_offsets_[s + 1]; ++k) {
      m.column_sources_[fill[m.row_targets_[k]]++] = static_cast<TokenId>(s);
    }
  }
  return m;
}

std::vector<WcmEntry> CooccurrenceMatrix::entries() const {
  std::vector<WcmEntry> out;
  out.reserve(size());
  for (std::size_t s = 0; s < source_tokens_.size(); ++s) {
    for (std::size_t k = row_offsets_[s]; k < row_offsets_[s + 1]; ++k) {
      out.push_back({source_tokens_[s], target_tokens_[row_targets_[k]], row_counts_[k]});
    }
  }
  return out;
}

std::optional<TokenId> CooccurrenceMatrix::source_id(std::string_view token) const {
  if (auto it = source_index_.find(token); it != source_index_.end()) return it->second;
  return std::nullopt;
}

std::optional<TokenId> CooccurrenceMatrix::target_id(std::string_view token) const {
  if (auto it = target_index_.find(token); it != target_index_.end()) return it->second;
  return std::nullopt;
}

std::optional<std::uint64_t> CooccurrenceMatrix::count(std::string_view source,
                                                       std::string_view target) const {
  auto s = source_id(source);
  auto t = target_id(target);
  if (!s || !t) return std::nullopt;
  auto r = row(*s);
  auto it = std::lower_bound(r.begin(), r.end(), *t);
  if (it == r.end() || *it != *t) return std::nullopt;
  return row_counts_[row_offsets_[*s] + static_cast<std::size_t>(it - r.begin())];
}

std::span<const TokenId> CooccurrenceMatrix::row(TokenId source) const {
  return std::span<const TokenId>(row_targets_)
      .subspan(row_offsets_[source], row_offsets_[source + 1] - row_offsets_[source]);
}

std::span<const std::uint64_t> CooccurrenceMatrix::row_counts(TokenId source) const {
  return std::span<const std::uint64_t>(row_counts_)
      .subspan(row_offsets_[source], row_offsets_[source + 1] - row_offsets_[source]);
}

std::span<const TokenId> CooccurrenceMatrix::column(TokenId target) const {
  return std::span<const TokenId>(column_sources_)
      .subspan(column_offsets_[target], column_offsets_[target + 1] - column_offsets_[target]);
}

bool CooccurrenceMatrix::row_intersects(TokenId source, std::span<const TokenId> targets) const {
  return intersects_sorted(row(source), targets);
}

bool CooccurrenceMatrix::column_intersects(TokenId target, std::span<const TokenId> sources) const {
  return intersects_sorted(column(target), sources);
}

bool CooccurrenceMatrix::is_excluded_source(std::string_view token) const {
  return excluded_source_set_.find(token) != excluded_source_set_.end();
}

bool CooccurrenceMatrix::is_excluded_target(std::string_view token) const {
  return excluded_target_set_.find(token) != excluded_target_set_.end();
}

CooccurrenceMatrix CooccurrenceMatrix::transposed() const {
  std::vector<WcmEntry> swapped;
  swapped.reserve(size());
  for (auto& e : entries()) swapped.push_back({std::move(e.target), std::move(e.source), e.count});
  return from_entries(config_, std::move(swapped), excluded_target_, excluded_source_);
}

CooccurrenceMatrix build_wcm(const EncodedCorpus& corpus, const Vocabulary& source_vocab,
                             const Vocabulary& target_vocab, const WcmConfig& config,
                             const BuildOptions& options) {
  config.validate();
  if (corpus.source.size() != corpus.target.size()) {
    throw AlignmentError("encoded corpus sides differ in segment count");
  }
  check_ids(corpus.source, source_vocab.size(), Side::Source);
  check_ids(corpus.target, target_vocab.size(), Side::Target);

  const auto source_excluded = excluded_ids(source_vocab, config.hifreq_cutoff, true);
  const auto target_excluded =
      excluded_ids(target_vocab, config.hifreq_cutoff, options.exclude_target_hifreq);

  const std::size_t n = corpus.size();
  const std::size_t source_types = source_vocab.size();

  // Distinct kept target types of every segment, with multiplicities.
  std::vector<std::size_t> target_offsets{0};
  std::vector<TokenId> target_ids;
  std::vector<std::uint32_t> target_occ;
  // Segments holding each kept source type, with the type's multiplicity.
  std::vector<std::size_t> posting_offsets(source_types + 1, 0);
  std::size_t long_segments = 0;
  {
    target_offsets.reserve(n + 1);
    target_ids.reserve(corpus.target.token_count());
    target_occ.reserve(corpus.target.token_count());
    std::vector<TokenId> scratch;
    std::vector<std::pair<TokenId, std::uint64_t>> types;
    for (std::size_t i = 0; i < n; ++i) {
      const auto source = corpus.source.segment(i);
      const auto target = corpus.target.segment(i);
      if (source.size() > options.long_segment_tokens || target.size() > options.long_segment_tokens) {
        ++long_segments;
      }
      collect_types(target, target_excluded, scratch, types);
      for (const auto& [t, occ] : types) {
        target_ids.push_back(t);
        target_occ.push_back(static_cast<std::uint32_t>(occ));
      }
      target_offsets.push_back(target_ids.size());
      // An empty target side can contribute nothing.
      if (types.empty()) continue;
      collect_types(source, source_excluded, scratch, types);
      for (const auto& [s, occ] : types) ++posting_offsets[s + 1];
    }
  }
  if (long_segments > 0) {
    log_info(std::to_string(long_segments) + " segments longer than " +
             std::to_string(options.long_segment_tokens) + " tokens counted as-is");
  }
  std::partial_sum(posting_offsets.begin(), posting_offsets.end(), posting_offsets.begin());
  std::vector<std::uint32_t> posting_segments(posting_offsets.back());
  std::vector<std::uint32_t> posting_occ(posting_offsets.back());
  {
    std::vector<std::size_t> fill(posting_offsets.begin(), posting_offsets.end() - 1);
    std::vector<TokenId> scratch;
    std::vector<std::pair<TokenId, std::uint64_t>> types;
    for (std::size_t i = 0; i < n; ++i) {
      if (target_offsets[i] == target_offsets[i + 1]) continue;
      collect_types(corpus.source.segment(i), source_excluded, scratch, types);
      for (const auto& [s, occ] : types) {
        posting_segments[fill[s]] = static_cast<std::uint32_t>(i);
        posting_occ[fill[s]++] = static_cast<std::uint32_t>(occ);
      }
    }
  }

  // Each source row is counted start to finish by one worker, so rows do not
  // depend on how work is split.
  std::vector<std::vector<std::pair<TokenId, std::uint64_t>>> rows(source_types);
  const unsigned workers = static_cast<unsigned>(
      std::clamp<std::size_t>(source_types, 1, resolve_threads(options.threads)));
  const bool binary = config.count_mode == CountMode::Binary;
  std::vector<std::vector<std::uint64_t>> counters(workers);
  std::vector<std::vector<TokenId>> touched_lists(workers);
  for_each_block(source_types, workers, 64, [&](unsigned worker, std::size_t begin, std::size_t end) {
    auto& counter = counters[worker];
    auto& touched = touched_lists[worker];
    if (counter.empty()) counter.assign(target_vocab.size(), 0);
    for (std::size_t s = begin; s < end; ++s) {
      touched.clear();
      for (std::size_t p = posting_offsets[s]; p < posting_offsets[s + 1]; ++p) {
        const auto seg = posting_segments[p];
        const std::uint64_t s_occ = posting_occ[p];
        for (std::size_t k = target_offsets[seg]; k < target_offsets[seg + 1]; ++k) {
          auto& c = counter[target_ids[k]];
          if (c == 0) touched.push_back(target_ids[k]);
          c += binary ? 1 : s_occ * target_occ[k];
        }
      }
      auto& row = rows[s];
      for (auto t : touched) {
        if (counter[t] >= config.min_cooccurrence) row.emplace_back(t, counter[t]);
        counter[t] = 0;
      }
    }
  });
  std::vector<std::size_t>().swap(posting_offsets);
  std::vector<std::uint32_t>().swap(posting_segments);
  std::vector<std::uint32_t>().swap(posting_occ);

  const auto source_rank = lexicographic_ranks(source_vocab);
  const auto target_rank = lexicographic_ranks(target_vocab);
  std::vector<TokenId> source_by_rank(source_rank.size());
  for (std::size_t i = 0; i < source_rank.size(); ++i) source_by_rank[source_rank[i]] = static_cast<TokenId>(i);

  std::size_t total = 0;
  for (const auto& row : rows) total += row.size();
  std::vector<WcmEntry> entries;
  entries.reserve(total);
  for (const auto s : source_by_rank) {
    auto& row = rows[s];
    std::sort(row.begin(), row.end(),
              [&](const auto& a, const auto& b) { return target_rank[a.first] < target_rank[b.first]; });
    for (const auto& [t, c] : row) entries.push_back({source_vocab.token(s), target_vocab.token(t), c});
    std::vector<std::pair<TokenId, std::uint64_t>>().swap(row);
  }
  return CooccurrenceMatrix::from_entries(config, std::move(entries),
                                          excluded_tokens(source_vocab, source_excluded),
                                          excluded_tokens(target_vocab, target_excluded));
}

CooccurrenceMatrix build_wcm(std::span<const TokenizedPair> pairs, const Vocabulary& source_vocab,
                             const Vocabulary& target_vocab, const WcmConfig& config,
                             const BuildOptions& options) {
  return build_wcm(encode(pairs, source_vocab, target_vocab), source_vocab, target_vocab, config,
                   options);
}

bool evidence_lookup(const CooccurrenceMatrix& matrix, std::string_view source_token,
                     std::span<const std::string> target_tokens) {
  const auto s = matrix.source_id(source_token);
  if (!s) return false;
  return std::any_of(target_tokens.begin(), target_tokens.end(), [&](const std::string& t) {
    return matrix.count(source_token, t).has_value();
  });
}

}  // namespace deqe
