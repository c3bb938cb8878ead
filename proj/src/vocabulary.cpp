#include <algorithm>
#include <stdexcept>

#include "deqe/corpus.hpp"
#include "deqe/error.hpp"
#include "deqe/log.hpp"
#include "deqe/parallel.hpp"

namespace deqe {

std::string_view side_name(Side side) { return side == Side::Source ? "source" : "target"; }

TokenId Vocabulary::add(std::string_view token, std::uint64_t count) {
  token_count_ += count;
  if (auto it = index_.find(token); it != index_.end()) {
    frequencies_[it->second] += count;
    return it->second;
  }
  const auto id = static_cast<TokenId>(tokens_.size());
  tokens_.emplace_back(token);
  frequencies_.push_back(count);
  index_.emplace(tokens_.back(), id);
  return id;
}

void Vocabulary::add(const TokenizedSegment& segment) {
  for (const auto& token : segment.tokens) add(token);
}

void Vocabulary::merge(const Vocabulary& other) {
  for (std::size_t i = 0; i < other.size(); ++i) add(other.tokens_[i], other.frequencies_[i]);
}

std::optional<TokenId> Vocabulary::id(std::string_view token) const {
  if (auto it = index_.find(token); it != index_.end()) return it->second;
  return std::nullopt;
}

std::uint64_t Vocabulary::frequency(std::string_view token) const {
  auto found = id(token);
  return found ? frequencies_[*found] : 0;
}

Vocabulary build_vocabulary(std::span<const TokenizedSegment> segments, Side side,
                            unsigned threads) {
  const unsigned shards =
      static_cast<unsigned>(std::clamp<std::size_t>(segments.size(), 1, std::max(1u, threads)));
  std::vector<Vocabulary> partial(shards, Vocabulary(side));
  for_each_shard(segments.size(), shards, [&](unsigned shard, std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) partial[shard].add(segments[i]);
  });
  Vocabulary merged(side);
  for (const auto& v : partial) merged.merge(v);
  return merged;
}

VocabStats vocab_stats(const Vocabulary& vocab, std::span<const std::uint64_t> thresholds,
                       std::uint64_t hifreq_cutoff) {
  if (thresholds.empty()) throw std::invalid_argument("vocab_stats: thresholds must be non-empty");
  VocabStats stats;
  stats.vocab_size = vocab.size();
  stats.token_count = vocab.token_count();
  stats.hifreq_cutoff = hifreq_cutoff;
  for (auto t : thresholds) stats.thresholds.push_back({t, 0, 0});
  for (std::size_t id = 0; id < vocab.size(); ++id) {
    const auto f = vocab.frequency(static_cast<TokenId>(id));
    if (f == 1) ++stats.singletons;
    for (auto& row : stats.thresholds) {
      if (f >= row.threshold) {
        ++row.at_least;
      } else {
        ++row.below;
      }
    }
    if (f > hifreq_cutoff) stats.hifreq_types.emplace_back(vocab.token(static_cast<TokenId>(id)), f);
  }
  std::sort(stats.hifreq_types.begin(), stats.hifreq_types.end(), [](const auto& a, const auto& b) {
    return a.second != b.second ? a.second > b.second : a.first < b.first;
  });
  return stats;
}

EncodedCorpus encode(std::span<const TokenizedPair> pairs, const Vocabulary& source_vocab,
                     const Vocabulary& target_vocab) {
  EncodedCorpus out;
  std::vector<TokenId> ids;
  auto encode_side = [&](const TokenizedSegment& segment, const Vocabulary& vocab,
                         EncodedSide& side, std::size_t index) {
    ids.clear();
    for (const auto& token : segment.tokens) {
      auto id = vocab.id(token);
      if (!id) {
        throw DataError("token '" + token + "' in " + std::string(side_name(vocab.side())) +
                        " segment " + std::to_string(index) +
                        " is missing from the vocabulary (vocabulary/corpus mismatch)");
      }
      ids.push_back(*id);
    }
    side.push(ids);
  };
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    encode_side(pairs[i].source, source_vocab, out.source, i);
    encode_side(pairs[i].target, target_vocab, out.target, i);
  }
  return out;
}

IngestedCorpus ingest(ParallelCorpusReader& reader, const TokenizerConfig& config,
                      std::size_t progress_every) {
  IngestedCorpus out;
  std::vector<TokenId> ids;
  auto push = [&ids](const TokenizedSegment& segment, Vocabulary& vocab, EncodedSide& side) {
    ids.clear();
    for (const auto& token : segment.tokens) ids.push_back(vocab.add(token));
    side.push(ids);
  };
  while (auto pair = reader.next()) {
    push(tokenize(pair->source, config), out.source_vocab, out.corpus.source);
    push(tokenize(pair->target, config), out.target_vocab, out.corpus.target);
    if (progress_every > 0 && (pair->index + 1) % progress_every == 0) {
      log_info("read " + std::to_string(pair->index + 1) + " segments");
    }
  }
  return out;
}

}  // namespace deqe
