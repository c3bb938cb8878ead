#include "deqe/scoring.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <istream>
#include <ostream>
#include <string>

#include "deqe/error.hpp"
#include "deqe/parallel.hpp"

namespace deqe {

namespace {

template <typename Lookup>
std::vector<TokenId> known_ids(const TokenizedSegment& segment, Lookup lookup) {
  std::vector<TokenId> ids;
  ids.reserve(segment.length());
  for (const auto& token : segment.tokens) {
    if (auto id = lookup(token)) ids.push_back(*id);
  }
  std::sort(ids.begin(), ids.end());
  ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
  return ids;
}

// Shared fold for both directions: `excluded` filters the scored side,
// `evidenced` decides a single eligible token.
template <typename Excluded, typename Evidenced>
DeScore score_tokens(const TokenizedSegment& scored, bool by_type, Excluded excluded,
                     Evidenced evidenced) {
  std::size_t eligible = 0;
  std::size_t hits = 0;
  auto visit = [&](const std::string& token) {
    if (excluded(token)) return;
    ++eligible;
    if (evidenced(token)) ++hits;
  };
  if (by_type) {
    auto types = scored.tokens;
    std::sort(types.begin(), types.end());
    types.erase(std::unique(types.begin(), types.end()), types.end());
    for (const auto& t : types) visit(t);
  } else {
    for (const auto& t : scored.tokens) visit(t);
  }
  return DeScore::from_counts(eligible, hits);
}

void append_fixed(std::string& out, double value) {
  char buf[32];
  const int n = std::snprintf(buf, sizeof buf, "%.6f", value);
  out.append(buf, static_cast<std::size_t>(n));
}

}  // namespace

DeScore DeScore::from_counts(std::size_t eligible, std::size_t evidenced) {
  DeScore s;
  s.eligible = eligible;
  s.evidenced = evidenced;
  s.degenerate = eligible == 0;
  s.value = eligible == 0 ? 0.0 : 100.0 * static_cast<double>(evidenced) / static_cast<double>(eligible);
  return s;
}

DeScore de_score(const CooccurrenceMatrix& matrix, const TokenizedSegment& source,
                 const TokenizedSegment& hypothesis, bool by_type) {
  const auto targets = known_ids(hypothesis, [&](std::string_view t) { return matrix.target_id(t); });
  return score_tokens(
      source, by_type, [&](const std::string& t) { return matrix.is_excluded_source(t); },
      [&](const std::string& t) {
        auto id = matrix.source_id(t);
        return id && matrix.row_intersects(*id, targets);
      });
}

DeScore reverse_de_score(const CooccurrenceMatrix& matrix, const TokenizedSegment& source,
                         const TokenizedSegment& hypothesis, bool by_type) {
  const auto sources = known_ids(source, [&](std::string_view t) { return matrix.source_id(t); });
  return score_tokens(
      hypothesis, by_type, [&](const std::string& t) { return matrix.is_excluded_target(t); },
      [&](const std::string& t) {
        auto id = matrix.target_id(t);
        return id && matrix.column_intersects(*id, sources);
      });
}

std::vector<ScoredSegment> score_pairs(const CooccurrenceMatrix& matrix,
                                       std::span<const TokenizedPair> pairs,
                                       const ScoreOptions& options) {
  std::vector<ScoredSegment> out(pairs.size());
  const unsigned shards = static_cast<unsigned>(
      std::clamp<std::size_t>(pairs.size(), 1, resolve_threads(options.threads)));
  for_each_shard(pairs.size(), shards, [&](unsigned, std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      auto& scored = out[i];
      scored.index = i;
      scored.de = de_score(matrix, pairs[i].source, pairs[i].target, options.by_type);
      if (options.reverse) {
        scored.reverse_de = reverse_de_score(matrix, pairs[i].source, pairs[i].target, options.by_type);
      }
    }
  });
  return out;
}

std::vector<TokenizedPair> read_tokenized_pairs(ParallelCorpusReader& reader,
                                                const TokenizerConfig& config) {
  std::vector<TokenizedPair> pairs;
  while (auto pair = reader.next()) {
    pairs.push_back({tokenize(pair->source, config), tokenize(pair->target, config)});
  }
  return pairs;
}

std::vector<ScoredSegment> score_file(const CooccurrenceMatrix& matrix,
                                      const std::filesystem::path& source_path,
                                      const std::filesystem::path& hypothesis_path,
                                      const ScoreOptions& options) {
  auto reader = ParallelCorpusReader::open(source_path, hypothesis_path);
  const auto pairs = read_tokenized_pairs(reader, options.tokenizer);
  return score_pairs(matrix, pairs, options);
}

void write_scores(std::ostream& out, std::span<const ScoredSegment> scores) {
  std::string buf;
  for (const auto& s : scores) {
    buf += std::to_string(s.index);
    buf += '\t';
    append_fixed(buf, s.de.value);
    buf += '\t';
    buf += std::to_string(s.de.eligible);
    buf += '\t';
    buf += std::to_string(s.de.evidenced);
    if (s.reverse_de) {
      buf += '\t';
      append_fixed(buf, s.reverse_de->value);
    }
    buf += '\n';
    if (buf.size() > (1u << 20)) {
      out << buf;
      buf.clear();
    }
  }
  out << buf;
}

std::vector<DeScore> read_de_scores(std::istream& in) {
  std::vector<DeScore> scores;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line.front() == '#') continue;
    std::vector<std::string_view> fields;
    std::string_view rest(line);
    while (true) {
      auto tab = rest.find('\t');
      fields.push_back(rest.substr(0, tab));
      if (tab == std::string_view::npos) break;
      rest.remove_prefix(tab + 1);
    }
    auto bad = [&] {
      return FormatError("scores line " + std::to_string(line_no) +
                         ": expected index<TAB>de<TAB>eligible<TAB>evidenced[<TAB>reverse_de]");
    };
    if (fields.size() != 4 && fields.size() != 5) throw bad();
    std::size_t eligible = 0;
    std::size_t evidenced = 0;
    auto parse_count = [&](std::string_view f, std::size_t& v) {
      auto [p, ec] = std::from_chars(f.data(), f.data() + f.size(), v);
      if (ec != std::errc() || p != f.data() + f.size() || f.empty()) throw bad();
    };
    parse_count(fields[2], eligible);
    parse_count(fields[3], evidenced);
    if (evidenced > eligible) throw bad();
    // Recompute from the counts so the value is exact rather than rounded.
    scores.push_back(DeScore::from_counts(eligible, evidenced));
  }
  return scores;
}

}  // namespace deqe
