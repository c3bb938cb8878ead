#include "deqe/corpus.hpp"

#include <algorithm>
#include <fstream>
#include <iterator>
#include <sstream>

#include "deqe/error.hpp"

namespace deqe {

namespace {

std::unique_ptr<std::istream> open_input(const std::filesystem::path& path) {
  auto in = std::make_unique<std::ifstream>(path, std::ios::binary);
  if (!*in) throw DataError("cannot open '" + path.string() + "'");
  return in;
}

void strip_cr(std::string& line) {
  if (!line.empty() && line.back() == '\r') line.pop_back();
}

void check_utf8(const std::string& line, const std::string& name, std::size_t index) {
  if (!is_valid_utf8(line)) {
    throw FormatError("invalid UTF-8 in " + name + " at line " + std::to_string(index + 1));
  }
}

std::size_t count_remaining_lines(std::istream& in) {
  std::size_t n = 0;
  std::string line;
  while (std::getline(in, line)) ++n;
  return n;
}

[[noreturn]] void throw_mismatch(const std::string& source_name, std::size_t source_lines,
                                 const std::string& target_name, std::size_t target_lines) {
  throw AlignmentError("line count mismatch: " + source_name + " has " +
                       std::to_string(source_lines) + " lines, " + target_name + " has " +
                       std::to_string(target_lines) + " lines");
}

SegmentPair split_tsv_line(std::string line, const std::string& name, std::size_t index) {
  const auto tab = line.find('\t');
  if (tab == std::string::npos || line.find('\t', tab + 1) != std::string::npos) {
    throw FormatError(name + " line " + std::to_string(index + 1) +
                      ": expected exactly one TAB separating source and target");
  }
  SegmentPair pair{index, line.substr(0, tab), line.substr(tab + 1)};
  return pair;
}

std::string slurp(const std::filesystem::path& path) {
  auto in = open_input(path);
  return std::string(std::istreambuf_iterator<char>(*in), std::istreambuf_iterator<char>());
}

// Splits on LF with the same semantics as std::getline: a trailing LF does
// not start an extra empty line.
std::vector<std::string> split_lines(const std::string& content) {
  std::vector<std::string> lines;
  std::size_t start = 0;
  while (start < content.size()) {
    auto end = content.find('\n', start);
    if (end == std::string::npos) end = content.size();
    std::string line = content.substr(start, end - start);
    strip_cr(line);
    lines.push_back(std::move(line));
    start = end + 1;
  }
  return lines;
}

}  // namespace

ParallelCorpusReader ParallelCorpusReader::open(const std::filesystem::path& source,
                                                const std::filesystem::path& target) {
  ParallelCorpusReader reader;
  reader.owned_source_ = open_input(source);
  reader.owned_target_ = open_input(target);
  reader.source_ = reader.owned_source_.get();
  reader.target_ = reader.owned_target_.get();
  reader.source_name_ = "'" + source.string() + "'";
  reader.target_name_ = "'" + target.string() + "'";
  return reader;
}

ParallelCorpusReader ParallelCorpusReader::open_tsv(const std::filesystem::path& tsv) {
  ParallelCorpusReader reader;
  reader.owned_source_ = open_input(tsv);
  reader.source_ = reader.owned_source_.get();
  reader.tsv_ = true;
  reader.source_name_ = "'" + tsv.string() + "'";
  return reader;
}

ParallelCorpusReader::ParallelCorpusReader(std::istream& source, std::istream& target,
                                           std::string source_name, std::string target_name)
    : source_(&source),
      target_(&target),
      source_name_(std::move(source_name)),
      target_name_(std::move(target_name)) {}

ParallelCorpusReader::ParallelCorpusReader(std::istream& tsv, std::string name)
    : source_(&tsv), tsv_(true), source_name_(std::move(name)) {}

std::optional<SegmentPair> ParallelCorpusReader::next() {
  return tsv_ ? next_tsv() : next_parallel();
}

std::optional<SegmentPair> ParallelCorpusReader::next_parallel() {
  const bool have_source = static_cast<bool>(std::getline(*source_, source_line_));
  const bool have_target = static_cast<bool>(std::getline(*target_, target_line_));
  const std::size_t index = next_index_;
  if (!have_source && !have_target) return std::nullopt;
  if (have_source != have_target) {
    const std::size_t source_lines = index + (have_source ? 1 + count_remaining_lines(*source_) : 0);
    const std::size_t target_lines = index + (have_target ? 1 + count_remaining_lines(*target_) : 0);
    throw_mismatch(source_name_, source_lines, target_name_, target_lines);
  }
  strip_cr(source_line_);
  strip_cr(target_line_);
  check_utf8(source_line_, source_name_, index);
  check_utf8(target_line_, target_name_, index);
  ++next_index_;
  return SegmentPair{index, source_line_, target_line_};
}

std::optional<SegmentPair> ParallelCorpusReader::next_tsv() {
  if (!std::getline(*source_, source_line_)) return std::nullopt;
  const std::size_t index = next_index_++;
  strip_cr(source_line_);
  check_utf8(source_line_, source_name_, index);
  return split_tsv_line(source_line_, source_name_, index);
}

std::vector<SegmentPair> read_parallel_corpus(const std::filesystem::path& source,
                                              const std::filesystem::path& target) {
  const auto source_lines = split_lines(slurp(source));
  const auto target_lines = split_lines(slurp(target));
  if (source_lines.size() != target_lines.size()) {
    throw_mismatch("'" + source.string() + "'", source_lines.size(),
                   "'" + target.string() + "'", target_lines.size());
  }
  std::vector<SegmentPair> pairs;
  pairs.reserve(source_lines.size());
  for (std::size_t i = 0; i < source_lines.size(); ++i) {
    check_utf8(source_lines[i], "'" + source.string() + "'", i);
    check_utf8(target_lines[i], "'" + target.string() + "'", i);
    pairs.push_back({i, source_lines[i], target_lines[i]});
  }
  return pairs;
}

std::vector<SegmentPair> read_parallel_corpus_tsv(const std::filesystem::path& tsv) {
  const auto lines = split_lines(slurp(tsv));
  const std::string name = "'" + tsv.string() + "'";
  std::vector<SegmentPair> pairs;
  pairs.reserve(lines.size());
  for (std::size_t i = 0; i < lines.size(); ++i) {
    check_utf8(lines[i], name, i);
    pairs.push_back(split_tsv_line(lines[i], name, i));
  }
  return pairs;
}

}  // namespace deqe
