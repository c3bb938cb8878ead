#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <tuple>

#include "deqe/error.hpp"
#include "deqe/wcm.hpp"

namespace deqe {

namespace {

void append_number(std::string& out, std::uint64_t value) {
  char buf[24];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, value);
  out.append(buf, end);
}

void append_token_list(std::string& out, std::string_view key, const std::vector<std::string>& tokens) {
  out += key;
  for (const auto& t : tokens) {
    out += ' ';
    out += t;
  }
  out += '\n';
}

class HeaderReader {
 public:
  HeaderReader(std::istream& in, std::string_view name) : in_(in), name_(name) {}

  std::string line(std::string_view what) {
    std::string line;
    if (!std::getline(in_, line)) {
      throw FormatError(name_ + ": truncated header, missing " + std::string(what));
    }
    if (!line.empty() && line.back() == '\r') line.pop_back();
    ++line_no_;
    return line;
  }

  // Returns the text after "<key> " (or "" for a bare key).
  std::string keyed(std::string_view key) {
    auto text = line(key);
    if (text == key) return {};
    if (text.size() > key.size() && text.compare(0, key.size(), key) == 0 && text[key.size()] == ' ') {
      return text.substr(key.size() + 1);
    }
    throw FormatError(name_ + " line " + std::to_string(line_no_) + ": expected '" +
                      std::string(key) + "', found '" + text + "'");
  }

  std::uint64_t number(std::string_view key) {
    const auto text = keyed(key);
    std::uint64_t value = 0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc() || ptr != text.data() + text.size() || text.empty()) {
      throw FormatError(name_ + " line " + std::to_string(line_no_) + ": bad number for " +
                        std::string(key) + ": '" + text + "'");
    }
    return value;
  }

  std::vector<std::string> tokens(std::string_view key) {
    const auto text = keyed(key);
    std::vector<std::string> out;
    std::size_t start = 0;
    while (start < text.size()) {
      auto end = text.find(' ', start);
      if (end == std::string::npos) end = text.size();
      if (end > start) out.push_back(text.substr(start, end - start));
      start = end + 1;
    }
    return out;
  }

  std::size_t line_no() const { return line_no_; }

 private:
  std::istream& in_;
  std::string name_;
  std::size_t line_no_ = 0;
};

}  // namespace

void write_wcm(const CooccurrenceMatrix& matrix, std::ostream& out) {
  const auto& config = matrix.config();
  std::string buf;
  buf += "#wcm ";
  buf += kWcmFormatVersion;
  buf += "\n#min_cooccurrence ";
  append_number(buf, config.min_cooccurrence);
  buf += "\n#hifreq_cutoff ";
  append_number(buf, config.hifreq_cutoff);
  buf += "\n#count_mode ";
  buf += count_mode_name(config.count_mode);
  buf += "\n#entries ";
  append_number(buf, matrix.size());
  buf += '\n';
  append_token_list(buf, "#excluded_source", matrix.excluded_source());
  append_token_list(buf, "#excluded_target", matrix.excluded_target());

  const auto& sources = matrix.source_tokens();
  const auto& targets = matrix.target_tokens();
  for (std::size_t s = 0; s < sources.size(); ++s) {
    const auto row = matrix.row(static_cast<TokenId>(s));
    const auto counts = matrix.row_counts(static_cast<TokenId>(s));
    for (std::size_t k = 0; k < row.size(); ++k) {
      buf += sources[s];
      buf += '\t';
      buf += targets[row[k]];
      buf += '\t';
      append_number(buf, counts[k]);
      buf += '\n';
    }
    if (buf.size() > (1u << 20)) {
      out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
      buf.clear();
    }
  }
  out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
}

CooccurrenceMatrix read_wcm(std::istream& in, std::string_view name) {
  HeaderReader header(in, name);
  const auto magic = header.line("format header");
  const std::string expected = "#wcm " + std::string(kWcmFormatVersion);
  if (magic != expected) {
    if (magic.rfind("#wcm ", 0) == 0) {
      throw FormatError(std::string(name) + ": unsupported WCM format version: expected " +
                        std::string(kWcmFormatVersion) + ", found " + magic.substr(5));
    }
    throw FormatError(std::string(name) + ": not a WCM file: expected '" + expected +
                      "', found '" + magic + "'");
  }

  WcmConfig config;
  config.min_cooccurrence = header.number("#min_cooccurrence");
  config.hifreq_cutoff = header.number("#hifreq_cutoff");
  try {
    config.count_mode = parse_count_mode(header.keyed("#count_mode"));
    config.validate();
  } catch (const std::invalid_argument& e) {
    throw FormatError(std::string(name) + ": " + e.what());
  }
  const auto declared = header.number("#entries");
  auto excluded_source = header.tokens("#excluded_source");
  auto excluded_target = header.tokens("#excluded_target");

  std::vector<WcmEntry> entries;
  entries.reserve(static_cast<std::size_t>(std::min<std::uint64_t>(declared, 1u << 24)));
  std::string line;
  std::size_t line_no = header.line_no();
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (entries.size() == declared) {
      if (line.empty()) continue;
      throw FormatError(std::string(name) + ": header declares " + std::to_string(declared) +
                        " entries but more follow at line " + std::to_string(line_no));
    }
    const auto tab1 = line.find('\t');
    const auto tab2 = tab1 == std::string::npos ? tab1 : line.find('\t', tab1 + 1);
    if (tab2 == std::string::npos || line.find('\t', tab2 + 1) != std::string::npos ||
        tab1 == 0 || tab2 == tab1 + 1) {
      throw FormatError(std::string(name) + " line " + std::to_string(line_no) +
                        ": expected source<TAB>target<TAB>count");
    }
    std::uint64_t count = 0;
    const char* first = line.data() + tab2 + 1;
    const char* last = line.data() + line.size();
    auto [ptr, ec] = std::from_chars(first, last, count);
    if (ec != std::errc() || ptr != last || first == last) {
      throw FormatError(std::string(name) + " line " + std::to_string(line_no) + ": bad count");
    }
    WcmEntry entry{line.substr(0, tab1), line.substr(tab1 + 1, tab2 - tab1 - 1), count};
    if (!entries.empty()) {
      const auto& prev = entries.back();
      if (std::tie(prev.source, prev.target) >= std::tie(entry.source, entry.target)) {
        throw FormatError(std::string(name) + " line " + std::to_string(line_no) +
                          ": entries not strictly sorted by (source, target)");
      }
    }
    entries.push_back(std::move(entry));
  }
  if (entries.size() < declared) {
    throw FormatError(std::string(name) + ": truncated: header declares " +
                      std::to_string(declared) + " entries, found " +
                      std::to_string(entries.size()));
  }
  try {
    return CooccurrenceMatrix::from_entries(config, std::move(entries), std::move(excluded_source),
                                            std::move(excluded_target));
  } catch (const FormatError& e) {
    throw FormatError(std::string(name) + ": " + e.what());
  }
}

void save_wcm(const CooccurrenceMatrix& matrix, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write '" + path.string() + "'");
  write_wcm(matrix, out);
  out.flush();
  if (!out) throw DataError("error writing '" + path.string() + "'");
}

CooccurrenceMatrix load_wcm(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open '" + path.string() + "'");
  return read_wcm(in, "'" + path.string() + "'");
}

}  // namespace deqe
