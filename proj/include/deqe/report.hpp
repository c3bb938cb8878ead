#pragma once

#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "deqe/analysis.hpp"
#include "deqe/corpus.hpp"
#include "deqe/metrics.hpp"

namespace deqe {

// Resolved run configuration echoed at the top of every report, one
// "# key=value" line per setting, in insertion order.
class RunConfig {
 public:
  explicit RunConfig(std::string subcommand) : subcommand_(std::move(subcommand)) {}

  RunConfig& set(std::string key, std::string value);
  RunConfig& set(std::string key, bool value) { return set(std::move(key), std::string(value ? "true" : "false")); }
  RunConfig& set(std::string key, const char* value) { return set(std::move(key), std::string(value)); }
  template <typename Number>
  RunConfig& set(std::string key, Number value) {
    return set(std::move(key), format_number(value));
  }

  const std::string& subcommand() const { return subcommand_; }
  const std::vector<std::pair<std::string, std::string>>& settings() const { return settings_; }

  void write_header(std::ostream& out) const;

  static std::string format_number(double value);
  static std::string format_number(unsigned long long value);
  static std::string format_number(unsigned long value) { return format_number(static_cast<unsigned long long>(value)); }
  static std::string format_number(unsigned value) { return format_number(static_cast<unsigned long long>(value)); }
  static std::string format_number(int value) { return std::to_string(value); }

 private:
  std::string subcommand_;
  std::vector<std::pair<std::string, std::string>> settings_;
};

void write_vocab_stats(std::ostream& out, std::string_view side, const VocabStats& stats);
void write_bucket_report(std::ostream& out, const BucketReport& report);
void write_histogram(std::ostream& out, const HistogramReport& report);
void write_correlation(std::ostream& out, const CorrelationResult& result);
void write_bleu(std::ostream& out, const BleuResult& result);
void write_filter_summary(std::ostream& out, const FilterSummary& summary);

// Horizontal bar rendering of a histogram, for eyeballing only.
void render_histogram_chart(std::ostream& out, const HistogramReport& report, std::size_t width = 60);

std::string format_fixed(double value, int decimals);

}  // namespace deqe
