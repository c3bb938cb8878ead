#include "deqe/report.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <ostream>

namespace deqe {

std::string format_fixed(double value, int decimals) {
  char buf[64];
  const int n = std::snprintf(buf, sizeof buf, "%.*f", decimals, value);
  return std::string(buf, static_cast<std::size_t>(n));
}

RunConfig& RunConfig::set(std::string key, std::string value) {
  for (auto& [k, v] : settings_) {
    if (k == key) {
      v = std::move(value);
      return *this;
    }
  }
  settings_.emplace_back(std::move(key), std::move(value));
  return *this;
}

std::string RunConfig::format_number(double value) {
  char buf[32];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, value);
  return std::string(buf, end);
}

std::string RunConfig::format_number(unsigned long long value) { return std::to_string(value); }

void RunConfig::write_header(std::ostream& out) const {
  out << "# de-qe " << subcommand_ << '\n';
  for (const auto& [k, v] : settings_) out << "# " << k << '=' << v << '\n';
}

void write_vocab_stats(std::ostream& out, std::string_view side, const VocabStats& stats) {
  auto row = [&](std::string_view metric, const std::string& threshold, const std::string& types,
                 const std::string& percent) {
    out << side << '\t' << metric << '\t' << threshold << '\t' << types << '\t' << percent << '\n';
  };
  row("vocab_size", "-", std::to_string(stats.vocab_size), format_fixed(stats.percent(stats.vocab_size), 2));
  row("token_count", "-", std::to_string(stats.token_count), "-");
  row("singletons", "1", std::to_string(stats.singletons), format_fixed(stats.percent(stats.singletons), 2));
  for (const auto& t : stats.thresholds) {
    row("at_least", std::to_string(t.threshold), std::to_string(t.at_least),
        format_fixed(stats.percent(t.at_least), 2));
    row("below", std::to_string(t.threshold), std::to_string(t.below),
        format_fixed(stats.percent(t.below), 2));
  }
  row("above_hifreq_cutoff", std::to_string(stats.hifreq_cutoff),
      std::to_string(stats.hifreq_types.size()), format_fixed(stats.percent(stats.hifreq_types.size()), 2));
  for (const auto& [token, freq] : stats.hifreq_types) {
    out << side << "\thifreq_type\t" << token << '\t' << freq << "\t-\n";
  }
}

void write_bucket_report(std::ostream& out, const BucketReport& report) {
  out << "# total_segments=" << report.total << '\n';
  out << "# degenerate_segments=" << report.degenerate << '\n';
  out << "#bucket\tsegments\tdegenerate\tbleu\tbrevity_penalty\n";
  for (const auto& row : report.rows) {
    out << row.spec.label() << '\t' << row.segments << '\t' << row.degenerate << '\t';
    if (row.bleu) {
      out << format_fixed(row.bleu->score, 4) << '\t' << format_fixed(row.bleu->brevity_penalty, 4);
    } else {
      out << "-\t-";
    }
    out << '\n';
  }
}

void write_histogram(std::ostream& out, const HistogramReport& report) {
  out << "#lower\tupper\tcount\n";
  for (std::size_t k = 0; k < report.bins.size(); ++k) {
    const auto& bin = report.bins[k];
    out << RunConfig::format_number(bin.lower) << '\t' << RunConfig::format_number(bin.upper)
        << '\t' << bin.count << '\n';
  }
}

void write_correlation(std::ostream& out, const CorrelationResult& result) {
  out << "#r\tt\tp\tn\n";
  char buf[128];
  std::snprintf(buf, sizeof buf, "%.6f\t%.6f\t%.6g\t%zu\n", result.r, result.t_statistic,
                result.p_value, result.n);
  out << buf;
}

void write_bleu(std::ostream& out, const BleuResult& result) {
  out << "#bleu\tp1\tp2\tp3\tp4\tbrevity_penalty\thyp_len\tref_len\n";
  out << format_fixed(result.score, 4);
  for (double p : result.precisions) out << '\t' << format_fixed(p, 6);
  out << '\t' << format_fixed(result.brevity_penalty, 6) << '\t' << result.hypothesis_length << '\t'
      << result.reference_length << '\n';
}

void write_filter_summary(std::ostream& out, const FilterSummary& summary) {
  out << "#metric\tvalue\n";
  out << "total\t" << summary.total << '\n';
  out << "kept\t" << summary.kept << '\n';
  out << "dropped\t" << summary.dropped << '\n';
  out << "degenerate\t" << summary.degenerate << '\n';
  write_histogram(out, summary.histogram);
}

void render_histogram_chart(std::ostream& out, const HistogramReport& report, std::size_t width) {
  std::size_t peak = 1;
  for (const auto& bin : report.bins) peak = std::max(peak, bin.count);
  for (std::size_t k = 0; k < report.bins.size(); ++k) {
    const auto& bin = report.bins[k];
    char label[48];
    std::snprintf(label, sizeof label, "[%6.2f,%6.2f%c", bin.lower, bin.upper,
                  k + 1 == report.bins.size() ? ']' : ')');
    const std::size_t bar = bin.count * width / peak;
    out << label << ' ' << std::string(bar, '#') << ' ' << bin.count << '\n';
  }
}

}  // namespace deqe
