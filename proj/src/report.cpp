#include "negaudit/report.hpp"

#include <cstdio>
#include <limits>
#include <sstream>

namespace negaudit {

ordered_json to_json(const StatsBundle& s) {
  ordered_json j;
  j["base_accuracy"] = to_json(s.base_accuracy);
  j["verified_accuracy"] = to_json(s.verified_accuracy);
  j["polarity_errors"] = to_json(s.polarity_errors);
  j["permutation_p"] = s.permutation_p;
  j["n_resamples"] = s.n_resamples;
  j["seed"] = s.seed;
  j["method"] = to_string(s.method);
  return j;
}

namespace {

int polarity_errors(const MetricCounts& c) {
  return c.contradictions + c.presence_reversals;
}

void add_row(std::ostringstream& out, const std::string& label,
             const MetricCounts& base, const MetricCounts& verified) {
  const double delta =
      base.n == 0 ? 0.0
                  : 100.0 * (verified.correct - base.correct) / base.n;
  out << "| " << label << " | " << base.n << " | " << format_pct(
             base.n == 0 ? std::numeric_limits<double>::quiet_NaN()
                         : 100.0 * base.correct / base.n)
      << " | "
      << format_pct(verified.n == 0
                        ? std::numeric_limits<double>::quiet_NaN()
                        : 100.0 * verified.correct / verified.n)
      << " | " << (delta >= 0 ? "+" : "") << format_pct(delta) << " | "
      << polarity_errors(base) << " → " << polarity_errors(verified)
      << " |\n";
}

}  // namespace

std::string render_markdown(const AuditReport& report) {
  std::ostringstream out;
  out << "| Subset | n | Base acc | Verified acc | Δ pp | Errors (before → after) |\n";
  out << "|---|---|---|---|---|---|\n";
  add_row(out, "overall", report.base.overall, report.verified.overall);
  for (const auto& [finding, counts] : report.base.per_finding) {
    auto it = report.verified.per_finding.find(finding);
    if (it != report.verified.per_finding.end())
      add_row(out, finding, counts, it->second);
  }
  out << "\n";
  out << "- changed: " << report.delta.changed
      << ", improved: " << report.delta.improved
      << ", worsened: " << report.delta.worsened
      << ", changed-still-wrong: " << report.delta.changed_still_wrong << "\n";
  out << "- coverage: " << format_pct(report.delta.coverage_pct()) << "%\n";
  if (!report.delta.worsened_item_ids.empty()) {
    out << "- worsened items:";
    for (const auto& id : report.delta.worsened_item_ids) out << " " << id;
    out << "\n";
  }
  if (report.stats) {
    const auto& s = *report.stats;
    out << "- base acc CI: " << format_pct(s.base_accuracy.point) << " ["
        << format_pct(s.base_accuracy.low) << ", "
        << format_pct(s.base_accuracy.high) << "]\n";
    out << "- verified acc CI: " << format_pct(s.verified_accuracy.point)
        << " [" << format_pct(s.verified_accuracy.low) << ", "
        << format_pct(s.verified_accuracy.high) << "]\n";
    out << "- polarity errors CI: " << s.polarity_errors.point << " ["
        << s.polarity_errors.low << ", " << s.polarity_errors.high << "]\n";
    out << "- permutation p: ";
    if (s.permutation_p < 0.001) {
      out << "<0.001";
    } else {
      char buf[16];
      std::snprintf(buf, sizeof(buf), "%.3f", s.permutation_p);
      out << buf;
    }
    out << "\n";
  }
  return out.str();
}

ordered_json to_json(const AuditReport& report) {
  ordered_json j;
  j["base"] = to_json(report.base);
  j["verified"] = to_json(report.verified);
  j["diff"] = to_json(report.delta);
  if (report.stats) j["stats"] = to_json(*report.stats);
  return j;
}

}  // namespace negaudit
