#pragma once

#include <optional>
#include <string>

#include "negaudit/io.hpp"
#include "negaudit/metrics.hpp"

namespace negaudit {

struct StatsBundle {
  IntervalResult base_accuracy;
  IntervalResult verified_accuracy;
  IntervalResult polarity_errors;  // count interval for base NEG choices
  double permutation_p = 1.0;
  int n_resamples = 0;
  std::uint64_t seed = 0;
  ResampleMethod method = ResampleMethod::kExample;
};

ordered_json to_json(const StatsBundle& s);

// Side-by-side audit table: Base acc / Verified acc / delta pp / polarity
// errors before -> after, with per-finding rows. Rendered once; emitted as
// markdown and JSON from the same pass.
struct AuditReport {
  MetricsReport base;
  MetricsReport verified;
  DiffReport delta;
  std::optional<StatsBundle> stats;
};

std::string render_markdown(const AuditReport& report);
ordered_json to_json(const AuditReport& report);

}  // namespace negaudit
