#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace negaudit {

enum class ResampleMethod { kExample, kStudyClustered };
enum class BootStatistic { kMeanPct, kSum };

std::string_view to_string(ResampleMethod m);
std::string_view to_string(BootStatistic s);
ResampleMethod resample_method_from_string(std::string_view s);

struct ResampleConfig {
  int n_resamples = 2000;
  std::uint64_t seed = 42;
  double confidence_level = 0.95;
};

struct IntervalResult {
  double point = 0.0;
  double low = 0.0;
  double high = 0.0;
  int n_resamples_used = 0;
  ResampleMethod method = ResampleMethod::kExample;
  BootStatistic statistic = BootStatistic::kMeanPct;
  std::uint64_t seed = 0;
};

// Percentile bootstrap over per-item 0/1 flags. Each iteration reseeds from
// (seed, iteration), so results are independent of evaluation order. The
// statistic is either the resampled mean on the percentage scale or the
// resampled sum (for count intervals). Throws on empty input.
IntervalResult bootstrap_ci(std::span<const int> values,
                            const ResampleConfig& cfg,
                            BootStatistic statistic = BootStatistic::kMeanPct);

// Study-clustered percentile bootstrap: each iteration draws k studies with
// replacement (k = number of distinct studies) and includes all their
// records. study_ids must parallel values.
IntervalResult clustered_bootstrap_ci(
    std::span<const int> values, std::span<const std::string> study_ids,
    const ResampleConfig& cfg, BootStatistic statistic = BootStatistic::kMeanPct);

// One-sided paired permutation test of mean(verified) - mean(base) against
// the null of no improvement. Each iteration flips every pair with
// probability 1/2; p = (1 + #{permuted >= observed}) / (1 + n_resamples),
// computed in integer arithmetic. Never returns exactly 0.
double paired_permutation_test(std::span<const int> base_correct,
                               std::span<const int> verified_correct,
                               const ResampleConfig& cfg);

}  // namespace negaudit
