#include "negaudit/stats.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>
#include <unordered_map>

#include "negaudit/rng.hpp"

namespace negaudit {

std::string_view to_string(ResampleMethod m) {
  return m == ResampleMethod::kExample ? "example" : "study_clustered";
}

std::string_view to_string(BootStatistic s) {
  return s == BootStatistic::kMeanPct ? "mean_pct" : "sum";
}

ResampleMethod resample_method_from_string(std::string_view s) {
  if (s == "example") return ResampleMethod::kExample;
  if (s == "study_clustered") return ResampleMethod::kStudyClustered;
  throw std::invalid_argument("unknown resample method: " + std::string(s));
}

namespace {

void check_config(const ResampleConfig& cfg) {
  if (cfg.n_resamples < 1)
    throw std::invalid_argument("n_resamples must be >= 1");
  if (!(cfg.confidence_level > 0.0 && cfg.confidence_level < 1.0))
    throw std::invalid_argument("confidence_level must lie in (0, 1)");
}

double percentile(std::vector<double>& sorted, double q) {
  const double pos = q * (sorted.size() - 1);
  const size_t lo = static_cast<size_t>(pos);
  const size_t hi = std::min(lo + 1, sorted.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

IntervalResult finish(std::vector<double>& stats, double point,
                      const ResampleConfig& cfg, ResampleMethod method,
                      BootStatistic statistic) {
  std::sort(stats.begin(), stats.end());
  const double alpha = 1.0 - cfg.confidence_level;
  IntervalResult r;
  r.point = point;
  r.low = percentile(stats, alpha / 2.0);
  r.high = percentile(stats, 1.0 - alpha / 2.0);
  r.n_resamples_used = static_cast<int>(stats.size());
  r.method = method;
  r.statistic = statistic;
  r.seed = cfg.seed;
  return r;
}

double stat_of(long long sum, size_t n, BootStatistic statistic) {
  return statistic == BootStatistic::kMeanPct
             ? 100.0 * static_cast<double>(sum) / static_cast<double>(n)
             : static_cast<double>(sum);
}

}  // namespace

IntervalResult bootstrap_ci(std::span<const int> values,
                            const ResampleConfig& cfg,
                            BootStatistic statistic) {
  check_config(cfg);
  const size_t n = values.size();
  if (n == 0) throw std::invalid_argument("bootstrap_ci: empty input");

  std::vector<double> stats(cfg.n_resamples);
  for (int iter = 0; iter < cfg.n_resamples; ++iter) {
    SplitMix64 rng(mix_seed(cfg.seed, static_cast<std::uint64_t>(iter)));
    long long sum = 0;
    for (size_t i = 0; i < n; ++i) sum += values[rng.below(n)];
    stats[iter] = stat_of(sum, n, statistic);
  }
  const long long total = std::accumulate(values.begin(), values.end(), 0LL);
  return finish(stats, stat_of(total, n, statistic), cfg,
                ResampleMethod::kExample, statistic);
}

IntervalResult clustered_bootstrap_ci(std::span<const int> values,
                                      std::span<const std::string> study_ids,
                                      const ResampleConfig& cfg,
                                      BootStatistic statistic) {
  check_config(cfg);
  if (values.empty())
    throw std::invalid_argument("clustered_bootstrap_ci: empty input");
  if (values.size() != study_ids.size())
    throw std::invalid_argument(
        "clustered_bootstrap_ci: values and study_ids differ in length");

  // Clusters keyed by first appearance so the draw order is deterministic.
  std::vector<std::vector<int>> clusters;
  std::unordered_map<std::string, size_t> index_of;
  for (size_t i = 0; i < values.size(); ++i) {
    auto [it, inserted] = index_of.emplace(study_ids[i], clusters.size());
    if (inserted) clusters.emplace_back();
    clusters[it->second].push_back(values[i]);
  }
  const size_t k = clusters.size();

  std::vector<long long> cluster_sums(k);
  std::vector<size_t> cluster_sizes(k);
  for (size_t c = 0; c < k; ++c) {
    cluster_sums[c] =
        std::accumulate(clusters[c].begin(), clusters[c].end(), 0LL);
    cluster_sizes[c] = clusters[c].size();
  }

  std::vector<double> stats(cfg.n_resamples);
  for (int iter = 0; iter < cfg.n_resamples; ++iter) {
    SplitMix64 rng(mix_seed(cfg.seed, static_cast<std::uint64_t>(iter)));
    long long sum = 0;
    size_t count = 0;
    for (size_t draw = 0; draw < k; ++draw) {
      const size_t c = rng.below(k);
      sum += cluster_sums[c];
      count += cluster_sizes[c];
    }
    stats[iter] = stat_of(sum, count, statistic);
  }
  const long long total = std::accumulate(values.begin(), values.end(), 0LL);
  return finish(stats, stat_of(total, values.size(), statistic), cfg,
                ResampleMethod::kStudyClustered, statistic);
}

double paired_permutation_test(std::span<const int> base_correct,
                               std::span<const int> verified_correct,
                               const ResampleConfig& cfg) {
  check_config(cfg);
  if (base_correct.size() != verified_correct.size())
    throw std::invalid_argument(
        "paired_permutation_test: vectors differ in length");
  const size_t n = base_correct.size();
  if (n == 0)
    throw std::invalid_argument("paired_permutation_test: empty input");

  // All comparisons run on integer pair-difference sums; no float ties.
  std::vector<int> deltas(n);
  long long observed = 0;
  for (size_t i = 0; i < n; ++i) {
    deltas[i] = verified_correct[i] - base_correct[i];
    observed += deltas[i];
  }

  int at_least = 0;
  for (int iter = 0; iter < cfg.n_resamples; ++iter) {
    SplitMix64 rng(mix_seed(cfg.seed, static_cast<std::uint64_t>(iter)));
    long long sum = 0;
    for (size_t i = 0; i < n; ++i)
      sum += rng.coin() ? -deltas[i] : deltas[i];
    if (sum >= observed) ++at_least;
  }
  return (1.0 + at_least) / (1.0 + cfg.n_resamples);
}

}  // namespace negaudit
