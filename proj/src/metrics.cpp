#include "negaudit/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <unordered_map>

namespace negaudit {

double MetricCounts::accuracy_pct() const {
  if (n == 0) return std::numeric_limits<double>::quiet_NaN();
  return round_pct(100.0 * correct / n);
}

namespace {

int negated_index_of(const ProtocolItem& item) {
  for (int i = 0; i < static_cast<int>(item.options.size()); ++i)
    if (item.options[i].polarity == Polarity::kNeg) return i;
  return -1;
}

void tally(MetricCounts& counts, const ProtocolItem& item, int choice,
           PolarityClass polarity) {
  ++counts.n;
  const bool correct = choice == item.gold_index;
  if (correct) ++counts.correct;

  const int negated = negated_index_of(item);
  const bool chose_negated = negated >= 0 && choice == negated;
  if (chose_negated && polarity == PolarityClass::kAbsence)
    ++counts.contradictions;
  if (chose_negated && polarity == PolarityClass::kPresence)
    ++counts.presence_reversals;
  if (chose_negated && !correct) {
    ++counts.wrong_with_negation;
    auto counterpart = find_positive_counterpart(item.options, negated);
    if (counterpart && *counterpart == item.gold_index)
      ++counts.repairable_reversals;
  }
}

}  // namespace

MetricsReport score(std::span<const ProtocolItem> items,
                    std::span<const PredictionRecord> predictions,
                    const NegationLexicon& lexicon) {
  const JoinResult join = join_predictions(items, predictions);
  if (!join.ok()) {
    std::string msg = "score: join failed:";
    for (const auto& e : join.errors) msg += "\n  " + e;
    throw std::runtime_error(msg);
  }

  MetricsReport report;
  for (const auto& [item, pred] : join.pairs) {
    const PolarityClass polarity = classify_question(item->question, lexicon);
    tally(report.overall, *item, pred->choice_index, polarity);
    tally(report.per_finding[item->target_finding], *item, pred->choice_index,
          polarity);
    if (polarity == PolarityClass::kAbsence)
      tally(report.absence_questions, *item, pred->choice_index, polarity);
    else if (polarity == PolarityClass::kPresence)
      tally(report.presence_questions, *item, pred->choice_index, polarity);
  }
  return report;
}

DiffReport diff(std::span<const ProtocolItem> items,
                std::span<const PredictionRecord> base,
                std::span<const VerifiedPrediction> verified) {
  std::unordered_map<std::string, const PredictionRecord*> base_by_id;
  for (const auto& p : base) base_by_id.emplace(p.item_id, &p);
  std::unordered_map<std::string, const VerifiedPrediction*> verified_by_id;
  for (const auto& v : verified) verified_by_id.emplace(v.item_id, &v);
  if (base_by_id.size() != base.size() ||
      verified_by_id.size() != verified.size())
    throw std::runtime_error("diff: duplicate item_id in inputs");
  if (base_by_id.size() != verified_by_id.size())
    throw std::runtime_error("diff: base and verified item sets differ");

  DiffReport report;
  for (const auto& item : items) {
    auto b = base_by_id.find(item.item_id);
    auto v = verified_by_id.find(item.item_id);
    if (b == base_by_id.end() && v == verified_by_id.end()) continue;
    if (b == base_by_id.end() || v == verified_by_id.end())
      throw std::runtime_error("diff: item present on one side only: " +
                               item.item_id);
    ++report.n;
    const int base_choice = b->second->choice_index;
    const int final_choice = v->second->final_index;
    const bool base_right = base_choice == item.gold_index;
    const bool final_right = final_choice == item.gold_index;
    if (v->second->triggered) ++report.triggered;
    if (base_right) ++report.base_correct;
    if (final_right) ++report.verified_correct;
    if (final_choice != base_choice) {
      ++report.changed;
      if (!base_right && final_right) ++report.improved;
      if (base_right && !final_right) {
        ++report.worsened;
        report.worsened_item_ids.push_back(item.item_id);
      }
      if (!base_right && !final_right) ++report.changed_still_wrong;
    }
  }
  if (report.n != static_cast<int>(base_by_id.size()))
    throw std::runtime_error(
        "diff: predictions reference items outside the protocol");
  return report;
}

GapSummary logprob_gap(std::span<const ProtocolItem> items,
                       std::span<const PredictionRecord> predictions,
                       const std::set<std::string>* subset) {
  const JoinResult join = join_predictions(items, predictions);
  if (!join.ok()) {
    std::string msg = "logprob_gap: join failed:";
    for (const auto& e : join.errors) msg += "\n  " + e;
    throw std::runtime_error(msg);
  }

  GapSummary summary;
  for (const auto& [item, pred] : join.pairs) {
    if (subset && !subset->count(item->item_id)) continue;
    const int negated = negated_index_of(*item);
    if (negated < 0 || !pred->option_logprobs) {
      ++summary.skipped;
      continue;
    }
    auto counterpart = find_positive_counterpart(item->options, negated);
    if (!counterpart) {
      ++summary.skipped;
      continue;
    }
    const auto& lp = *pred->option_logprobs;
    summary.per_item.emplace_back(item->item_id,
                                  lp[negated] - lp[*counterpart]);
  }

  summary.n = static_cast<int>(summary.per_item.size());
  if (summary.n == 0) return summary;

  std::vector<double> gaps;
  gaps.reserve(summary.per_item.size());
  double total = 0.0;
  for (const auto& [_, g] : summary.per_item) {
    gaps.push_back(g);
    total += g;
  }
  std::sort(gaps.begin(), gaps.end());
  auto quantile = [&](double q) {
    const double pos = q * (gaps.size() - 1);
    const size_t lo = static_cast<size_t>(pos);
    const size_t hi = std::min(lo + 1, gaps.size() - 1);
    const double frac = pos - static_cast<double>(lo);
    return gaps[lo] + frac * (gaps[hi] - gaps[lo]);
  };
  summary.mean = total / summary.n;
  summary.min = gaps.front();
  summary.q25 = quantile(0.25);
  summary.median = quantile(0.5);
  summary.q75 = quantile(0.75);
  summary.max = gaps.back();
  return summary;
}

std::vector<PredictionRecord> predictions_from_verified(
    std::span<const PredictionRecord> base,
    std::span<const VerifiedPrediction> verified) {
  std::unordered_map<std::string, const VerifiedPrediction*> by_id;
  for (const auto& v : verified) by_id.emplace(v.item_id, &v);
  std::vector<PredictionRecord> out(base.begin(), base.end());
  for (auto& pred : out) {
    auto it = by_id.find(pred.item_id);
    if (it == by_id.end())
      throw std::runtime_error("no verified output for item " + pred.item_id);
    pred.choice_index = it->second->final_index;
  }
  return out;
}

}  // namespace negaudit
