#pragma once

#include <map>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "negaudit/lexicon.hpp"
#include "negaudit/model.hpp"

namespace negaudit {

struct MetricCounts {
  int n = 0;
  int correct = 0;
  // Negated-option choice on an absence-classified question.
  int contradictions = 0;
  // Negated-option choice on a presence-classified question: the clinically
  // dangerous reversal.
  int presence_reversals = 0;
  // Any wrong prediction whose chosen option is the negated one.
  int wrong_with_negation = 0;
  // wrong_with_negation restricted to items where a unique positive
  // counterpart exists and equals the gold answer.
  int repairable_reversals = 0;

  double accuracy_pct() const;  // NaN when n == 0; rounded half-up, 2 decimals
};

struct MetricsReport {
  MetricCounts overall;
  std::map<std::string, MetricCounts> per_finding;  // keyed on target_finding
  MetricCounts absence_questions;
  MetricCounts presence_questions;
};

// Exact-match scoring over joined (item, prediction) pairs. Negated-option
// checks use the polarity recorded in the protocol; the lexicon only splits
// questions into absence/presence. Throws std::runtime_error on join errors.
MetricsReport score(std::span<const ProtocolItem> items,
                    std::span<const PredictionRecord> predictions,
                    const NegationLexicon& lexicon = extended_lexicon());

struct DiffReport {
  int n = 0;
  int changed = 0;   // final != base
  int improved = 0;  // base wrong, final right
  int worsened = 0;  // base right, final wrong
  int changed_still_wrong = 0;
  int triggered = 0;
  int base_correct = 0;
  int verified_correct = 0;
  std::vector<std::string> worsened_item_ids;

  double coverage_pct() const { return n == 0 ? 0.0 : 100.0 * triggered / n; }
  // Exact: (improved - worsened) / n, in percentage points.
  double delta_pp() const {
    return n == 0 ? 0.0 : 100.0 * (improved - worsened) / n;
  }
};

// Compares base predictions against verified outputs on the same item set.
// Mismatched item sets are a hard error.
DiffReport diff(std::span<const ProtocolItem> items,
                std::span<const PredictionRecord> base,
                std::span<const VerifiedPrediction> verified);

struct GapSummary {
  int n = 0;        // items contributing a gap
  int skipped = 0;  // missing logprobs or no unique counterpart
  double mean = 0.0;
  double min = 0.0, q25 = 0.0, median = 0.0, q75 = 0.0, max = 0.0;
  std::vector<std::pair<std::string, double>> per_item;  // (item_id, gap)
};

// Option-level log-probability gap, negated option minus positive
// counterpart, over items carrying per-option logprobs. When subset is
// given, only those item ids contribute.
GapSummary logprob_gap(std::span<const ProtocolItem> items,
                       std::span<const PredictionRecord> predictions,
                       const std::set<std::string>* subset = nullptr);

// Converts verified outputs back into plain predictions (choice = final) so
// any scoring path can run on them unchanged.
std::vector<PredictionRecord> predictions_from_verified(
    std::span<const PredictionRecord> base,
    std::span<const VerifiedPrediction> verified);

}  // namespace negaudit
