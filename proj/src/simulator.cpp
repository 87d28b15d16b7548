#include "negaudit/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "negaudit/builder.hpp"
#include "negaudit/rng.hpp"

namespace negaudit {

double ScoreModel::support(const std::string& concept_name) const {
  auto it = concept_support.find(concept_name);
  if (it == concept_support.end())
    throw std::out_of_range("score model has no concept-support entry for '" +
                            concept_name + "'");
  return it->second;
}

double ScoreModel::residual(const std::string& concept_name,
                            Polarity p) const {
  auto it = polarity_residual.find(concept_name);
  if (it == polarity_residual.end())
    throw std::out_of_range("score model has no polarity-residual entry for '" +
                            concept_name + "'");
  return p == Polarity::kPos ? it->second.pos : it->second.neg;
}

double score_option(const ScoreModel& model, const AnswerOption& option) {
  return model.support(option.concept_name) +
         model.residual(option.concept_name, option.polarity);
}

int predict(const ScoreModel& model, const ProtocolItem& item) {
  int best = 0;
  double best_score = score_option(model, item.options[0]);
  for (int i = 1; i < static_cast<int>(item.options.size()); ++i) {
    const double s = score_option(model, item.options[i]);
    if (s > best_score) {  // ties keep the lower index
      best = i;
      best_score = s;
    }
  }
  return best;
}

namespace {

struct PairView {
  int positive = -1;  // unique same-concept positive counterpart
  int negated = -1;   // unique negated option
};

// Requires gold to be the positive counterpart of the unique negated option.
PairView gold_pair_or_throw(const ProtocolItem& item) {
  PairView view;
  for (int i = 0; i < static_cast<int>(item.options.size()); ++i) {
    if (item.options[i].polarity == Polarity::kNeg) {
      if (view.negated >= 0)
        throw std::invalid_argument("item has several negated options: " +
                                    item.item_id);
      view.negated = i;
    }
  }
  if (view.negated < 0)
    throw std::invalid_argument("item has no negated option: " + item.item_id);
  auto counterpart = find_positive_counterpart(item.options, view.negated);
  if (!counterpart)
    throw std::invalid_argument("no unique positive counterpart in item: " +
                                item.item_id);
  if (*counterpart != item.gold_index)
    throw std::invalid_argument("gold is not the positive counterpart: " +
                                item.item_id);
  view.positive = *counterpart;
  return view;
}

const std::vector<std::string>& concept_pool() {
  static const std::vector<std::string> pool = {
      "edema",           "consolidation", "pneumothorax",
      "pleural effusion", "cardiomegaly",  "atelectasis",
      "lung opacity",    "fracture",      "pleural thickening",
  };
  return pool;
}

}  // namespace

Prop1Result check_proposition_1(const ScoreModel& model,
                                const ProtocolItem& item) {
  const PairView pair = gold_pair_or_throw(item);
  const std::string& gold_concept = item.options[pair.positive].concept_name;

  const double pos_score = score_option(model, item.options[pair.positive]);
  const double neg_score = score_option(model, item.options[pair.negated]);
  double best_distractor = -std::numeric_limits<double>::infinity();
  for (int i = 0; i < static_cast<int>(item.options.size()); ++i) {
    if (i == pair.positive || i == pair.negated) continue;
    best_distractor =
        std::max(best_distractor, score_option(model, item.options[i]));
  }

  Prop1Result result;
  result.assumptions_hold =
      std::max(pos_score, neg_score) > best_distractor &&
      model.residual(gold_concept, Polarity::kNeg) >
          model.residual(gold_concept, Polarity::kPos);
  result.conclusion_holds = predict(model, item) == pair.negated;
  return result;
}

bool check_proposition_2(const ScoreModel& model, const ProtocolItem& item) {
  const PairView pair = gold_pair_or_throw(item);
  const AnswerOption& gold = item.options[item.gold_index];
  const AnswerOption& predicted = item.options[predict(model, item)];

  const bool predicted_negated_option =
      &predicted == &item.options[pair.negated];
  const bool concept_match_polarity_flip =
      predicted.concept_name == gold.concept_name &&
      predicted.polarity != gold.polarity;
  return predicted_negated_option == concept_match_polarity_flip;
}

std::vector<SimInstance> generate_instances(std::uint64_t seed, int n,
                                            const SimRanges& ranges) {
  if (!(std::isfinite(ranges.u_min) && std::isfinite(ranges.u_max) &&
        std::isfinite(ranges.v_pos_min) && std::isfinite(ranges.v_pos_max) &&
        std::isfinite(ranges.v_neg_min) && std::isfinite(ranges.v_neg_max)))
    throw std::invalid_argument("generate_instances: non-finite range");

  const auto& pool = concept_pool();
  std::vector<SimInstance> instances;
  instances.reserve(static_cast<size_t>(std::max(n, 0)));

  for (int idx = 0; idx < n; ++idx) {
    SplitMix64 rng(mix_seed(seed, static_cast<std::uint64_t>(idx)));
    const int option_count = 3 + static_cast<int>(rng.below(3));  // 3..5

    // Distinct concepts: gold first, then distractors.
    std::vector<int> order(pool.size());
    for (size_t i = 0; i < pool.size(); ++i) order[i] = static_cast<int>(i);
    for (size_t i = pool.size() - 1; i > 0; --i)
      std::swap(order[i], order[rng.below(i + 1)]);
    const std::string gold_concept = pool[order[0]];

    SimInstance inst;
    for (int c = 0; c < option_count - 1; ++c) {
      const std::string& name = pool[order[c]];
      inst.model.concept_support[name] =
          rng.uniform(ranges.u_min, ranges.u_max);
      inst.model.polarity_residual[name] = {
          rng.uniform(ranges.v_pos_min, ranges.v_pos_max),
          rng.uniform(ranges.v_neg_min, ranges.v_neg_max)};
    }

    std::vector<AnswerOption> options;
    AnswerOption positive;
    positive.surface_text = render_positive(gold_concept);
    positive.concept_name = gold_concept;
    positive.polarity = Polarity::kPos;
    options.push_back(positive);

    const auto& canonical = paraphrase_pattern(ParaphraseVariant::kCanonicalNo);
    AnswerOption negated;
    negated.surface_text = render_negated(canonical, gold_concept);
    negated.concept_name = gold_concept;
    negated.polarity = Polarity::kNeg;
    negated.lexicon_pattern_id = canonical.pattern_id;
    options.push_back(negated);

    for (int c = 1; c < option_count - 1; ++c) {
      AnswerOption distractor;
      distractor.surface_text = render_positive(pool[order[c]]);
      distractor.concept_name = pool[order[c]];
      distractor.polarity = Polarity::kPos;
      options.push_back(distractor);
    }

    // Random layout, constrained so the positive member of the pair comes
    // first: the lowest-index tie break must select POS on equal scores.
    std::vector<int> slots(options.size());
    for (size_t i = 0; i < slots.size(); ++i) slots[i] = static_cast<int>(i);
    for (size_t i = slots.size() - 1; i > 0; --i)
      std::swap(slots[i], slots[rng.below(i + 1)]);
    int pos_at = -1, neg_at = -1;
    for (size_t i = 0; i < slots.size(); ++i) {
      if (slots[i] == 0) pos_at = static_cast<int>(i);
      if (slots[i] == 1) neg_at = static_cast<int>(i);
    }
    if (pos_at > neg_at) std::swap(slots[pos_at], slots[neg_at]);

    ProtocolItem item;
    item.item_id = "sim__" + std::to_string(seed) + "__" + std::to_string(idx);
    item.study_id = "simstudy__" + std::to_string(idx);
    item.image_refs = {"synthetic://" + item.item_id};
    item.question = std::string(kPresenceQuestion);
    item.options.reserve(options.size());
    for (size_t i = 0; i < slots.size(); ++i)
      item.options.push_back(options[slots[i]]);
    for (int i = 0; i < static_cast<int>(slots.size()); ++i)
      if (slots[i] == 0) item.gold_index = i;
    item.protocol_kind = ProtocolKind::kDirectPresence;
    item.target_finding = gold_concept;
    item.variant_tag = "canonical_no";
    inst.item = std::move(item);

    std::vector<double> scores;
    scores.reserve(inst.item.options.size());
    for (const auto& o : inst.item.options)
      scores.push_back(score_option(inst.model, o));
    // log-sum-exp shift keeps score differences equal to logprob differences.
    const double peak = *std::max_element(scores.begin(), scores.end());
    double lse = 0.0;
    for (double s : scores) lse += std::exp(s - peak);
    lse = peak + std::log(lse);

    PredictionRecord pred;
    pred.item_id = inst.item.item_id;
    pred.choice_index = predict(inst.model, inst.item);
    std::vector<double> logprobs(scores.size());
    for (size_t i = 0; i < scores.size(); ++i) logprobs[i] = scores[i] - lse;
    pred.option_logprobs = std::move(logprobs);
    inst.prediction = std::move(pred);

    instances.push_back(std::move(inst));
  }
  return instances;
}

SafeSubsetReport check_safe_subset(std::span<const SimInstance> instances,
                                   const VerifierConfig& cfg) {
  std::vector<ProtocolItem> items;
  std::vector<PredictionRecord> preds;
  items.reserve(instances.size());
  preds.reserve(instances.size());
  for (const auto& inst : instances) {
    items.push_back(inst.item);
    preds.push_back(inst.prediction);
  }

  const BatchVerifyResult batch = batch_verify(items, preds, cfg);

  SafeSubsetReport report;
  report.n = static_cast<int>(instances.size());
  int corrected = 0;
  for (size_t i = 0; i < instances.size(); ++i) {
    const auto& item = items[i];
    const auto& v = batch.verified[i];
    const bool base_right = v.base_index == item.gold_index;
    const bool final_right = v.final_index == item.gold_index;
    if (!base_right) ++report.base_wrong;
    if (v.triggered) {
      ++report.triggered;
      if (!final_right) {
        report.exact_on_triggered = false;
        report.failures.push_back(item.item_id + ": triggered but not gold");
      }
      if (!base_right && final_right) ++corrected;
    } else if (v.final_index != v.base_index) {
      report.unchanged_outside = false;
      report.failures.push_back(item.item_id + ": changed without trigger");
    }
    if (base_right && !final_right) {
      report.harm_empty = false;
      report.failures.push_back(item.item_id + ": harmed");
    }
  }

  // Exact bookkeeping: the accuracy delta must equal the triggered-and-wrong
  // count, i.e. every trigger on a wrong baseline is a correction.
  int base_correct = 0, verified_correct = 0, triggered_wrong = 0;
  for (size_t i = 0; i < instances.size(); ++i) {
    const auto& v = batch.verified[i];
    const int gold = items[i].gold_index;
    if (v.base_index == gold) ++base_correct;
    if (v.final_index == gold) ++verified_correct;
    if (v.triggered && v.base_index != gold) ++triggered_wrong;
  }
  report.delta_identity =
      (verified_correct - base_correct) == triggered_wrong &&
      corrected == triggered_wrong;
  if (!report.delta_identity)
    report.failures.push_back("accuracy delta does not match corrected count");
  return report;
}

}  // namespace negaudit
