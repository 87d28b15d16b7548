#include "negaudit/model.hpp"

#include <cmath>
#include <cstdio>
#include <set>
#include <stdexcept>
#include <unordered_map>
#include <unordered_set>

namespace negaudit {

std::string_view to_string(Polarity p) {
  return p == Polarity::kPos ? "POS" : "NEG";
}

Polarity polarity_from_string(std::string_view s) {
  if (s == "POS") return Polarity::kPos;
  if (s == "NEG") return Polarity::kNeg;
  throw std::invalid_argument("unknown polarity: " + std::string(s));
}

std::string_view to_string(ProtocolKind k) {
  switch (k) {
    case ProtocolKind::kDirectPresence: return "DIRECT_PRESENCE";
    case ProtocolKind::kReportAbsence: return "REPORT_ABSENCE";
    case ProtocolKind::kPositiveControl: return "POSITIVE_CONTROL";
    case ProtocolKind::kRetroPresence: return "RETRO_PRESENCE";
    case ProtocolKind::kRetroAbsence: return "RETRO_ABSENCE";
  }
  return "?";
}

ProtocolKind protocol_kind_from_string(std::string_view s) {
  if (s == "DIRECT_PRESENCE") return ProtocolKind::kDirectPresence;
  if (s == "REPORT_ABSENCE") return ProtocolKind::kReportAbsence;
  if (s == "POSITIVE_CONTROL") return ProtocolKind::kPositiveControl;
  if (s == "RETRO_PRESENCE") return ProtocolKind::kRetroPresence;
  if (s == "RETRO_ABSENCE") return ProtocolKind::kRetroAbsence;
  throw std::invalid_argument("unknown protocol_kind: " + std::string(s));
}

std::string_view to_string(VerifyReason r) {
  switch (r) {
    case VerifyReason::kNotNegatedPrediction: return "NOT_NEGATED_PREDICTION";
    case VerifyReason::kNoNegationCue: return "NO_NEGATION_CUE";
    case VerifyReason::kAmbiguousOptions: return "AMBIGUOUS_OPTIONS";
    case VerifyReason::kNoCounterpart: return "NO_COUNTERPART";
    case VerifyReason::kRepairedAbsence: return "REPAIRED_ABSENCE";
    case VerifyReason::kRepairedPresence: return "REPAIRED_PRESENCE";
    case VerifyReason::kY0Replaced: return "Y0_REPLACED";
    case VerifyReason::kPassThrough: return "PASS_THROUGH";
  }
  return "?";
}

VerifyReason verify_reason_from_string(std::string_view s) {
  if (s == "NOT_NEGATED_PREDICTION") return VerifyReason::kNotNegatedPrediction;
  if (s == "NO_NEGATION_CUE") return VerifyReason::kNoNegationCue;
  if (s == "AMBIGUOUS_OPTIONS") return VerifyReason::kAmbiguousOptions;
  if (s == "NO_COUNTERPART") return VerifyReason::kNoCounterpart;
  if (s == "REPAIRED_ABSENCE") return VerifyReason::kRepairedAbsence;
  if (s == "REPAIRED_PRESENCE") return VerifyReason::kRepairedPresence;
  if (s == "Y0_REPLACED") return VerifyReason::kY0Replaced;
  if (s == "PASS_THROUGH") return VerifyReason::kPassThrough;
  throw std::invalid_argument("unknown reason: " + std::string(s));
}

double round_pct(double pct) {
  if (!std::isfinite(pct)) return pct;
  return std::floor(pct * 100.0 + 0.5) / 100.0;
}

std::string format_pct(double pct) {
  if (!std::isfinite(pct)) return "null";
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", round_pct(pct));
  return buf;
}

namespace {

bool trimmed_nonempty(const std::string& s) {
  if (s.empty()) return false;
  return !std::isspace(static_cast<unsigned char>(s.front())) &&
         !std::isspace(static_cast<unsigned char>(s.back()));
}

int count_negated(const ProtocolItem& item) {
  int n = 0;
  for (const auto& o : item.options)
    if (o.polarity == Polarity::kNeg) ++n;
  return n;
}

}  // namespace

ValidationReport validate_protocol(std::span<const ProtocolItem> items) {
  ValidationReport report;
  auto error = [&](const std::string& id, std::string msg) {
    report.errors.push_back({id, std::move(msg)});
  };
  auto warn = [&](const std::string& id, std::string msg) {
    report.warnings.push_back({id, std::move(msg)});
  };

  std::unordered_set<std::string> seen_ids;
  for (const auto& item : items) {
    if (!seen_ids.insert(item.item_id).second)
      error(item.item_id, "duplicate item_id");

    if (item.options.size() < 3)
      error(item.item_id, "fewer than 3 options");
    if (item.gold_index < 0 ||
        item.gold_index >= static_cast<int>(item.options.size()))
      error(item.item_id, "gold_index out of range");

    for (const auto& o : item.options) {
      if (!trimmed_nonempty(o.concept_name))
        error(item.item_id, "option concept empty or untrimmed: '" +
                                o.surface_text + "'");
      if (o.polarity == Polarity::kNeg && !o.lexicon_pattern_id)
        error(item.item_id,
              "NEG option missing lexicon_pattern_id: '" + o.surface_text + "'");
      if (o.polarity == Polarity::kPos && o.lexicon_pattern_id)
        error(item.item_id,
              "POS option carries lexicon_pattern_id: '" + o.surface_text + "'");
    }

    const int negated = count_negated(item);
    if (item.protocol_kind == ProtocolKind::kPositiveControl) {
      if (negated != 0)
        error(item.item_id, "control item contains negated option");
    } else {
      if (negated != 1)
        error(item.item_id, "expected exactly one negated option, found " +
                                std::to_string(negated));
      for (const auto& o : item.options)
        if (o.polarity == Polarity::kNeg &&
            o.concept_name != item.target_finding)
          error(item.item_id, "negated option concept '" + o.concept_name +
                                  "' differs from target_finding '" +
                                  item.target_finding + "'");
      // Duplicate same-concept positives make the counterpart non-unique in
      // retrospective audits; flagged but tolerated.
      std::set<std::string> pos_seen;
      for (const auto& o : item.options)
        if (o.polarity == Polarity::kPos && !pos_seen.insert(o.concept_name).second)
          warn(item.item_id,
               "duplicate positive concept '" + o.concept_name + "'");
    }
  }
  return report;
}

JoinResult join_predictions(std::span<const ProtocolItem> items,
                            std::span<const PredictionRecord> predictions) {
  JoinResult result;
  std::unordered_map<std::string, const ProtocolItem*> by_id;
  by_id.reserve(items.size());
  for (const auto& item : items) by_id.emplace(item.item_id, &item);

  std::unordered_map<std::string, const PredictionRecord*> pred_by_id;
  pred_by_id.reserve(predictions.size());
  for (const auto& pred : predictions) {
    if (!pred_by_id.emplace(pred.item_id, &pred).second)
      throw std::runtime_error("duplicate prediction for item_id '" +
                               pred.item_id + "'");
    auto it = by_id.find(pred.item_id);
    if (it == by_id.end()) {
      result.errors.push_back("orphan prediction: unknown item_id '" +
                              pred.item_id + "'");
      continue;
    }
    const auto& item = *it->second;
    if (pred.choice_index < 0 ||
        pred.choice_index >= static_cast<int>(item.options.size()))
      result.errors.push_back("choice_index out of range for item_id '" +
                              pred.item_id + "'");
    if (pred.option_logprobs &&
        pred.option_logprobs->size() != item.options.size())
      result.errors.push_back("option_logprobs length mismatch for item_id '" +
                              pred.item_id + "'");
  }

  result.pairs.reserve(items.size());
  for (const auto& item : items) {
    auto it = pred_by_id.find(item.item_id);
    if (it == pred_by_id.end())
      result.missing_prediction.push_back(item.item_id);
    else
      result.pairs.emplace_back(&item, it->second);
  }
  return result;
}

}  // namespace negaudit
