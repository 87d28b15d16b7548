#include "negaudit/verifier.hpp"

#include <stdexcept>

namespace negaudit {

std::string_view to_string(SlotMode m) {
  return m == SlotMode::kSlot0 ? "SLOT0" : "SLOT_AGNOSTIC";
}

SlotMode slot_mode_from_string(std::string_view s) {
  if (s == "SLOT0" || s == "slot0") return SlotMode::kSlot0;
  if (s == "SLOT_AGNOSTIC" || s == "slot_agnostic")
    return SlotMode::kSlotAgnostic;
  throw std::invalid_argument("unknown slot mode: " + std::string(s));
}

namespace {

VerifiedPrediction pass_through(const ProtocolItem& item, int base,
                                VerifyReason reason) {
  return {item.item_id, base, base, false, reason};
}

}  // namespace

VerifiedPrediction qccv_verify(const ProtocolItem& item,
                               const PredictionRecord& pred,
                               const VerifierConfig& cfg) {
  const int base = pred.choice_index;
  if (base < 0 || base >= static_cast<int>(item.options.size()))
    throw std::invalid_argument("choice_index out of range for item " +
                                item.item_id);

  // The verifier works on the surface forms as the configured lexicon reads
  // them, not on the polarity recorded at build time. Coverage therefore
  // tracks exactly what the lexicon can parse.
  std::vector<AnswerOption> parsed;
  parsed.reserve(item.options.size());
  for (const auto& o : item.options)
    parsed.push_back(parse_option(o.surface_text, cfg.lexicon));

  int negated = -1;
  for (int i = 0; i < static_cast<int>(parsed.size()); ++i) {
    if (parsed[i].polarity == Polarity::kNeg) {
      if (negated >= 0)
        return pass_through(item, base, VerifyReason::kAmbiguousOptions);
      negated = i;
    }
  }
  if (negated < 0)
    return pass_through(item, base, VerifyReason::kAmbiguousOptions);

  if (base != negated)
    return pass_through(item, base, VerifyReason::kNotNegatedPrediction);

  const PolarityClass polarity = classify_question(item.question, cfg.lexicon);
  if (polarity == PolarityClass::kUnknown)
    return pass_through(item, base, VerifyReason::kNoNegationCue);

  if (polarity == PolarityClass::kAbsence) {
    if (cfg.slot_mode == SlotMode::kSlot0) {
      // Designated positive target slot. If the negated option itself sits
      // there, no deterministic remap exists.
      if (negated == 0)
        return pass_through(item, base, VerifyReason::kNoCounterpart);
      return {item.item_id, base, 0, true, VerifyReason::kRepairedAbsence};
    }
    auto target = find_positive_counterpart(parsed, negated);
    if (!target)
      return pass_through(item, base, VerifyReason::kNoCounterpart);
    return {item.item_id, base, *target, true, VerifyReason::kRepairedAbsence};
  }

  auto target = find_positive_counterpart(parsed, negated);
  if (!target)
    return pass_through(item, base, VerifyReason::kNoCounterpart);
  return {item.item_id, base, *target, true, VerifyReason::kRepairedPresence};
}

VerifiedPrediction y0_fallback(const ProtocolItem& item,
                               const PredictionRecord& pred,
                               const VerifierConfig& cfg, std::string* warning) {
  const int base = pred.choice_index;
  if (!cfg.y0_enabled)
    return pass_through(item, base, VerifyReason::kPassThrough);
  if (!pred.base_confidence || !pred.packet_choice_index ||
      !pred.packet_confidence) {
    if (warning)
      *warning = "y0: missing confidence fields for item " + item.item_id;
    return pass_through(item, base, VerifyReason::kPassThrough);
  }
  const int packet = *pred.packet_choice_index;
  if (packet < 0 || packet >= static_cast<int>(item.options.size())) {
    if (warning)
      *warning = "y0: packet_choice_index out of range for item " + item.item_id;
    return pass_through(item, base, VerifyReason::kPassThrough);
  }
  if (*pred.base_confidence < cfg.y0_confidence_ceiling &&
      *pred.packet_confidence >= *pred.base_confidence + cfg.y0_margin)
    return {item.item_id, base, packet, true, VerifyReason::kY0Replaced};
  return pass_through(item, base, VerifyReason::kPassThrough);
}

BatchVerifyResult batch_verify(std::span<const ProtocolItem> items,
                               std::span<const PredictionRecord> predictions,
                               const VerifierConfig& cfg) {
  const JoinResult join = join_predictions(items, predictions);
  if (!join.ok()) {
    std::string msg = "batch_verify: join failed:";
    for (const auto& e : join.errors) msg += "\n  " + e;
    throw std::runtime_error(msg);
  }

  BatchVerifyResult result;
  result.verified.reserve(join.pairs.size());
  result.summary.n = static_cast<int>(join.pairs.size());

  for (const auto& [item, pred] : join.pairs) {
    PredictionRecord working = *pred;
    VerifiedPrediction y0{};
    if (cfg.y0_enabled) {
      std::string warning;
      y0 = y0_fallback(*item, *pred, cfg, &warning);
      if (!warning.empty()) result.summary.warnings.push_back(warning);
      if (y0.triggered) working.choice_index = y0.final_index;
    }

    VerifiedPrediction v = qccv_verify(*item, working, cfg);
    v.base_index = pred->choice_index;
    if (!v.triggered && cfg.y0_enabled && y0.triggered) {
      v.final_index = y0.final_index;
      v.triggered = true;
      v.reason = VerifyReason::kY0Replaced;
    }

    if (v.reason == VerifyReason::kRepairedAbsence ||
        v.reason == VerifyReason::kRepairedPresence) {
      const auto chosen =
          parse_option(item->options[working.choice_index].surface_text,
                       cfg.lexicon);
      if (chosen.lexicon_pattern_id)
        ++result.summary.repairs_by_pattern[*chosen.lexicon_pattern_id];
    }

    if (v.triggered) ++result.summary.triggered;
    ++result.summary.reason_counts[v.reason];
    result.verified.push_back(std::move(v));
  }
  return result;
}

}  // namespace negaudit
