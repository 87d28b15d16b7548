#pragma once

#include <map>
#include <span>
#include <string>
#include <vector>

#include "negaudit/lexicon.hpp"
#include "negaudit/model.hpp"

namespace negaudit {

enum class SlotMode { kSlot0, kSlotAgnostic };

std::string_view to_string(SlotMode m);
SlotMode slot_mode_from_string(std::string_view s);

struct VerifierConfig {
  NegationLexicon lexicon = extended_lexicon();
  SlotMode slot_mode = SlotMode::kSlot0;
  bool y0_enabled = false;
  double y0_confidence_ceiling = 0.80;
  double y0_margin = 0.03;
};

// The deterministic four-condition verifier. In order:
//   (1) exactly one option parses NEG under the configured lexicon,
//   (2) the prediction selects that option,
//   (3) question polarity classifies as absence or presence (not UNKNOWN),
//   (4) a remap target exists without concept ambiguity.
// Absence-side remapping goes to slot 0 (kSlot0, provided slot 0 is not the
// negated option itself) or to the unique same-concept positive option
// (kSlotAgnostic). Presence-side remapping always resolves the unique
// positive counterpart. Any failed condition is an explicit pass-through;
// no model call ever occurs.
VerifiedPrediction qccv_verify(const ProtocolItem& item,
                               const PredictionRecord& pred,
                               const VerifierConfig& cfg);

// Confidence-threshold fallback ablation: replaces the base choice with the
// packet choice iff base confidence < ceiling and packet confidence exceeds
// it by at least the margin. No polarity logic. Missing confidence fields
// pass through with a warning rather than a guess.
VerifiedPrediction y0_fallback(const ProtocolItem& item,
                               const PredictionRecord& pred,
                               const VerifierConfig& cfg,
                               std::string* warning = nullptr);

struct TriggerSummary {
  int n = 0;
  int triggered = 0;
  std::map<VerifyReason, int> reason_counts;
  std::map<std::string, int> repairs_by_pattern;  // negation pattern id -> repairs
  std::vector<std::string> warnings;

  double coverage_pct() const { return n == 0 ? 0.0 : 100.0 * triggered / n; }
};

struct BatchVerifyResult {
  std::vector<VerifiedPrediction> verified;  // protocol order
  TriggerSummary summary;
};

// Verifies every (item, prediction) pair. When Y0 is enabled it runs first
// and the polarity verifier then sees the replaced choice, so polarity repair
// has the last word. Throws std::runtime_error on join errors.
BatchVerifyResult batch_verify(std::span<const ProtocolItem> items,
                               std::span<const PredictionRecord> predictions,
                               const VerifierConfig& cfg);

}  // namespace negaudit
