#pragma once

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <nlohmann/json_fwd.hpp>

namespace negaudit {

enum class Polarity { kPos, kNeg };

enum class ProtocolKind {
  kDirectPresence,
  kReportAbsence,
  kPositiveControl,
  kRetroPresence,
  kRetroAbsence,
};

std::string_view to_string(Polarity p);
std::string_view to_string(ProtocolKind k);
Polarity polarity_from_string(std::string_view s);
ProtocolKind protocol_kind_from_string(std::string_view s);

// One answer choice: surface wording plus its canonical concept and polarity.
// A NEG option always records which lexicon pattern produced (or parsed) it.
struct AnswerOption {
  std::string surface_text;
  std::string concept_name;  // canonical lowercase finding name
  Polarity polarity = Polarity::kPos;
  std::optional<std::string> lexicon_pattern_id;

  bool operator==(const AnswerOption&) const = default;
};

// One benchmark record. image_refs are opaque identifiers; nothing in this
// toolkit ever opens them.
struct ProtocolItem {
  std::string item_id;
  std::string study_id;
  std::vector<std::string> image_refs;
  std::string question;
  std::vector<AnswerOption> options;  // length >= 3
  int gold_index = 0;
  ProtocolKind protocol_kind = ProtocolKind::kDirectPresence;
  std::string target_finding;
  std::string variant_tag;
  std::string extra_fields;  // unknown input JSON fields, echoed on write

  bool operator==(const ProtocolItem&) const = default;
};

// One recorded model output. Confidence and packet fields only matter to the
// Y0 fallback; option_logprobs only to the log-probability gap statistic.
struct PredictionRecord {
  std::string item_id;
  int choice_index = 0;
  std::optional<double> base_confidence;
  std::optional<int> packet_choice_index;
  std::optional<double> packet_confidence;
  std::optional<std::vector<double>> option_logprobs;
  std::string extra_fields;

  bool operator==(const PredictionRecord&) const = default;
};

enum class VerifyReason {
  kNotNegatedPrediction,
  kNoNegationCue,
  kAmbiguousOptions,
  kNoCounterpart,
  kRepairedAbsence,
  kRepairedPresence,
  kY0Replaced,
  kPassThrough,
};

std::string_view to_string(VerifyReason r);
VerifyReason verify_reason_from_string(std::string_view s);

inline bool is_trigger_reason(VerifyReason r) {
  return r == VerifyReason::kRepairedAbsence ||
         r == VerifyReason::kRepairedPresence || r == VerifyReason::kY0Replaced;
}

struct VerifiedPrediction {
  std::string item_id;
  int base_index = 0;
  int final_index = 0;
  bool triggered = false;
  VerifyReason reason = VerifyReason::kPassThrough;

  bool operator==(const VerifiedPrediction&) const = default;
};

struct Violation {
  std::string item_id;
  std::string message;
};

struct ValidationReport {
  std::vector<Violation> errors;
  std::vector<Violation> warnings;

  bool ok() const { return errors.empty(); }
};

// Checks every structural invariant of a protocol file: index ranges, id
// uniqueness, and the per-kind negated-option count (controls carry none,
// everything else exactly one, with concept equal to the target finding).
// Pure; never mutates input.
ValidationReport validate_protocol(std::span<const ProtocolItem> items);

struct JoinResult {
  // One pair per item with a prediction, in protocol-file order.
  std::vector<std::pair<const ProtocolItem*, const PredictionRecord*>> pairs;
  std::vector<std::string> missing_prediction;  // item ids lacking predictions
  std::vector<std::string> errors;  // orphan ids, out-of-range choices

  bool ok() const { return errors.empty(); }
};

// Pairs predictions with their items. A duplicated prediction id is a hard
// error (throws); orphans and out-of-range choices are collected as errors.
JoinResult join_predictions(std::span<const ProtocolItem> items,
                            std::span<const PredictionRecord> predictions);

// Presentation rounding used everywhere a percentage is reported:
// two decimals, half-up. Comparisons on counts stay exact integers.
double round_pct(double pct);
std::string format_pct(double pct);  // "31.49"; "null" when not finite

}  // namespace negaudit
