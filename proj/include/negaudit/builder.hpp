#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "negaudit/lexicon.hpp"
#include "negaudit/model.hpp"

namespace negaudit {

enum class FindingLabel { kPresent, kAbsent, kUncertain, kUnmentioned };

std::string_view to_string(FindingLabel v);
FindingLabel finding_label_from_string(std::string_view s);

struct LabelRow {
  std::string study_id;
  std::vector<std::string> image_refs;
  std::map<std::string, FindingLabel> labels;
};

// Study-level finding labels, one row per study after view grouping.
struct LabelTable {
  std::vector<LabelRow> rows;
};

enum class DistractorRule { kFirstInVocabOrder };

struct BuildConfig {
  std::vector<std::string> finding_vocabulary;  // declared order breaks ties
  DistractorRule distractor_rule = DistractorRule::kFirstInVocabOrder;
  std::uint64_t seed = 42;  // shuffle transform only
};

inline constexpr std::string_view kPresenceQuestion =
    "Which of the following findings is present on this chest X-ray study?";
inline constexpr std::string_view kAbsenceQuestion =
    "Which of the following findings is absent on this chest X-ray study?";

// Fixed three-option layout for constructed protocols: gold concept at
// slot 0, its negated form at slot 1, the distractor at slot 2.

// One record per (study, finding) with the finding cleanly present and at
// least one different present distractor. Output sorted by
// (study_id, target_finding); byte-deterministic given (table, cfg).
std::vector<ProtocolItem> build_direct_presence(const LabelTable& table,
                                                const BuildConfig& cfg);

// One record per (study, finding) with the finding cleanly absent and at
// least one present distractor. Gold is the concept name itself at slot 0.
std::vector<ProtocolItem> build_report_absence(const LabelTable& table,
                                               const BuildConfig& cfg);

// Paired positive-only control: for each direct-presence item whose study has
// at least two cleanly absent findings, the same question over
// [target, absent1, absent2] with no negated wording anywhere.
std::vector<ProtocolItem> build_positive_control(
    const LabelTable& table, const std::vector<ProtocolItem>& direct_items,
    const BuildConfig& cfg);

enum class ParaphraseVariant {
  kCanonicalNo,
  kAbsenceOf,
  kNotPresent,
  kNoEvidenceOf,
  kClearOf,
};

std::string_view to_string(ParaphraseVariant v);
ParaphraseVariant paraphrase_variant_from_string(std::string_view s);
const NegationPattern& paraphrase_pattern(ParaphraseVariant v);

// Re-renders each item's unique negated option through the variant template.
// Concept, polarity, and gold index are untouched; only the surface wording
// and variant_tag change. Throws on items without a negated option.
std::vector<ProtocolItem> apply_paraphrase(std::span<const ProtocolItem> items,
                                           ParaphraseVariant variant);

// Per-item option permutation keyed on (seed, item_id); gold_index follows
// its option. The original slot of every position is recorded in variant_tag.
std::vector<ProtocolItem> shuffle_layout(std::span<const ProtocolItem> items,
                                         std::uint64_t seed);

struct BuildReport {
  int n_records = 0;
  int n_studies = 0;       // distinct studies in the output
  double records_per_study = 0.0;
  std::map<std::string, int> per_finding;         // target finding -> records
  std::map<std::string, int> records_per_kind;    // protocol kind -> records
};

BuildReport summarize_build(std::span<const ProtocolItem> items);

}  // namespace negaudit
