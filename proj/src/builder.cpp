#include "negaudit/builder.hpp"

#include <algorithm>
#include <set>
#include <stdexcept>
#include <unordered_map>
#include <unordered_set>

#include "negaudit/rng.hpp"

namespace negaudit {

std::string_view to_string(FindingLabel v) {
  switch (v) {
    case FindingLabel::kPresent: return "PRESENT";
    case FindingLabel::kAbsent: return "ABSENT";
    case FindingLabel::kUncertain: return "UNCERTAIN";
    case FindingLabel::kUnmentioned: return "UNMENTIONED";
  }
  return "?";
}

FindingLabel finding_label_from_string(std::string_view s) {
  if (s == "PRESENT") return FindingLabel::kPresent;
  if (s == "ABSENT") return FindingLabel::kAbsent;
  if (s == "UNCERTAIN") return FindingLabel::kUncertain;
  if (s == "UNMENTIONED") return FindingLabel::kUnmentioned;
  throw std::invalid_argument("unknown finding label: " + std::string(s));
}

std::string_view to_string(ParaphraseVariant v) {
  switch (v) {
    case ParaphraseVariant::kCanonicalNo: return "canonical_no";
    case ParaphraseVariant::kAbsenceOf: return "absence_of";
    case ParaphraseVariant::kNotPresent: return "not_present";
    case ParaphraseVariant::kNoEvidenceOf: return "no_evidence_of";
    case ParaphraseVariant::kClearOf: return "clear_of";
  }
  return "?";
}

ParaphraseVariant paraphrase_variant_from_string(std::string_view s) {
  if (s == "canonical_no") return ParaphraseVariant::kCanonicalNo;
  if (s == "absence_of") return ParaphraseVariant::kAbsenceOf;
  if (s == "not_present") return ParaphraseVariant::kNotPresent;
  if (s == "no_evidence_of") return ParaphraseVariant::kNoEvidenceOf;
  if (s == "clear_of") return ParaphraseVariant::kClearOf;
  throw std::invalid_argument("unknown paraphrase variant: " + std::string(s));
}

const NegationPattern& paraphrase_pattern(ParaphraseVariant v) {
  // Variant names equal the extended-lexicon pattern ids, so a paraphrased
  // surface always parses back to its own pattern.
  static const std::map<ParaphraseVariant, NegationPattern> table = {
      {ParaphraseVariant::kCanonicalNo, {"canonical_no", "no {X}"}},
      {ParaphraseVariant::kAbsenceOf, {"absence_of", "absence of {X}"}},
      {ParaphraseVariant::kNotPresent, {"not_present", "{X} is not present"}},
      {ParaphraseVariant::kNoEvidenceOf,
       {"no_evidence_of", "no evidence of {X}"}},
      {ParaphraseVariant::kClearOf, {"clear_of", "clear of {X}"}},
  };
  return table.at(v);
}

namespace {

std::string slug(std::string_view concept_name) {
  std::string out(concept_name);
  std::replace(out.begin(), out.end(), ' ', '_');
  return out;
}

void check_table(const LabelTable& table, const BuildConfig& cfg) {
  if (cfg.finding_vocabulary.empty())
    throw std::invalid_argument("finding vocabulary is empty");
  std::unordered_set<std::string> vocab(cfg.finding_vocabulary.begin(),
                                        cfg.finding_vocabulary.end());
  std::unordered_set<std::string> studies;
  for (const auto& row : table.rows) {
    if (!studies.insert(row.study_id).second)
      throw std::invalid_argument("duplicate study_id in label table: " +
                                  row.study_id);
    for (const auto& [finding, _] : row.labels)
      if (!vocab.count(finding))
        throw std::invalid_argument("finding '" + finding +
                                    "' not in declared vocabulary (study " +
                                    row.study_id + ")");
  }
}

FindingLabel label_of(const LabelRow& row, const std::string& finding) {
  auto it = row.labels.find(finding);
  return it == row.labels.end() ? FindingLabel::kUnmentioned : it->second;
}

// First vocabulary entry with the wanted label, skipping `exclude`.
std::optional<std::string> first_with_label(const LabelRow& row,
                                            const BuildConfig& cfg,
                                            FindingLabel wanted,
                                            const std::string& exclude) {
  for (const auto& finding : cfg.finding_vocabulary) {
    if (finding == exclude) continue;
    if (label_of(row, finding) == wanted) return finding;
  }
  return std::nullopt;
}

AnswerOption positive_option(const std::string& concept_name) {
  AnswerOption o;
  o.surface_text = render_positive(concept_name);
  o.concept_name = concept_name;
  o.polarity = Polarity::kPos;
  return o;
}

AnswerOption negated_option(const std::string& concept_name) {
  const auto& pattern = paraphrase_pattern(ParaphraseVariant::kCanonicalNo);
  AnswerOption o;
  o.surface_text = render_negated(pattern, concept_name);
  o.concept_name = concept_name;
  o.polarity = Polarity::kNeg;
  o.lexicon_pattern_id = pattern.pattern_id;
  return o;
}

void sort_output(std::vector<ProtocolItem>& items) {
  std::sort(items.begin(), items.end(), [](const auto& a, const auto& b) {
    return std::tie(a.study_id, a.target_finding) <
           std::tie(b.study_id, b.target_finding);
  });
}

std::vector<ProtocolItem> build_contrastive(const LabelTable& table,
                                            const BuildConfig& cfg,
                                            FindingLabel target_label,
                                            ProtocolKind kind,
                                            std::string_view id_prefix,
                                            std::string_view question) {
  check_table(table, cfg);
  std::vector<ProtocolItem> items;
  for (const auto& row : table.rows) {
    for (const auto& target : cfg.finding_vocabulary) {
      if (label_of(row, target) != target_label) continue;
      auto distractor =
          first_with_label(row, cfg, FindingLabel::kPresent, target);
      if (!distractor) continue;
      ProtocolItem item;
      item.item_id =
          std::string(id_prefix) + "__" + row.study_id + "__" + slug(target);
      item.study_id = row.study_id;
      item.image_refs = row.image_refs;
      item.question = std::string(question);
      item.options = {positive_option(target), negated_option(target),
                      positive_option(*distractor)};
      item.gold_index = 0;
      item.protocol_kind = kind;
      item.target_finding = target;
      item.variant_tag = "canonical_no";
      items.push_back(std::move(item));
    }
  }
  sort_output(items);
  return items;
}

}  // namespace

std::vector<ProtocolItem> build_direct_presence(const LabelTable& table,
                                                const BuildConfig& cfg) {
  return build_contrastive(table, cfg, FindingLabel::kPresent,
                           ProtocolKind::kDirectPresence, "dp",
                           kPresenceQuestion);
}

std::vector<ProtocolItem> build_report_absence(const LabelTable& table,
                                               const BuildConfig& cfg) {
  return build_contrastive(table, cfg, FindingLabel::kAbsent,
                           ProtocolKind::kReportAbsence, "ab",
                           kAbsenceQuestion);
}

std::vector<ProtocolItem> build_positive_control(
    const LabelTable& table, const std::vector<ProtocolItem>& direct_items,
    const BuildConfig& cfg) {
  check_table(table, cfg);
  std::unordered_map<std::string, const LabelRow*> rows;
  for (const auto& row : table.rows) rows.emplace(row.study_id, &row);

  std::vector<ProtocolItem> items;
  for (const auto& direct : direct_items) {
    auto it = rows.find(direct.study_id);
    if (it == rows.end())
      throw std::invalid_argument("direct item study not in table: " +
                                  direct.study_id);
    const LabelRow& row = *it->second;
    std::vector<std::string> absent;
    for (const auto& finding : cfg.finding_vocabulary)
      if (label_of(row, finding) == FindingLabel::kAbsent)
        absent.push_back(finding);
    if (absent.size() < 2) continue;

    ProtocolItem item;
    item.item_id = "pc__" + direct.study_id + "__" + slug(direct.target_finding);
    item.study_id = direct.study_id;
    item.image_refs = direct.image_refs;
    item.question = direct.question;
    item.options = {positive_option(direct.target_finding),
                    positive_option(absent[0]), positive_option(absent[1])};
    item.gold_index = 0;
    item.protocol_kind = ProtocolKind::kPositiveControl;
    item.target_finding = direct.target_finding;
    item.variant_tag = "paired=" + direct.item_id;
    items.push_back(std::move(item));
  }
  sort_output(items);
  return items;
}

std::vector<ProtocolItem> apply_paraphrase(std::span<const ProtocolItem> items,
                                           ParaphraseVariant variant) {
  const auto& pattern = paraphrase_pattern(variant);
  std::vector<ProtocolItem> out(items.begin(), items.end());
  for (auto& item : out) {
    int negated = -1;
    for (int i = 0; i < static_cast<int>(item.options.size()); ++i) {
      if (item.options[i].polarity == Polarity::kNeg) {
        if (negated >= 0)
          throw std::invalid_argument("item has several negated options: " +
                                      item.item_id);
        negated = i;
      }
    }
    if (negated < 0)
      throw std::invalid_argument(
          "paraphrase requires a negated option, none in item: " +
          item.item_id);
    auto& option = item.options[negated];
    option.surface_text = render_negated(pattern, option.concept_name);
    option.lexicon_pattern_id = pattern.pattern_id;
    // The leading token of variant_tag is the paraphrase name; transforms
    // appended after '+' are preserved.
    const size_t plus = item.variant_tag.find('+');
    const std::string rest =
        plus == std::string::npos ? "" : item.variant_tag.substr(plus);
    item.variant_tag = std::string(to_string(variant)) + rest;
  }
  return out;
}

std::vector<ProtocolItem> shuffle_layout(std::span<const ProtocolItem> items,
                                         std::uint64_t seed) {
  std::vector<ProtocolItem> out(items.begin(), items.end());
  for (auto& item : out) {
    const size_t k = item.options.size();
    SplitMix64 rng(mix_seed(seed, fnv1a64(item.item_id)));
    // perm[i] = original slot now shown at position i.
    std::vector<int> perm(k);
    for (size_t i = 0; i < k; ++i) perm[i] = static_cast<int>(i);
    for (size_t i = k - 1; i > 0; --i)
      std::swap(perm[i], perm[rng.below(i + 1)]);

    std::vector<AnswerOption> shuffled(k);
    int new_gold = -1;
    for (size_t i = 0; i < k; ++i) {
      shuffled[i] = item.options[perm[i]];
      if (perm[i] == item.gold_index) new_gold = static_cast<int>(i);
    }
    item.options = std::move(shuffled);
    item.gold_index = new_gold;

    std::string slots;
    for (size_t i = 0; i < k; ++i) {
      if (i) slots += ',';
      slots += std::to_string(perm[i]);
    }
    item.variant_tag +=
        "+shuffled_seed" + std::to_string(seed) + ":orig=" + slots;
  }
  return out;
}

BuildReport summarize_build(std::span<const ProtocolItem> items) {
  BuildReport report;
  std::set<std::string> studies;
  for (const auto& item : items) {
    ++report.n_records;
    studies.insert(item.study_id);
    ++report.per_finding[item.target_finding];
    ++report.records_per_kind[std::string(to_string(item.protocol_kind))];
  }
  report.n_studies = static_cast<int>(studies.size());
  report.records_per_study =
      report.n_studies == 0
          ? 0.0
          : static_cast<double>(report.n_records) / report.n_studies;
  return report;
}

}  // namespace negaudit
