#include "fixtures.hpp"

#include <cstdio>
#include <stdexcept>

namespace negaudit::fixtures {

namespace {

std::string padded(std::string_view prefix, int i) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%s%05d", std::string(prefix).c_str(), i);
  return buf;
}

AnswerOption pos_option(const std::string& concept_name) {
  AnswerOption o;
  o.surface_text = render_positive(concept_name);
  o.concept_name = concept_name;
  o.polarity = Polarity::kPos;
  return o;
}

AnswerOption neg_option(const std::string& concept_name) {
  const auto& pattern = paraphrase_pattern(ParaphraseVariant::kCanonicalNo);
  AnswerOption o;
  o.surface_text = render_negated(pattern, concept_name);
  o.concept_name = concept_name;
  o.polarity = Polarity::kNeg;
  o.lexicon_pattern_id = pattern.pattern_id;
  return o;
}

}  // namespace

BuildConfig default_config() {
  BuildConfig cfg;
  cfg.finding_vocabulary = finding_vocabulary();
  cfg.seed = 42;
  return cfg;
}

std::vector<PredictionRecord> predictions_for(
    const std::vector<ProtocolItem>& items,
    const std::vector<Behavior>& behaviors) {
  if (items.size() != behaviors.size())
    throw std::invalid_argument("behavior list must match item count");
  std::vector<PredictionRecord> preds;
  preds.reserve(items.size());
  for (size_t i = 0; i < items.size(); ++i) {
    const auto& item = items[i];
    PredictionRecord pred;
    pred.item_id = item.item_id;
    switch (behaviors[i]) {
      case Behavior::kPickGold:
        pred.choice_index = item.gold_index;
        break;
      case Behavior::kPickNegated: {
        int negated = -1;
        for (int k = 0; k < static_cast<int>(item.options.size()); ++k)
          if (item.options[k].polarity == Polarity::kNeg) negated = k;
        if (negated < 0)
          throw std::invalid_argument("no negated option in " + item.item_id);
        pred.choice_index = negated;
        break;
      }
      case Behavior::kPickOtherWrong: {
        int wrong = -1;
        for (int k = 0; k < static_cast<int>(item.options.size()); ++k)
          if (k != item.gold_index &&
              item.options[k].polarity == Polarity::kPos)
            wrong = wrong < 0 ? k : wrong;
        if (wrong < 0)
          throw std::invalid_argument("no wrong positive option in " +
                                      item.item_id);
        pred.choice_index = wrong;
        break;
      }
    }
    preds.push_back(std::move(pred));
  }
  return preds;
}

std::vector<Behavior> behavior_split(size_t gold, size_t negated,
                                     size_t other_wrong) {
  std::vector<Behavior> behaviors;
  behaviors.reserve(gold + negated + other_wrong);
  behaviors.insert(behaviors.end(), gold, Behavior::kPickGold);
  behaviors.insert(behaviors.end(), negated, Behavior::kPickNegated);
  behaviors.insert(behaviors.end(), other_wrong, Behavior::kPickOtherWrong);
  return behaviors;
}

LabelTable direct_presence_table() {
  const auto& vocab = finding_vocabulary();
  LabelTable table;
  for (int i = 0; i < 115; ++i) {
    LabelRow row;
    row.study_id = padded("dpstudy", i);
    row.image_refs = {"img://" + row.study_id + "/view1"};
    for (int f = 0; f < 6; ++f) {
      const auto& finding = vocab[(i + f) % 6];
      if (f < 2)
        row.labels[finding] = FindingLabel::kPresent;
      else if (f < 4)
        row.labels[finding] = FindingLabel::kAbsent;
      else if (f == 4)
        row.labels[finding] = FindingLabel::kUncertain;
      // f == 5 left unmentioned
    }
    table.rows.push_back(std::move(row));
  }
  // One five-finding study tops the count up to 235 records.
  LabelRow big;
  big.study_id = padded("dpstudy", 115);
  big.image_refs = {"img://" + big.study_id + "/view1"};
  for (int f = 0; f < 5; ++f) big.labels[vocab[f]] = FindingLabel::kPresent;
  big.labels[vocab[5]] = FindingLabel::kAbsent;
  table.rows.push_back(std::move(big));
  return table;
}

LabelTable absence_table() {
  const auto& vocab = finding_vocabulary();
  LabelTable table;
  for (int i = 0; i < 169; ++i) {
    LabelRow row;
    row.study_id = padded("abstudy", i);
    row.image_refs = {"img://" + row.study_id + "/view1"};
    for (int f = 0; f < 6; ++f) {
      const auto& finding = vocab[(i + f) % 6];
      if (f < 3)
        row.labels[finding] = FindingLabel::kAbsent;
      else if (f == 3)
        row.labels[finding] = FindingLabel::kPresent;
      else if (f == 4)
        row.labels[finding] = FindingLabel::kUncertain;
      // f == 5 left unmentioned
    }
    table.rows.push_back(std::move(row));
  }
  return table;
}

LabelTable scale_table(int pairs) {
  const auto& vocab = finding_vocabulary();
  LabelTable table;
  table.rows.reserve(pairs);
  for (int i = 0; i < pairs; ++i) {
    LabelRow row;
    row.study_id = padded("scale", i);
    row.image_refs = {"img://" + row.study_id};
    row.labels[vocab[i % 6]] = FindingLabel::kPresent;
    row.labels[vocab[(i + 1) % 6]] = FindingLabel::kPresent;
    table.rows.push_back(std::move(row));
  }
  return table;
}

std::vector<ProtocolItem> retro_presence_items() {
  const auto& vocab = finding_vocabulary();
  std::vector<ProtocolItem> items;
  items.reserve(396);
  auto base_item = [&](int i) {
    ProtocolItem item;
    item.item_id = padded("rp", i);
    item.study_id = padded("rpstudy", i);
    item.image_refs = {"img://" + item.study_id};
    item.question = std::string(kPresenceQuestion);
    item.protocol_kind = ProtocolKind::kRetroPresence;
    item.gold_index = 0;
    item.variant_tag = "canonical_no";
    return item;
  };

  // 197 repairable: the negated option's positive counterpart is gold.
  for (int i = 0; i < 197; ++i) {
    ProtocolItem item = base_item(i);
    const auto& target = vocab[i % 6];
    const auto& distractor = vocab[(i + 1) % 6];
    item.options = {pos_option(target), neg_option(target),
                    pos_option(distractor)};
    item.target_finding = target;
    items.push_back(std::move(item));
  }
  // 73 counterpart-free: "No X" present, but no positive X anywhere.
  for (int i = 197; i < 270; ++i) {
    ProtocolItem item = base_item(i);
    const auto& negated_concept = vocab[i % 6];
    const auto& gold = vocab[(i + 1) % 6];
    const auto& distractor = vocab[(i + 2) % 6];
    item.options = {pos_option(gold), neg_option(negated_concept),
                    pos_option(distractor)};
    item.target_finding = negated_concept;
    items.push_back(std::move(item));
  }
  // 126 ordinary repairable-layout items for the correct and off-target slots.
  for (int i = 270; i < 396; ++i) {
    ProtocolItem item = base_item(i);
    const auto& target = vocab[i % 6];
    const auto& distractor = vocab[(i + 1) % 6];
    item.options = {pos_option(target), neg_option(target),
                    pos_option(distractor)};
    item.target_finding = target;
    items.push_back(std::move(item));
  }
  return items;
}

std::vector<Behavior> retro_presence_behaviors() {
  std::vector<Behavior> behaviors;
  behaviors.reserve(396);
  behaviors.insert(behaviors.end(), 270, Behavior::kPickNegated);
  behaviors.insert(behaviors.end(), 117, Behavior::kPickGold);
  behaviors.insert(behaviors.end(), 9, Behavior::kPickOtherWrong);
  return behaviors;
}

}  // namespace negaudit::fixtures
