#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "negaudit/builder.hpp"
#include "negaudit/model.hpp"

namespace negaudit::fixtures {

// How a synthetic prediction behaves on one item, independent of layout.
enum class Behavior { kPickGold, kPickNegated, kPickOtherWrong };

// Resolves behaviors against the (possibly paraphrased or shuffled) layout:
// kPickNegated follows the negated option wherever it sits; kPickOtherWrong
// selects the first positive non-gold option.
std::vector<PredictionRecord> predictions_for(
    const std::vector<ProtocolItem>& items,
    const std::vector<Behavior>& behaviors);

// First `gold` items answer gold, next `negated` answer the negated option,
// next `other_wrong` answer a wrong positive option. Sums to items.size().
std::vector<Behavior> behavior_split(size_t gold, size_t negated,
                                     size_t other_wrong);

inline const std::vector<std::string>& finding_vocabulary() {
  static const std::vector<std::string> vocab = {
      "atelectasis", "cardiomegaly",     "consolidation",
      "edema",       "pleural effusion", "pneumothorax"};
  return vocab;
}

BuildConfig default_config();

// 116 studies sized so per-finding direct-presence instantiation yields
// exactly 235 records (115 studies x 2 present + 1 study x 5 present).
LabelTable direct_presence_table();

// 169 studies with 3 absent + 1 present finding each: 507 absence records.
LabelTable absence_table();

// Large-scale table: `pairs` studies with 2 present findings each, giving
// 2 * pairs direct-presence records.
LabelTable scale_table(int pairs);

// Retrospective presence audit: 197 items whose negated option has its
// positive counterpart as gold, 73 counterpart-free items, 126 ordinary
// items. Pair with behavior_retro_presence().
std::vector<ProtocolItem> retro_presence_items();
std::vector<Behavior> retro_presence_behaviors();

}  // namespace negaudit::fixtures
