#include <doctest.h>

#include <cmath>

#include "negaudit/builder.hpp"
#include "negaudit/simulator.hpp"

using namespace negaudit;

namespace {

// The worked three-option example: concept x supported at 5.0 with residuals
// 0.3/1.2, distractor z at 3.0 with residual 0.8. Option scores 5.3/6.2/3.8.
ScoreModel toy_model() {
  ScoreModel model;
  model.concept_support["edema"] = 5.0;
  model.polarity_residual["edema"] = {0.3, 1.2};
  model.concept_support["fracture"] = 3.0;
  model.polarity_residual["fracture"] = {0.8, 0.0};
  return model;
}

ProtocolItem toy_item() {
  const auto& ext = extended_lexicon();
  ProtocolItem item;
  item.item_id = "toy";
  item.study_id = "toystudy";
  item.image_refs = {"img://toy"};
  item.question = std::string(kPresenceQuestion);
  item.options = {parse_option("Edema", ext), parse_option("No edema", ext),
                  parse_option("Fracture", ext)};
  item.gold_index = 0;
  item.protocol_kind = ProtocolKind::kDirectPresence;
  item.target_finding = "edema";
  item.variant_tag = "canonical_no";
  return item;
}

}  // namespace

TEST_CASE("the toy decomposition scores 5.3 / 6.2 / 3.8 and predicts NEG") {
  const ScoreModel model = toy_model();
  const ProtocolItem item = toy_item();
  CHECK(score_option(model, item.options[0]) == doctest::Approx(5.3));
  CHECK(score_option(model, item.options[1]) == doctest::Approx(6.2));
  CHECK(score_option(model, item.options[2]) == doctest::Approx(3.8));
  CHECK(predict(model, item) == 1);
}

TEST_CASE("ties break to the lowest index") {
  ScoreModel model = toy_model();
  model.polarity_residual["edema"] = {0.3, 0.3};  // pair tied at 5.3
  CHECK(predict(model, toy_item()) == 0);
}

TEST_CASE("a dominant distractor wins") {
  ScoreModel model = toy_model();
  model.concept_support["fracture"] = 10.0;
  CHECK(predict(model, toy_item()) == 2);
}

TEST_CASE("missing entries are hard errors naming the concept") {
  const ScoreModel model = toy_model();
  AnswerOption unknown;
  unknown.surface_text = "Cardiomegaly";
  unknown.concept_name = "cardiomegaly";
  unknown.polarity = Polarity::kPos;
  CHECK_THROWS_WITH_AS(score_option(model, unknown),
                       doctest::Contains("cardiomegaly"), std::out_of_range);
}

TEST_CASE("score_option is exactly additive") {
  const ScoreModel model = toy_model();
  const ProtocolItem item = toy_item();
  for (const auto& o : item.options) {
    const double s = score_option(model, o);
    const double v = model.residual(o.concept_name, o.polarity);
    CHECK(s - v == doctest::Approx(model.support(o.concept_name))
                       .epsilon(1e-12));
  }
}

TEST_CASE("proposition 1 on the worked example and its broken variants") {
  const ProtocolItem item = toy_item();

  const Prop1Result toy = check_proposition_1(toy_model(), item);
  CHECK(toy.assumptions_hold);
  CHECK(toy.conclusion_holds);

  ScoreModel reversed = toy_model();
  reversed.polarity_residual["edema"] = {1.2, 0.3};  // positive residual wins
  const Prop1Result rev = check_proposition_1(reversed, item);
  CHECK_FALSE(rev.assumptions_hold);

  ScoreModel dominant = toy_model();
  dominant.concept_support["fracture"] = 10.0;
  CHECK_FALSE(check_proposition_1(dominant, item).assumptions_hold);
}

TEST_CASE("proposition 2 biconditional on all three regimes") {
  const ProtocolItem item = toy_item();
  CHECK(check_proposition_2(toy_model(), item));  // NEG branch

  ScoreModel dominant = toy_model();
  dominant.concept_support["fracture"] = 10.0;
  CHECK(check_proposition_2(dominant, item));  // both sides false

  ScoreModel counterpart_wins = toy_model();
  counterpart_wins.polarity_residual["edema"] = {1.2, 0.3};
  CHECK(check_proposition_2(counterpart_wins, item));  // both sides false
}

TEST_CASE("proposition preconditions are enforced") {
  ScoreModel model = toy_model();
  ProtocolItem item = toy_item();
  item.gold_index = 2;  // gold is not the counterpart
  CHECK_THROWS_AS(check_proposition_1(model, item), std::invalid_argument);
}

TEST_CASE("generation is deterministic") {
  const SimRanges ranges;
  const auto a = generate_instances(7, 3, ranges);
  const auto b = generate_instances(7, 3, ranges);
  REQUIRE(a.size() == 3);
  for (size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].item == b[i].item);
    CHECK(a[i].prediction == b[i].prediction);
  }
}

TEST_CASE("generated instances satisfy the gold-counterpart contract") {
  const auto instances = generate_instances(11, 200, SimRanges{});
  for (const auto& inst : instances) {
    REQUIRE(inst.item.options.size() >= 3);
    REQUIRE(inst.item.options.size() <= 5);
    int negated = -1;
    for (int i = 0; i < static_cast<int>(inst.item.options.size()); ++i)
      if (inst.item.options[i].polarity == Polarity::kNeg) negated = i;
    REQUIRE(negated >= 0);
    const auto counterpart =
        find_positive_counterpart(inst.item.options, negated);
    REQUIRE(counterpart.has_value());
    CHECK(*counterpart == inst.item.gold_index);
    CHECK(*counterpart < negated);  // positive pair member placed first
    REQUIRE(inst.prediction.option_logprobs.has_value());
    CHECK(inst.prediction.option_logprobs->size() ==
          inst.item.options.size());
  }
  CHECK(validate_protocol([&] {
          std::vector<ProtocolItem> items;
          for (const auto& inst : instances) items.push_back(inst.item);
          return items;
        }())
            .ok());
}

TEST_CASE("an overwhelming negative residual flips every instance") {
  SimRanges ranges;
  ranges.u_min = 0.0;
  ranges.u_max = 1.0;
  ranges.v_pos_min = 0.0;
  ranges.v_pos_max = 0.5;
  ranges.v_neg_min = 50.0;
  ranges.v_neg_max = 60.0;
  const auto instances = generate_instances(3, 500, ranges);
  int negated_predictions = 0;
  for (const auto& inst : instances) {
    const auto& chosen = inst.item.options[inst.prediction.choice_index];
    if (chosen.polarity == Polarity::kNeg) ++negated_predictions;
  }
  CHECK(negated_predictions == 500);
}

TEST_CASE("identical residuals never let the negated surface win") {
  SimRanges ranges;
  ranges.v_pos_min = ranges.v_pos_max = 0.5;
  ranges.v_neg_min = ranges.v_neg_max = 0.5;
  const auto instances = generate_instances(5, 500, ranges);
  for (const auto& inst : instances) {
    const auto& chosen = inst.item.options[inst.prediction.choice_index];
    CHECK(chosen.polarity == Polarity::kPos);
  }
}

TEST_CASE("logprob gaps equal score gaps after the shift") {
  const auto instances = generate_instances(13, 50, SimRanges{});
  for (const auto& inst : instances) {
    const auto& lp = *inst.prediction.option_logprobs;
    for (size_t i = 0; i < inst.item.options.size(); ++i)
      for (size_t j = 0; j < inst.item.options.size(); ++j) {
        const double score_gap =
            score_option(inst.model, inst.item.options[i]) -
            score_option(inst.model, inst.item.options[j]);
        CHECK(lp[i] - lp[j] == doctest::Approx(score_gap).epsilon(1e-9));
      }
  }
}

TEST_CASE("propositions hold over a seeded random population") {
  const auto instances = generate_instances(1729, 2000, SimRanges{});
  int counterexamples_1 = 0, failures_2 = 0;
  for (const auto& inst : instances) {
    const Prop1Result p1 = check_proposition_1(inst.model, inst.item);
    if (p1.assumptions_hold && !p1.conclusion_holds) ++counterexamples_1;
    if (!check_proposition_2(inst.model, inst.item)) ++failures_2;
  }
  CHECK(counterexamples_1 == 0);
  CHECK(failures_2 == 0);
}

TEST_CASE("safe-subset identities on a fully repairable population") {
  SimRanges ranges;
  ranges.v_neg_min = 50.0;  // every instance predicts the negated option
  ranges.v_neg_max = 60.0;
  const auto instances = generate_instances(21, 400, ranges);
  const SafeSubsetReport report =
      check_safe_subset(instances, VerifierConfig{});
  CHECK(report.ok());
  CHECK(report.n == 400);
  CHECK(report.triggered == 400);
  CHECK(report.base_wrong == 400);
  // Every error was repairable, so verification recovers full accuracy.
  CHECK(report.triggered == report.base_wrong);
}

TEST_CASE("safe-subset identities on a mixed population") {
  SimRanges ranges;  // defaults mix correct, reversed, and distractor wins
  const auto instances = generate_instances(23, 2000, ranges);
  const SafeSubsetReport report =
      check_safe_subset(instances, VerifierConfig{});
  CHECK(report.ok());
  CHECK(report.triggered <= report.base_wrong);
  CHECK(report.triggered > 0);
  CHECK(report.base_wrong > report.triggered);  // distractor wins don't trigger
}

TEST_CASE("safe-subset check on an empty population passes vacuously") {
  const SafeSubsetReport report = check_safe_subset({}, VerifierConfig{});
  CHECK(report.ok());
  CHECK(report.n == 0);
}
