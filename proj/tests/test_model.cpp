#include <doctest.h>

#include <filesystem>

#include "fixtures.hpp"
#include "negaudit/builder.hpp"
#include "negaudit/io.hpp"
#include "negaudit/model.hpp"
#include "negaudit/rng.hpp"

using namespace negaudit;
namespace fx = negaudit::fixtures;

namespace {

ProtocolItem simple_item(const std::string& id, ProtocolKind kind) {
  const auto& ext = extended_lexicon();
  ProtocolItem item;
  item.item_id = id;
  item.study_id = "study_" + id;
  item.image_refs = {"img://" + id};
  item.question = std::string(kind == ProtocolKind::kReportAbsence
                                  ? kAbsenceQuestion
                                  : kPresenceQuestion);
  item.options = {parse_option("Edema", ext), parse_option("No edema", ext),
                  parse_option("Pleural effusion", ext)};
  item.gold_index = 0;
  item.protocol_kind = kind;
  item.target_finding = "edema";
  item.variant_tag = "canonical_no";
  return item;
}

}  // namespace

TEST_CASE("validate_protocol accepts a well-formed absence item") {
  const auto report =
      validate_protocol(std::vector{simple_item("a", ProtocolKind::kReportAbsence)});
  CHECK(report.ok());
  CHECK(report.warnings.empty());
}

TEST_CASE("validate_protocol flags a control item with a negated option") {
  ProtocolItem control = simple_item("c", ProtocolKind::kPositiveControl);
  const auto report = validate_protocol(std::vector{control});
  REQUIRE_FALSE(report.ok());
  CHECK(report.errors[0].message.find("control item contains negated option") !=
        std::string::npos);
}

TEST_CASE("validate_protocol hard invariants") {
  ProtocolItem item = simple_item("x", ProtocolKind::kReportAbsence);

  SUBCASE("duplicate item_id") {
    const auto report = validate_protocol(std::vector{item, item});
    REQUIRE_FALSE(report.ok());
    CHECK(report.errors[0].message == "duplicate item_id");
  }
  SUBCASE("gold index out of range") {
    item.gold_index = 7;
    CHECK_FALSE(validate_protocol(std::vector{item}).ok());
  }
  SUBCASE("two negated options") {
    item.options[2] = parse_option("No edema", extended_lexicon());
    CHECK_FALSE(validate_protocol(std::vector{item}).ok());
  }
  SUBCASE("negated concept differs from target") {
    item.target_finding = "pneumothorax";
    CHECK_FALSE(validate_protocol(std::vector{item}).ok());
  }
  SUBCASE("fewer than three options") {
    item.options.pop_back();
    CHECK_FALSE(validate_protocol(std::vector{item}).ok());
  }
  SUBCASE("duplicate positive concepts warn, not error") {
    item.options.push_back(parse_option("Pleural effusion", extended_lexicon()));
    const auto report = validate_protocol(std::vector{item});
    CHECK(report.ok());
    REQUIRE(report.warnings.size() == 1);
    CHECK(report.warnings[0].message.find("duplicate positive concept") !=
          std::string::npos);
  }
}

TEST_CASE("validate_protocol passes the 507-record builder fixture") {
  const auto items =
      build_report_absence(fx::absence_table(), fx::default_config());
  REQUIRE(items.size() == 507);
  const auto report = validate_protocol(items);
  CHECK(report.ok());
  CHECK(report.warnings.empty());
}

TEST_CASE("validate_protocol is idempotent and side-effect free") {
  auto items = std::vector{simple_item("a", ProtocolKind::kReportAbsence),
                           simple_item("a", ProtocolKind::kReportAbsence)};
  const auto items_copy = items;
  const auto first = validate_protocol(items);
  const auto second = validate_protocol(items);
  CHECK(items == items_copy);
  REQUIRE(first.errors.size() == second.errors.size());
  for (size_t i = 0; i < first.errors.size(); ++i) {
    CHECK(first.errors[i].item_id == second.errors[i].item_id);
    CHECK(first.errors[i].message == second.errors[i].message);
  }
}

TEST_CASE("join_predictions pairs, diagnostics, and order") {
  std::vector<ProtocolItem> items = {
      simple_item("a", ProtocolKind::kDirectPresence),
      simple_item("b", ProtocolKind::kDirectPresence),
      simple_item("c", ProtocolKind::kDirectPresence)};

  SUBCASE("full match keeps protocol order") {
    std::vector<PredictionRecord> preds = {
        {.item_id = "c", .choice_index = 0},
        {.item_id = "a", .choice_index = 1},
        {.item_id = "b", .choice_index = 2}};
    const auto join = join_predictions(items, preds);
    CHECK(join.ok());
    CHECK(join.missing_prediction.empty());
    REQUIRE(join.pairs.size() == 3);
    CHECK(join.pairs[0].first->item_id == "a");
    CHECK(join.pairs[1].first->item_id == "b");
    CHECK(join.pairs[2].first->item_id == "c");
  }
  SUBCASE("missing prediction reported") {
    std::vector<PredictionRecord> preds = {{.item_id = "a", .choice_index = 0},
                                           {.item_id = "c", .choice_index = 0}};
    const auto join = join_predictions(items, preds);
    CHECK(join.ok());
    CHECK(join.pairs.size() == 2);
    CHECK(join.missing_prediction == std::vector<std::string>{"b"});
  }
  SUBCASE("duplicate prediction is a hard error naming the id") {
    std::vector<PredictionRecord> preds = {{.item_id = "a", .choice_index = 0},
                                           {.item_id = "a", .choice_index = 1}};
    CHECK_THROWS_WITH_AS(join_predictions(items, preds),
                         doctest::Contains("'a'"), std::runtime_error);
  }
  SUBCASE("orphan prediction is an error entry") {
    std::vector<PredictionRecord> preds = {{.item_id = "zzz", .choice_index = 0}};
    const auto join = join_predictions(items, preds);
    CHECK_FALSE(join.ok());
    CHECK(join.errors[0].find("zzz") != std::string::npos);
  }
  SUBCASE("out-of-range choice is an error entry") {
    std::vector<PredictionRecord> preds = {{.item_id = "a", .choice_index = 9}};
    CHECK_FALSE(join_predictions(items, preds).ok());
  }
}

TEST_CASE("protocol JSONL round-trip is field-identical") {
  const auto items =
      build_direct_presence(fx::direct_presence_table(), fx::default_config());
  const auto path = std::filesystem::temp_directory_path() /
                    "negaudit_roundtrip_protocol.jsonl";
  write_protocol_jsonl(path, items);
  const auto reread = read_protocol_jsonl(path);
  CHECK(reread == items);
  std::filesystem::remove(path);
}

TEST_CASE("unknown fields are preserved on read and echoed on write") {
  const std::string line = R"({"item_id":"a","study_id":"s","image_refs":[],)"
      R"("question":"Which of the following findings is present on this chest X-ray study?",)"
      R"("options":[{"text":"Edema","concept":"edema","polarity":"POS"},)"
      R"({"text":"No edema","concept":"edema","polarity":"NEG","pattern_id":"canonical_no"},)"
      R"({"text":"Fracture","concept":"fracture","polarity":"POS"}],)"
      R"("gold_index":0,"protocol_kind":"DIRECT_PRESENCE","target_finding":"edema",)"
      R"("variant_tag":"canonical_no","custom_note":"keep me","rank":3})";
  const auto item = protocol_item_from_json(ordered_json::parse(line));
  CHECK(item.extra_fields.find("custom_note") != std::string::npos);
  const ordered_json echoed = to_json(item);
  CHECK(echoed.at("custom_note") == "keep me");
  CHECK(echoed.at("rank") == 3);
}

TEST_CASE("prediction JSONL round-trip with optional fields") {
  std::vector<PredictionRecord> preds;
  PredictionRecord full;
  full.item_id = "a";
  full.choice_index = 1;
  full.base_confidence = 0.7;
  full.packet_choice_index = 0;
  full.packet_confidence = 0.74;
  full.option_logprobs = std::vector<double>{-1.5, -0.25, -3.0};
  preds.push_back(full);
  preds.push_back({.item_id = "b", .choice_index = 2});

  const auto path = std::filesystem::temp_directory_path() /
                    "negaudit_roundtrip_preds.jsonl";
  write_predictions_jsonl(path, preds);
  CHECK(read_predictions_jsonl(path) == preds);
  std::filesystem::remove(path);
}

TEST_CASE("percentage rounding is half-up at two decimals") {
  CHECK(round_pct(100.0 * 74 / 235) == 31.49);
  CHECK(round_pct(100.0 * 227 / 235) == 96.60);
  CHECK(round_pct(0.005) == 0.01);
  CHECK(format_pct(100.0 * 2 / 507) == "0.39");
  CHECK(format_pct(100.0 * 506 / 507) == "99.80");
}
