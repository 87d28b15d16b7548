#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "negaudit/io.hpp"
#include "negaudit/report.hpp"

namespace py = pybind11;
using namespace negaudit;

#define STRINGIFY(x) #x
#define MACRO_STRINGIFY(x) STRINGIFY(x)

namespace {

// The C++ surface takes spans; the bindings accept vectors and forward.
template <typename T>
std::span<const T> view(const std::vector<T>& v) {
  return {v.data(), v.size()};
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Deterministic polarity audit toolkit for contrastive "
            "multiple-choice chest-X-ray VQA protocols";

  py::enum_<Polarity>(m, "Polarity")
      .value("POS", Polarity::kPos)
      .value("NEG", Polarity::kNeg);
  py::enum_<ProtocolKind>(m, "ProtocolKind")
      .value("DIRECT_PRESENCE", ProtocolKind::kDirectPresence)
      .value("REPORT_ABSENCE", ProtocolKind::kReportAbsence)
      .value("POSITIVE_CONTROL", ProtocolKind::kPositiveControl)
      .value("RETRO_PRESENCE", ProtocolKind::kRetroPresence)
      .value("RETRO_ABSENCE", ProtocolKind::kRetroAbsence);
  py::enum_<VerifyReason>(m, "VerifyReason")
      .value("NOT_NEGATED_PREDICTION", VerifyReason::kNotNegatedPrediction)
      .value("NO_NEGATION_CUE", VerifyReason::kNoNegationCue)
      .value("AMBIGUOUS_OPTIONS", VerifyReason::kAmbiguousOptions)
      .value("NO_COUNTERPART", VerifyReason::kNoCounterpart)
      .value("REPAIRED_ABSENCE", VerifyReason::kRepairedAbsence)
      .value("REPAIRED_PRESENCE", VerifyReason::kRepairedPresence)
      .value("Y0_REPLACED", VerifyReason::kY0Replaced)
      .value("PASS_THROUGH", VerifyReason::kPassThrough);
  py::enum_<PolarityClass>(m, "PolarityClass")
      .value("ABSENCE", PolarityClass::kAbsence)
      .value("PRESENCE", PolarityClass::kPresence)
      .value("UNKNOWN", PolarityClass::kUnknown);
  py::enum_<SlotMode>(m, "SlotMode")
      .value("SLOT0", SlotMode::kSlot0)
      .value("SLOT_AGNOSTIC", SlotMode::kSlotAgnostic);
  py::enum_<FindingLabel>(m, "FindingLabel")
      .value("PRESENT", FindingLabel::kPresent)
      .value("ABSENT", FindingLabel::kAbsent)
      .value("UNCERTAIN", FindingLabel::kUncertain)
      .value("UNMENTIONED", FindingLabel::kUnmentioned);
  py::enum_<ParaphraseVariant>(m, "ParaphraseVariant")
      .value("CANONICAL_NO", ParaphraseVariant::kCanonicalNo)
      .value("ABSENCE_OF", ParaphraseVariant::kAbsenceOf)
      .value("NOT_PRESENT", ParaphraseVariant::kNotPresent)
      .value("NO_EVIDENCE_OF", ParaphraseVariant::kNoEvidenceOf)
      .value("CLEAR_OF", ParaphraseVariant::kClearOf);
  py::enum_<ResampleMethod>(m, "ResampleMethod")
      .value("EXAMPLE", ResampleMethod::kExample)
      .value("STUDY_CLUSTERED", ResampleMethod::kStudyClustered);
  py::enum_<BootStatistic>(m, "BootStatistic")
      .value("MEAN_PCT", BootStatistic::kMeanPct)
      .value("SUM", BootStatistic::kSum);

  py::class_<AnswerOption>(m, "AnswerOption")
      .def(py::init<>())
      .def_readwrite("surface_text", &AnswerOption::surface_text)
      .def_readwrite("concept", &AnswerOption::concept_name)
      .def_readwrite("polarity", &AnswerOption::polarity)
      .def_readwrite("lexicon_pattern_id", &AnswerOption::lexicon_pattern_id)
      .def("__repr__", [](const AnswerOption& o) {
        return "AnswerOption('" + o.surface_text + "', " + o.concept_name +
               ", " + std::string(to_string(o.polarity)) + ")";
      });

  py::class_<ProtocolItem>(m, "ProtocolItem")
      .def(py::init<>())
      .def_readwrite("item_id", &ProtocolItem::item_id)
      .def_readwrite("study_id", &ProtocolItem::study_id)
      .def_readwrite("image_refs", &ProtocolItem::image_refs)
      .def_readwrite("question", &ProtocolItem::question)
      .def_readwrite("options", &ProtocolItem::options)
      .def_readwrite("gold_index", &ProtocolItem::gold_index)
      .def_readwrite("protocol_kind", &ProtocolItem::protocol_kind)
      .def_readwrite("target_finding", &ProtocolItem::target_finding)
      .def_readwrite("variant_tag", &ProtocolItem::variant_tag)
      .def("__repr__", [](const ProtocolItem& i) {
        return "ProtocolItem('" + i.item_id + "')";
      });

  py::class_<PredictionRecord>(m, "PredictionRecord")
      .def(py::init<>())
      .def(py::init([](std::string item_id, int choice_index) {
             PredictionRecord p;
             p.item_id = std::move(item_id);
             p.choice_index = choice_index;
             return p;
           }),
           py::arg("item_id"), py::arg("choice_index"))
      .def_readwrite("item_id", &PredictionRecord::item_id)
      .def_readwrite("choice_index", &PredictionRecord::choice_index)
      .def_readwrite("base_confidence", &PredictionRecord::base_confidence)
      .def_readwrite("packet_choice_index",
                     &PredictionRecord::packet_choice_index)
      .def_readwrite("packet_confidence", &PredictionRecord::packet_confidence)
      .def_readwrite("option_logprobs", &PredictionRecord::option_logprobs);

  py::class_<VerifiedPrediction>(m, "VerifiedPrediction")
      .def(py::init<>())
      .def_readwrite("item_id", &VerifiedPrediction::item_id)
      .def_readwrite("base_index", &VerifiedPrediction::base_index)
      .def_readwrite("final_index", &VerifiedPrediction::final_index)
      .def_readwrite("triggered", &VerifiedPrediction::triggered)
      .def_readwrite("reason", &VerifiedPrediction::reason);

  py::class_<NegationPattern>(m, "NegationPattern")
      .def(py::init<std::string, std::string>(), py::arg("pattern_id"),
           py::arg("template_text"))
      .def_readwrite("pattern_id", &NegationPattern::pattern_id)
      .def_readwrite("template_text", &NegationPattern::template_text);

  py::class_<NegationLexicon>(m, "NegationLexicon")
      .def(py::init<>())
      .def_readwrite("name", &NegationLexicon::name)
      .def_readwrite("question_absence_cues",
                     &NegationLexicon::question_absence_cues)
      .def_readwrite("question_presence_cues",
                     &NegationLexicon::question_presence_cues)
      .def_readwrite("option_negation_patterns",
                     &NegationLexicon::option_negation_patterns)
      .def_readwrite("concept_synonyms", &NegationLexicon::concept_synonyms);

  py::class_<Violation>(m, "Violation")
      .def_readonly("item_id", &Violation::item_id)
      .def_readonly("message", &Violation::message);
  py::class_<ValidationReport>(m, "ValidationReport")
      .def_readonly("errors", &ValidationReport::errors)
      .def_readonly("warnings", &ValidationReport::warnings)
      .def("ok", &ValidationReport::ok);

  py::class_<LabelRow>(m, "LabelRow")
      .def(py::init<>())
      .def(py::init([](std::string study_id, std::vector<std::string> refs,
                       std::map<std::string, FindingLabel> labels) {
             return LabelRow{std::move(study_id), std::move(refs),
                             std::move(labels)};
           }),
           py::arg("study_id"), py::arg("image_refs"), py::arg("labels"))
      .def_readwrite("study_id", &LabelRow::study_id)
      .def_readwrite("image_refs", &LabelRow::image_refs)
      .def_readwrite("labels", &LabelRow::labels);
  py::class_<LabelTable>(m, "LabelTable")
      .def(py::init<>())
      .def_readwrite("rows", &LabelTable::rows);
  py::class_<BuildConfig>(m, "BuildConfig")
      .def(py::init<>())
      .def_readwrite("finding_vocabulary", &BuildConfig::finding_vocabulary)
      .def_readwrite("seed", &BuildConfig::seed);
  py::class_<BuildReport>(m, "BuildReport")
      .def_readonly("n_records", &BuildReport::n_records)
      .def_readonly("n_studies", &BuildReport::n_studies)
      .def_readonly("records_per_study", &BuildReport::records_per_study)
      .def_readonly("per_finding", &BuildReport::per_finding)
      .def_readonly("records_per_kind", &BuildReport::records_per_kind);

  py::class_<VerifierConfig>(m, "VerifierConfig")
      .def(py::init<>())
      .def_readwrite("lexicon", &VerifierConfig::lexicon)
      .def_readwrite("slot_mode", &VerifierConfig::slot_mode)
      .def_readwrite("y0_enabled", &VerifierConfig::y0_enabled)
      .def_readwrite("y0_confidence_ceiling",
                     &VerifierConfig::y0_confidence_ceiling)
      .def_readwrite("y0_margin", &VerifierConfig::y0_margin);

  py::class_<TriggerSummary>(m, "TriggerSummary")
      .def_readonly("n", &TriggerSummary::n)
      .def_readonly("triggered", &TriggerSummary::triggered)
      .def_readonly("reason_counts", &TriggerSummary::reason_counts)
      .def_readonly("repairs_by_pattern", &TriggerSummary::repairs_by_pattern)
      .def_readonly("warnings", &TriggerSummary::warnings)
      .def("coverage_pct", &TriggerSummary::coverage_pct);

  py::class_<MetricCounts>(m, "MetricCounts")
      .def_readonly("n", &MetricCounts::n)
      .def_readonly("correct", &MetricCounts::correct)
      .def_readonly("contradictions", &MetricCounts::contradictions)
      .def_readonly("presence_reversals", &MetricCounts::presence_reversals)
      .def_readonly("wrong_with_negation", &MetricCounts::wrong_with_negation)
      .def_readonly("repairable_reversals",
                    &MetricCounts::repairable_reversals)
      .def("accuracy_pct", &MetricCounts::accuracy_pct);
  py::class_<MetricsReport>(m, "MetricsReport")
      .def_readonly("overall", &MetricsReport::overall)
      .def_readonly("per_finding", &MetricsReport::per_finding)
      .def_readonly("absence_questions", &MetricsReport::absence_questions)
      .def_readonly("presence_questions", &MetricsReport::presence_questions);

  py::class_<DiffReport>(m, "DiffReport")
      .def_readonly("n", &DiffReport::n)
      .def_readonly("changed", &DiffReport::changed)
      .def_readonly("improved", &DiffReport::improved)
      .def_readonly("worsened", &DiffReport::worsened)
      .def_readonly("changed_still_wrong", &DiffReport::changed_still_wrong)
      .def_readonly("triggered", &DiffReport::triggered)
      .def_readonly("base_correct", &DiffReport::base_correct)
      .def_readonly("verified_correct", &DiffReport::verified_correct)
      .def_readonly("worsened_item_ids", &DiffReport::worsened_item_ids)
      .def("coverage_pct", &DiffReport::coverage_pct)
      .def("delta_pp", &DiffReport::delta_pp);

  py::class_<GapSummary>(m, "GapSummary")
      .def_readonly("n", &GapSummary::n)
      .def_readonly("skipped", &GapSummary::skipped)
      .def_readonly("mean", &GapSummary::mean)
      .def_readonly("min", &GapSummary::min)
      .def_readonly("q25", &GapSummary::q25)
      .def_readonly("median", &GapSummary::median)
      .def_readonly("q75", &GapSummary::q75)
      .def_readonly("max", &GapSummary::max)
      .def_readonly("per_item", &GapSummary::per_item);

  py::class_<ResampleConfig>(m, "ResampleConfig")
      .def(py::init<>())
      .def_readwrite("n_resamples", &ResampleConfig::n_resamples)
      .def_readwrite("seed", &ResampleConfig::seed)
      .def_readwrite("confidence_level", &ResampleConfig::confidence_level);
  py::class_<IntervalResult>(m, "IntervalResult")
      .def_readonly("point", &IntervalResult::point)
      .def_readonly("low", &IntervalResult::low)
      .def_readonly("high", &IntervalResult::high)
      .def_readonly("n_resamples_used", &IntervalResult::n_resamples_used)
      .def_readonly("method", &IntervalResult::method)
      .def_readonly("statistic", &IntervalResult::statistic)
      .def_readonly("seed", &IntervalResult::seed);

  py::class_<PolarityResiduals>(m, "PolarityResiduals")
      .def(py::init<double, double>(), py::arg("pos"), py::arg("neg"))
      .def_readwrite("pos", &PolarityResiduals::pos)
      .def_readwrite("neg", &PolarityResiduals::neg);
  py::class_<ScoreModel>(m, "ScoreModel")
      .def(py::init<>())
      .def_readwrite("concept_support", &ScoreModel::concept_support)
      .def_readwrite("polarity_residual", &ScoreModel::polarity_residual);
  py::class_<SimRanges>(m, "SimRanges")
      .def(py::init<>())
      .def_readwrite("u_min", &SimRanges::u_min)
      .def_readwrite("u_max", &SimRanges::u_max)
      .def_readwrite("v_pos_min", &SimRanges::v_pos_min)
      .def_readwrite("v_pos_max", &SimRanges::v_pos_max)
      .def_readwrite("v_neg_min", &SimRanges::v_neg_min)
      .def_readwrite("v_neg_max", &SimRanges::v_neg_max);
  py::class_<SimInstance>(m, "SimInstance")
      .def_readonly("model", &SimInstance::model)
      .def_readonly("item", &SimInstance::item)
      .def_readonly("prediction", &SimInstance::prediction);
  py::class_<Prop1Result>(m, "Prop1Result")
      .def_readonly("assumptions_hold", &Prop1Result::assumptions_hold)
      .def_readonly("conclusion_holds", &Prop1Result::conclusion_holds);
  py::class_<SafeSubsetReport>(m, "SafeSubsetReport")
      .def_readonly("n", &SafeSubsetReport::n)
      .def_readonly("triggered", &SafeSubsetReport::triggered)
      .def_readonly("base_wrong", &SafeSubsetReport::base_wrong)
      .def_readonly("exact_on_triggered", &SafeSubsetReport::exact_on_triggered)
      .def_readonly("unchanged_outside", &SafeSubsetReport::unchanged_outside)
      .def_readonly("harm_empty", &SafeSubsetReport::harm_empty)
      .def_readonly("delta_identity", &SafeSubsetReport::delta_identity)
      .def_readonly("failures", &SafeSubsetReport::failures)
      .def("ok", &SafeSubsetReport::ok);

  // Lexicon operations.
  m.def("original_lexicon", [] { return original_lexicon(); });
  m.def("extended_lexicon", [] { return extended_lexicon(); });
  m.def("canonicalize",
        [](const std::string& text) { return canonicalize(text); });
  m.def("classify_question",
        [](const std::string& q, const NegationLexicon& lex) {
          return classify_question(q, lex);
        },
        py::arg("question"), py::arg("lexicon"));
  m.def("parse_option",
        [](const std::string& text, const NegationLexicon& lex) {
          return parse_option(text, lex);
        },
        py::arg("text"), py::arg("lexicon"));
  m.def("find_positive_counterpart", &find_positive_counterpart,
        py::arg("options"), py::arg("negated_index"));
  m.def("render_negated",
        [](const NegationPattern& p, const std::string& c) {
          return render_negated(p, c);
        });

  // Model operations.
  m.def("validate_protocol", [](const std::vector<ProtocolItem>& items) {
    return validate_protocol(view(items));
  });

  // Builders and transforms.
  m.def("build_direct_presence", &build_direct_presence, py::arg("table"),
        py::arg("config"));
  m.def("build_report_absence", &build_report_absence, py::arg("table"),
        py::arg("config"));
  m.def("build_positive_control", &build_positive_control, py::arg("table"),
        py::arg("direct_items"), py::arg("config"));
  m.def("apply_paraphrase",
        [](const std::vector<ProtocolItem>& items, ParaphraseVariant v) {
          return apply_paraphrase(view(items), v);
        },
        py::arg("items"), py::arg("variant"));
  m.def("shuffle_layout",
        [](const std::vector<ProtocolItem>& items, std::uint64_t seed) {
          return shuffle_layout(view(items), seed);
        },
        py::arg("items"), py::arg("seed"));
  m.def("summarize_build", [](const std::vector<ProtocolItem>& items) {
    return summarize_build(view(items));
  });

  // Verifier.
  m.def("qccv_verify", &qccv_verify, py::arg("item"), py::arg("prediction"),
        py::arg("config"));
  m.def("y0_fallback",
        [](const ProtocolItem& item, const PredictionRecord& pred,
           const VerifierConfig& cfg) { return y0_fallback(item, pred, cfg); },
        py::arg("item"), py::arg("prediction"), py::arg("config"));
  m.def("batch_verify",
        [](const std::vector<ProtocolItem>& items,
           const std::vector<PredictionRecord>& preds,
           const VerifierConfig& cfg) {
          BatchVerifyResult r = batch_verify(view(items), view(preds), cfg);
          return py::make_tuple(std::move(r.verified), std::move(r.summary));
        },
        py::arg("items"), py::arg("predictions"), py::arg("config"),
        "Returns (verified_predictions, trigger_summary)");

  // Metrics.
  m.def("score",
        [](const std::vector<ProtocolItem>& items,
           const std::vector<PredictionRecord>& preds,
           const NegationLexicon& lex) {
          return score(view(items), view(preds), lex);
        },
        py::arg("items"), py::arg("predictions"),
        py::arg("lexicon") = extended_lexicon());
  m.def("diff",
        [](const std::vector<ProtocolItem>& items,
           const std::vector<PredictionRecord>& base,
           const std::vector<VerifiedPrediction>& verified) {
          return diff(view(items), view(base), view(verified));
        },
        py::arg("items"), py::arg("base"), py::arg("verified"));
  m.def("logprob_gap",
        [](const std::vector<ProtocolItem>& items,
           const std::vector<PredictionRecord>& preds,
           const std::optional<std::set<std::string>>& subset) {
          return logprob_gap(view(items), view(preds),
                             subset ? &*subset : nullptr);
        },
        py::arg("items"), py::arg("predictions"),
        py::arg("subset") = std::nullopt);
  m.def("predictions_from_verified",
        [](const std::vector<PredictionRecord>& base,
           const std::vector<VerifiedPrediction>& verified) {
          return predictions_from_verified(view(base), view(verified));
        },
        py::arg("base"), py::arg("verified"));

  // Resampling statistics.
  m.def("bootstrap_ci",
        [](const std::vector<int>& values, const ResampleConfig& cfg,
           BootStatistic stat) { return bootstrap_ci(values, cfg, stat); },
        py::arg("values"), py::arg("config") = ResampleConfig{},
        py::arg("statistic") = BootStatistic::kMeanPct);
  m.def("clustered_bootstrap_ci",
        [](const std::vector<int>& values,
           const std::vector<std::string>& studies, const ResampleConfig& cfg,
           BootStatistic stat) {
          return clustered_bootstrap_ci(values, studies, cfg, stat);
        },
        py::arg("values"), py::arg("study_ids"),
        py::arg("config") = ResampleConfig{},
        py::arg("statistic") = BootStatistic::kMeanPct);
  m.def("paired_permutation_test",
        [](const std::vector<int>& base, const std::vector<int>& verified,
           const ResampleConfig& cfg) {
          return paired_permutation_test(base, verified, cfg);
        },
        py::arg("base_correct"), py::arg("verified_correct"),
        py::arg("config") = ResampleConfig{});

  // Score-model simulator.
  m.def("score_option", &score_option, py::arg("model"), py::arg("option"));
  m.def("predict", &predict, py::arg("model"), py::arg("item"));
  m.def("check_proposition_1", &check_proposition_1, py::arg("model"),
        py::arg("item"));
  m.def("check_proposition_2", &check_proposition_2, py::arg("model"),
        py::arg("item"));
  m.def("generate_instances", &generate_instances, py::arg("seed"),
        py::arg("n"), py::arg("ranges") = SimRanges{});
  m.def("check_safe_subset",
        [](const std::vector<SimInstance>& instances,
           const VerifierConfig& cfg) {
          return check_safe_subset(view(instances), cfg);
        },
        py::arg("instances"), py::arg("config") = VerifierConfig{});

  // File I/O (JSONL protocol, prediction, verified; lexicon; label table).
  m.def("read_protocol_jsonl", &read_protocol_jsonl, py::arg("path"));
  m.def("read_predictions_jsonl", &read_predictions_jsonl, py::arg("path"));
  m.def("read_verified_jsonl", &read_verified_jsonl, py::arg("path"));
  m.def("write_protocol_jsonl",
        [](const std::filesystem::path& p,
           const std::vector<ProtocolItem>& items) {
          write_protocol_jsonl(p, items);
        },
        py::arg("path"), py::arg("items"));
  m.def("write_predictions_jsonl",
        [](const std::filesystem::path& p,
           const std::vector<PredictionRecord>& preds) {
          write_predictions_jsonl(p, preds);
        },
        py::arg("path"), py::arg("predictions"));
  m.def("write_verified_jsonl",
        [](const std::filesystem::path& p,
           const std::vector<VerifiedPrediction>& verified) {
          write_verified_jsonl(p, verified);
        },
        py::arg("path"), py::arg("verified"));
  m.def("read_lexicon_json", &read_lexicon_json, py::arg("path"));
  m.def("write_lexicon_json", &write_lexicon_json, py::arg("path"),
        py::arg("lexicon"));
  m.def("read_label_table", [](const std::filesystem::path& p) {
    LoadedLabelTable loaded = read_label_table(p);
    return py::make_tuple(std::move(loaded.table),
                          std::move(loaded.header_vocabulary));
  }, py::arg("path"), "Returns (table, header_vocabulary)");

#ifdef NEGAUDIT_VERSION
  m.attr("__version__") = NEGAUDIT_VERSION;
#else
  m.attr("__version__") = "dev";
#endif
}
