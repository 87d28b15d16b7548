#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "negaudit/io.hpp"
#include "negaudit/report.hpp"

namespace fs = std::filesystem;
using namespace negaudit;

namespace {

constexpr const char* kVersion = "0.1.0";

// Exit codes: 0 success, 1 I/O or parse error, 2 validation failure.
constexpr int kExitOk = 0;
constexpr int kExitIoError = 1;
constexpr int kExitValidation = 2;

std::uint64_t default_seed() {
  if (const char* env = std::getenv("NEGAUDIT_SEED"))
    return std::strtoull(env, nullptr, 10);
  return 42;
}

struct Timer {
  std::chrono::steady_clock::time_point start =
      std::chrono::steady_clock::now();
  std::int64_t elapsed_ms() const {
    return std::chrono::duration_cast<std::chrono::milliseconds>(
               std::chrono::steady_clock::now() - start)
        .count();
  }
};

void emit_manifest(const std::string& subcommand,
                   const std::vector<std::string>& inputs,
                   const ordered_json& config, const fs::path& primary_out,
                   const Timer& timer, const std::string& manifest_path) {
  RunManifest manifest;
  manifest.subcommand = subcommand;
  manifest.input_paths = inputs;
  manifest.config_echo = config;
  manifest.tool_version = kVersion;
  manifest.wall_time_ms = timer.elapsed_ms();
  const fs::path path = manifest_path.empty()
                            ? fs::path(primary_out.string() + ".manifest.json")
                            : fs::path(manifest_path);
  write_manifest(path, manifest);
}

int require_valid(const std::vector<ProtocolItem>& items) {
  const ValidationReport report = validate_protocol(items);
  for (const auto& w : report.warnings)
    std::cerr << "warning: " << w.item_id << ": " << w.message << "\n";
  if (!report.ok()) {
    for (const auto& e : report.errors)
      std::cerr << "error: " << e.item_id << ": " << e.message << "\n";
    return kExitValidation;
  }
  return kExitOk;
}

std::vector<std::string> split_csv_list(const std::string& joined) {
  std::vector<std::string> out;
  std::string token;
  std::istringstream stream(joined);
  while (std::getline(stream, token, ',')) {
    if (!token.empty()) out.push_back(token);
  }
  return out;
}

StatsBundle compute_stats(const std::vector<ProtocolItem>& items,
                          const std::vector<PredictionRecord>& base,
                          const std::vector<VerifiedPrediction>& verified,
                          const ResampleConfig& cfg, ResampleMethod method) {
  const auto verified_preds = predictions_from_verified(base, verified);
  const JoinResult base_join = join_predictions(items, base);
  const JoinResult verified_join = join_predictions(items, verified_preds);
  if (!base_join.ok() || !verified_join.ok())
    throw std::runtime_error("stats: join failed");

  std::vector<int> base_correct, verified_correct, base_neg;
  std::vector<std::string> studies;
  for (const auto& [item, pred] : base_join.pairs) {
    base_correct.push_back(pred->choice_index == item->gold_index ? 1 : 0);
    studies.push_back(item->study_id);
    int negated = -1;
    for (int i = 0; i < static_cast<int>(item->options.size()); ++i)
      if (item->options[i].polarity == Polarity::kNeg) negated = i;
    base_neg.push_back(negated >= 0 && pred->choice_index == negated ? 1 : 0);
  }
  for (const auto& [item, pred] : verified_join.pairs)
    verified_correct.push_back(pred->choice_index == item->gold_index ? 1 : 0);

  StatsBundle bundle;
  if (method == ResampleMethod::kStudyClustered) {
    bundle.base_accuracy = clustered_bootstrap_ci(base_correct, studies, cfg);
    bundle.verified_accuracy =
        clustered_bootstrap_ci(verified_correct, studies, cfg);
    bundle.polarity_errors =
        clustered_bootstrap_ci(base_neg, studies, cfg, BootStatistic::kSum);
  } else {
    bundle.base_accuracy = bootstrap_ci(base_correct, cfg);
    bundle.verified_accuracy = bootstrap_ci(verified_correct, cfg);
    bundle.polarity_errors = bootstrap_ci(base_neg, cfg, BootStatistic::kSum);
  }
  bundle.permutation_p =
      paired_permutation_test(base_correct, verified_correct, cfg);
  bundle.n_resamples = cfg.n_resamples;
  bundle.seed = cfg.seed;
  bundle.method = method;
  return bundle;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Contrastive chest-X-ray VQA polarity audit toolkit"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);

  // ---- build ----
  auto* build = app.add_subcommand(
      "build", "Construct a protocol from a finding-label table");
  std::string build_table, build_kind = "direct_presence", build_vocab;
  std::string build_out, build_report_path, build_paraphrase, build_manifest;
  std::int64_t build_shuffle_seed = -1;
  std::uint64_t build_seed = default_seed();
  build->add_option("--table", build_table, "Label table (.csv or JSONL)")
      ->required();
  build->add_option("--kind", build_kind,
                    "direct_presence | report_absence | positive_control");
  build->add_option("--vocab", build_vocab,
                    "Comma-joined finding vocabulary (default: CSV header)");
  std::string build_distractor = "first_in_vocab_order";
  build->add_option("--distractor-rule", build_distractor,
                    "Distractor tie-break (first_in_vocab_order)");
  build->add_option("--paraphrase", build_paraphrase,
                    "Re-render negated options: canonical_no | absence_of | "
                    "not_present | no_evidence_of | clear_of");
  build->add_option("--shuffle-seed", build_shuffle_seed,
                    "Shuffle option layout with this seed");
  build->add_option("--seed", build_seed, "Default build seed");
  build->add_option("--out", build_out, "Protocol JSONL output")->required();
  build->add_option("--report", build_report_path, "Build report JSON");
  build->add_option("--manifest", build_manifest, "Manifest path");

  // ---- verify ----
  auto* verify = app.add_subcommand(
      "verify", "Run the deterministic polarity verifier over predictions");
  std::string verify_protocol, verify_preds, verify_lexicon = "extended";
  std::string verify_slot = "slot0", verify_out, verify_summary,
              verify_manifest;
  bool verify_y0 = false;
  double y0_ceiling = 0.80, y0_margin = 0.03;
  verify->add_option("--protocol", verify_protocol, "Protocol JSONL")
      ->required();
  verify->add_option("--predictions", verify_preds, "Predictions JSONL")
      ->required();
  verify->add_option("--lexicon", verify_lexicon,
                     "original | extended | path to lexicon JSON");
  verify->add_option("--slot-mode", verify_slot, "slot0 | slot_agnostic");
  verify->add_flag("--y0", verify_y0, "Enable the confidence fallback");
  verify->add_option("--y0-ceiling", y0_ceiling, "Y0 confidence ceiling");
  verify->add_option("--y0-margin", y0_margin, "Y0 packet margin");
  verify->add_option("--out", verify_out, "Verified JSONL output")->required();
  verify->add_option("--summary", verify_summary, "Summary JSON output");
  verify->add_option("--manifest", verify_manifest, "Manifest path");

  // ---- score ----
  auto* score_cmd = app.add_subcommand("score", "Exact-match polarity metrics");
  std::string score_protocol, score_preds, score_verified,
      score_lexicon = "extended", score_out, score_manifest;
  score_cmd->add_option("--protocol", score_protocol, "Protocol JSONL")
      ->required();
  score_cmd->add_option("--predictions", score_preds, "Predictions JSONL")
      ->required();
  score_cmd->add_option("--verified", score_verified,
                        "Verified JSONL; scores final choices instead");
  score_cmd->add_option("--lexicon", score_lexicon,
                        "Lexicon for question polarity split");
  score_cmd->add_option("--out", score_out, "Metrics JSON output")->required();
  score_cmd->add_option("--manifest", score_manifest, "Manifest path");

  // ---- stats ----
  auto* stats_cmd = app.add_subcommand(
      "stats", "Bootstrap CIs and a paired permutation test");
  std::string stats_protocol, stats_preds, stats_verified,
      stats_method = "example", stats_out, stats_manifest;
  int stats_resamples = 2000;
  std::uint64_t stats_seed = default_seed();
  double stats_level = 0.95;
  stats_cmd->add_option("--protocol", stats_protocol, "Protocol JSONL")
      ->required();
  stats_cmd->add_option("--predictions", stats_preds, "Base predictions JSONL")
      ->required();
  stats_cmd->add_option("--verified", stats_verified, "Verified JSONL")
      ->required();
  stats_cmd->add_option("--resamples", stats_resamples, "Resample count");
  stats_cmd->add_option("--seed", stats_seed, "Resampling seed");
  stats_cmd->add_option("--level", stats_level, "Confidence level");
  stats_cmd->add_option("--method", stats_method, "example | study_clustered");
  stats_cmd->add_option("--out", stats_out, "Stats JSON output")->required();
  stats_cmd->add_option("--manifest", stats_manifest, "Manifest path");

  // ---- simulate ----
  auto* sim = app.add_subcommand(
      "simulate", "Generate score-model instances and check the repair identities");
  int sim_n = 1000;
  std::uint64_t sim_seed = default_seed();
  SimRanges ranges;
  std::string sim_protocol_out, sim_preds_out, sim_report_out, sim_manifest;
  bool sim_check = false;
  sim->add_option("--n", sim_n, "Instance count");
  sim->add_option("--seed", sim_seed, "Generation seed");
  sim->add_option("--u-min", ranges.u_min, "Concept support lower bound");
  sim->add_option("--u-max", ranges.u_max, "Concept support upper bound");
  sim->add_option("--v-pos-min", ranges.v_pos_min, "Positive residual lower");
  sim->add_option("--v-pos-max", ranges.v_pos_max, "Positive residual upper");
  sim->add_option("--v-neg-min", ranges.v_neg_min, "Negative residual lower");
  sim->add_option("--v-neg-max", ranges.v_neg_max, "Negative residual upper");
  sim->add_flag("--check", sim_check,
                "Check both propositions and the safe-subset identities");
  sim->add_option("--out-protocol", sim_protocol_out, "Protocol JSONL output");
  sim->add_option("--out-predictions", sim_preds_out,
                  "Predictions JSONL output");
  sim->add_option("--out", sim_report_out, "Simulation report JSON");
  sim->add_option("--manifest", sim_manifest, "Manifest path");

  // ---- report ----
  auto* report_cmd = app.add_subcommand(
      "report", "Render the base-vs-verified audit table");
  std::string report_protocol, report_preds, report_verified,
      report_lexicon = "extended", report_out, report_json_out,
      report_manifest;
  bool report_with_stats = false;
  int report_resamples = 2000;
  std::uint64_t report_seed = default_seed();
  report_cmd->add_option("--protocol", report_protocol, "Protocol JSONL")
      ->required();
  report_cmd->add_option("--predictions", report_preds, "Base predictions")
      ->required();
  report_cmd->add_option("--verified", report_verified, "Verified JSONL")
      ->required();
  report_cmd->add_option("--lexicon", report_lexicon, "Lexicon for splits");
  report_cmd->add_flag("--stats", report_with_stats, "Include CI/permutation stats");
  report_cmd->add_option("--resamples", report_resamples, "Resample count");
  report_cmd->add_option("--seed", report_seed, "Resampling seed");
  report_cmd->add_option("--out", report_out, "Markdown output")->required();
  report_cmd->add_option("--json", report_json_out, "JSON output");
  report_cmd->add_option("--manifest", report_manifest, "Manifest path");

  // ---- lexicon ----
  auto* lexicon_cmd = app.add_subcommand(
      "lexicon", "Dump a built-in lexicon for editing");
  std::string lexicon_name = "extended", lexicon_out;
  lexicon_cmd->add_option("--name", lexicon_name, "original | extended");
  lexicon_cmd->add_option("--out", lexicon_out,
                          "Output path (stdout when omitted)");

  CLI11_PARSE(app, argc, argv);
  Timer timer;

  try {
    if (*build) {
      if (build_distractor != "first_in_vocab_order") {
        std::cerr << "error: unknown --distractor-rule " << build_distractor
                  << "\n";
        return kExitIoError;
      }
      const LoadedLabelTable loaded = read_label_table(build_table);
      BuildConfig cfg;
      cfg.seed = build_seed;
      cfg.distractor_rule = DistractorRule::kFirstInVocabOrder;
      cfg.finding_vocabulary = build_vocab.empty()
                                   ? loaded.header_vocabulary
                                   : split_csv_list(build_vocab);
      if (cfg.finding_vocabulary.empty()) {
        std::cerr << "error: no finding vocabulary; pass --vocab for JSONL "
                     "tables\n";
        return kExitIoError;
      }

      std::vector<ProtocolItem> items;
      if (build_kind == "direct_presence") {
        items = build_direct_presence(loaded.table, cfg);
      } else if (build_kind == "report_absence") {
        items = build_report_absence(loaded.table, cfg);
      } else if (build_kind == "positive_control") {
        const auto direct = build_direct_presence(loaded.table, cfg);
        items = build_positive_control(loaded.table, direct, cfg);
      } else {
        std::cerr << "error: unknown --kind " << build_kind << "\n";
        return kExitIoError;
      }

      if (!build_paraphrase.empty())
        items = apply_paraphrase(
            items, paraphrase_variant_from_string(build_paraphrase));
      if (build_shuffle_seed >= 0)
        items = shuffle_layout(items,
                               static_cast<std::uint64_t>(build_shuffle_seed));

      if (int rc = require_valid(items); rc != kExitOk) return rc;
      write_protocol_jsonl(build_out, items);

      const BuildReport build_report = summarize_build(items);
      if (!build_report_path.empty())
        write_json_atomic(build_report_path, to_json(build_report));
      std::cout << "built " << build_report.n_records << " records from "
                << build_report.n_studies << " studies -> " << build_out
                << "\n";

      ordered_json config;
      config["kind"] = build_kind;
      config["vocabulary"] = cfg.finding_vocabulary;
      config["paraphrase"] = build_paraphrase;
      config["shuffle_seed"] = build_shuffle_seed;
      config["seed"] = cfg.seed;
      emit_manifest("build", {build_table}, config, build_out, timer,
                    build_manifest);
      return kExitOk;
    }

    if (*verify) {
      const auto items = read_protocol_jsonl(verify_protocol);
      if (int rc = require_valid(items); rc != kExitOk) return rc;
      const auto preds = read_predictions_jsonl(verify_preds);

      VerifierConfig cfg;
      cfg.lexicon = resolve_lexicon(verify_lexicon);
      cfg.slot_mode = slot_mode_from_string(verify_slot);
      cfg.y0_enabled = verify_y0;
      cfg.y0_confidence_ceiling = y0_ceiling;
      cfg.y0_margin = y0_margin;

      const BatchVerifyResult result = batch_verify(items, preds, cfg);
      write_verified_jsonl(verify_out, result.verified);
      const ordered_json summary = to_json(result.summary, cfg);
      if (!verify_summary.empty()) write_json_atomic(verify_summary, summary);

      std::cout << "coverage " << format_pct(result.summary.coverage_pct())
                << "%";
      for (const auto& [reason, count] : result.summary.reason_counts)
        std::cout << ", " << to_string(reason) << " " << count;
      std::cout << "\n";
      for (const auto& w : result.summary.warnings)
        std::cerr << "warning: " << w << "\n";

      emit_manifest("verify", {verify_protocol, verify_preds}, to_json(cfg),
                    verify_out, timer, verify_manifest);
      return kExitOk;
    }

    if (*score_cmd) {
      const auto items = read_protocol_jsonl(score_protocol);
      if (int rc = require_valid(items); rc != kExitOk) return rc;
      auto preds = read_predictions_jsonl(score_preds);
      if (!score_verified.empty()) {
        const auto verified = read_verified_jsonl(score_verified);
        preds = predictions_from_verified(preds, verified);
      }
      const NegationLexicon lexicon = resolve_lexicon(score_lexicon);
      const MetricsReport report = score(items, preds, lexicon);
      write_json_atomic(score_out, to_json(report));
      std::cout << "n " << report.overall.n << ", accuracy "
                << format_pct(report.overall.accuracy_pct())
                << "%, contradictions " << report.overall.contradictions
                << ", presence reversals " << report.overall.presence_reversals
                << "\n";
      ordered_json config;
      config["lexicon"] = lexicon.name;
      config["verified"] = !score_verified.empty();
      emit_manifest("score", {score_protocol, score_preds}, config, score_out,
                    timer, score_manifest);
      return kExitOk;
    }

    if (*stats_cmd) {
      const auto items = read_protocol_jsonl(stats_protocol);
      if (int rc = require_valid(items); rc != kExitOk) return rc;
      const auto preds = read_predictions_jsonl(stats_preds);
      const auto verified = read_verified_jsonl(stats_verified);
      ResampleConfig cfg;
      cfg.n_resamples = stats_resamples;
      cfg.seed = stats_seed;
      cfg.confidence_level = stats_level;
      const StatsBundle bundle = compute_stats(
          items, preds, verified, cfg, resample_method_from_string(stats_method));
      write_json_atomic(stats_out, to_json(bundle));
      std::cout << "base " << format_pct(bundle.base_accuracy.point) << " ["
                << format_pct(bundle.base_accuracy.low) << ", "
                << format_pct(bundle.base_accuracy.high) << "], verified "
                << format_pct(bundle.verified_accuracy.point) << " ["
                << format_pct(bundle.verified_accuracy.low) << ", "
                << format_pct(bundle.verified_accuracy.high) << "], p "
                << bundle.permutation_p << "\n";
      ordered_json config;
      config["resamples"] = cfg.n_resamples;
      config["seed"] = cfg.seed;
      config["level"] = cfg.confidence_level;
      config["method"] = stats_method;
      emit_manifest("stats", {stats_protocol, stats_preds, stats_verified},
                    config, stats_out, timer, stats_manifest);
      return kExitOk;
    }

    if (*sim) {
      const auto instances = generate_instances(sim_seed, sim_n, ranges);
      std::vector<ProtocolItem> items;
      std::vector<PredictionRecord> preds;
      for (const auto& inst : instances) {
        items.push_back(inst.item);
        preds.push_back(inst.prediction);
      }
      if (!sim_protocol_out.empty()) write_protocol_jsonl(sim_protocol_out, items);
      if (!sim_preds_out.empty()) write_predictions_jsonl(sim_preds_out, preds);

      ordered_json report;
      report["n"] = sim_n;
      report["seed"] = sim_seed;
      report["tie_break"] = "lowest_index";
      if (sim_check) {
        int prop1_counterexamples = 0, prop2_failures = 0, assumptions_held = 0;
        for (const auto& inst : instances) {
          const Prop1Result p1 = check_proposition_1(inst.model, inst.item);
          if (p1.assumptions_hold) {
            ++assumptions_held;
            if (!p1.conclusion_holds) ++prop1_counterexamples;
          }
          if (!check_proposition_2(inst.model, inst.item)) ++prop2_failures;
        }
        VerifierConfig vcfg;
        const SafeSubsetReport safe = check_safe_subset(instances, vcfg);
        report["prop1_assumptions_held"] = assumptions_held;
        report["prop1_counterexamples"] = prop1_counterexamples;
        report["prop2_failures"] = prop2_failures;
        report["safe_subset"] = {{"n", safe.n},
                                 {"triggered", safe.triggered},
                                 {"base_wrong", safe.base_wrong},
                                 {"exact_on_triggered", safe.exact_on_triggered},
                                 {"unchanged_outside", safe.unchanged_outside},
                                 {"harm_empty", safe.harm_empty},
                                 {"delta_identity", safe.delta_identity},
                                 {"failures", safe.failures}};
        std::cout << "prop1 counterexamples " << prop1_counterexamples
                  << ", prop2 failures " << prop2_failures << ", safe subset "
                  << (safe.ok() ? "ok" : "FAILED") << "\n";
        if (prop1_counterexamples || prop2_failures || !safe.ok()) {
          if (!sim_report_out.empty()) write_json_atomic(sim_report_out, report);
          return kExitValidation;
        }
      }
      const fs::path primary = !sim_report_out.empty() ? sim_report_out
                               : !sim_protocol_out.empty()
                                   ? sim_protocol_out
                                   : std::string("simulate.json");
      if (!sim_report_out.empty()) write_json_atomic(sim_report_out, report);
      ordered_json config;
      config["n"] = sim_n;
      config["seed"] = sim_seed;
      config["u"] = {ranges.u_min, ranges.u_max};
      config["v_pos"] = {ranges.v_pos_min, ranges.v_pos_max};
      config["v_neg"] = {ranges.v_neg_min, ranges.v_neg_max};
      emit_manifest("simulate", {}, config, primary, timer, sim_manifest);
      return kExitOk;
    }

    if (*report_cmd) {
      const auto items = read_protocol_jsonl(report_protocol);
      if (int rc = require_valid(items); rc != kExitOk) return rc;
      const auto preds = read_predictions_jsonl(report_preds);
      const auto verified = read_verified_jsonl(report_verified);
      const auto verified_preds = predictions_from_verified(preds, verified);
      const NegationLexicon lexicon = resolve_lexicon(report_lexicon);

      AuditReport audit;
      audit.base = score(items, preds, lexicon);
      audit.verified = score(items, verified_preds, lexicon);
      audit.delta = diff(items, preds, verified);
      if (report_with_stats) {
        ResampleConfig cfg;
        cfg.n_resamples = report_resamples;
        cfg.seed = report_seed;
        audit.stats = compute_stats(items, preds, verified, cfg,
                                    ResampleMethod::kExample);
      }
      write_text_atomic(report_out, render_markdown(audit));
      if (!report_json_out.empty())
        write_json_atomic(report_json_out, to_json(audit));
      std::cout << render_markdown(audit);
      ordered_json config;
      config["lexicon"] = lexicon.name;
      config["stats"] = report_with_stats;
      emit_manifest("report", {report_protocol, report_preds, report_verified},
                    config, report_out, timer, report_manifest);
      return kExitOk;
    }

    if (*lexicon_cmd) {
      if (lexicon_name != "original" && lexicon_name != "extended") {
        std::cerr << "error: --name must be original or extended\n";
        return kExitIoError;
      }
      const ordered_json j = to_json(resolve_lexicon(lexicon_name));
      if (lexicon_out.empty())
        std::cout << j.dump(2) << "\n";
      else
        write_json_atomic(lexicon_out, j);
      return kExitOk;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitIoError;
  }
  return kExitOk;
}
