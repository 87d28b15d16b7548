#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "negaudit/builder.hpp"
#include "negaudit/lexicon.hpp"
#include "negaudit/metrics.hpp"
#include "negaudit/model.hpp"
#include "negaudit/simulator.hpp"
#include "negaudit/stats.hpp"
#include "negaudit/verifier.hpp"

namespace negaudit {

using ordered_json = nlohmann::ordered_json;

// JSON views. Unknown input fields ride along in extra_fields and are echoed
// back on write, after the known keys.
ordered_json to_json(const AnswerOption& o);
ordered_json to_json(const ProtocolItem& item);
ordered_json to_json(const PredictionRecord& pred);
ordered_json to_json(const VerifiedPrediction& v);
ordered_json to_json(const NegationLexicon& lexicon);
ordered_json to_json(const ValidationReport& report);
ordered_json to_json(const MetricCounts& c);
ordered_json to_json(const MetricsReport& report);
ordered_json to_json(const DiffReport& report);
ordered_json to_json(const GapSummary& summary);
ordered_json to_json(const IntervalResult& r);
ordered_json to_json(const BuildReport& r);
ordered_json to_json(const VerifierConfig& cfg);
ordered_json to_json(const TriggerSummary& summary, const VerifierConfig& cfg);

ProtocolItem protocol_item_from_json(const ordered_json& j);
PredictionRecord prediction_from_json(const ordered_json& j);
VerifiedPrediction verified_from_json(const ordered_json& j);
NegationLexicon lexicon_from_json(const ordered_json& j);

// JSONL files: one UTF-8 JSON object per line. Parse errors report the
// offending line number. All writers are atomic (temp file + rename).
std::vector<ProtocolItem> read_protocol_jsonl(const std::filesystem::path& p);
std::vector<PredictionRecord> read_predictions_jsonl(
    const std::filesystem::path& p);
std::vector<VerifiedPrediction> read_verified_jsonl(
    const std::filesystem::path& p);
void write_protocol_jsonl(const std::filesystem::path& p,
                          std::span<const ProtocolItem> items);
void write_predictions_jsonl(const std::filesystem::path& p,
                             std::span<const PredictionRecord> preds);
void write_verified_jsonl(const std::filesystem::path& p,
                          std::span<const VerifiedPrediction> verified);

NegationLexicon read_lexicon_json(const std::filesystem::path& p);
void write_lexicon_json(const std::filesystem::path& p,
                        const NegationLexicon& lexicon);

// "original" / "extended", or a path to a lexicon JSON file.
NegationLexicon resolve_lexicon(const std::string& name_or_path);

struct LoadedLabelTable {
  LabelTable table;
  std::vector<std::string> header_vocabulary;  // CSV column order; empty for JSONL
};

// CSV form: header "study_id,image_refs,<finding>..." with image refs
// semicolon-joined and numeric labels 1.0 / 0.0 / -1.0 / blank. Rows sharing
// a study_id merge their image refs; conflicting labels are a hard error.
// Any other extension is read as JSONL rows {study_id, image_refs, labels}.
LoadedLabelTable read_label_table(const std::filesystem::path& p);

void write_text_atomic(const std::filesystem::path& p,
                       const std::string& content);
void write_json_atomic(const std::filesystem::path& p, const ordered_json& j);

struct RunManifest {
  std::string subcommand;
  std::vector<std::string> input_paths;
  ordered_json config_echo;
  std::string tool_version;
  std::int64_t wall_time_ms = 0;
};

void write_manifest(const std::filesystem::path& p, const RunManifest& m);

}  // namespace negaudit
