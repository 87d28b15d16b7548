#include "negaudit/io.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

namespace negaudit {

namespace {

ordered_json parse_extra(const std::string& extra_fields) {
  if (extra_fields.empty()) return ordered_json::object();
  return ordered_json::parse(extra_fields);
}

// Serializes the unknown keys of `j` (relative order preserved) so they can
// be echoed back on write.
std::string collect_extra(const ordered_json& j,
                          std::initializer_list<const char*> known) {
  ordered_json extra = ordered_json::object();
  for (auto it = j.begin(); it != j.end(); ++it) {
    bool is_known = false;
    for (const char* k : known)
      if (it.key() == k) {
        is_known = true;
        break;
      }
    if (!is_known) extra[it.key()] = it.value();
  }
  return extra.empty() ? std::string() : extra.dump();
}

void append_extra(ordered_json& j, const std::string& extra_fields) {
  if (extra_fields.empty()) return;
  const ordered_json extra = parse_extra(extra_fields);
  for (const auto& [key, value] : extra.items()) j[key] = value;
}

template <typename T, typename Parser>
std::vector<T> read_jsonl(const std::filesystem::path& path, Parser parse) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::vector<T> out;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    try {
      out.push_back(parse(ordered_json::parse(line)));
    } catch (const std::exception& e) {
      throw std::runtime_error(path.string() + ":" + std::to_string(line_no) +
                               ": " + e.what());
    }
  }
  return out;
}

template <typename T, typename Dumper>
void write_jsonl(const std::filesystem::path& path, std::span<const T> records,
                 Dumper dump) {
  std::string content;
  for (const auto& r : records) {
    content += dump(r).dump();
    content += '\n';
  }
  write_text_atomic(path, content);
}

}  // namespace

void write_text_atomic(const std::filesystem::path& path,
                       const std::string& content) {
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + tmp.string());
    out << content;
    if (!out) throw std::runtime_error("write failed: " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

void write_json_atomic(const std::filesystem::path& path,
                       const ordered_json& j) {
  write_text_atomic(path, j.dump(2) + "\n");
}

ordered_json to_json(const AnswerOption& o) {
  ordered_json j;
  j["text"] = o.surface_text;
  j["concept"] = o.concept_name;
  j["polarity"] = to_string(o.polarity);
  if (o.lexicon_pattern_id) j["pattern_id"] = *o.lexicon_pattern_id;
  return j;
}

ordered_json to_json(const ProtocolItem& item) {
  ordered_json j;
  j["item_id"] = item.item_id;
  j["study_id"] = item.study_id;
  j["image_refs"] = item.image_refs;
  j["question"] = item.question;
  ordered_json options = ordered_json::array();
  for (const auto& o : item.options) options.push_back(to_json(o));
  j["options"] = std::move(options);
  j["gold_index"] = item.gold_index;
  j["protocol_kind"] = to_string(item.protocol_kind);
  j["target_finding"] = item.target_finding;
  j["variant_tag"] = item.variant_tag;
  append_extra(j, item.extra_fields);
  return j;
}

ProtocolItem protocol_item_from_json(const ordered_json& j) {
  ProtocolItem item;
  item.item_id = j.at("item_id").get<std::string>();
  item.study_id = j.at("study_id").get<std::string>();
  item.image_refs = j.at("image_refs").get<std::vector<std::string>>();
  item.question = j.at("question").get<std::string>();
  for (const auto& oj : j.at("options")) {
    AnswerOption o;
    o.surface_text = oj.at("text").get<std::string>();
    o.concept_name = oj.at("concept").get<std::string>();
    o.polarity = polarity_from_string(oj.at("polarity").get<std::string>());
    if (oj.contains("pattern_id"))
      o.lexicon_pattern_id = oj.at("pattern_id").get<std::string>();
    item.options.push_back(std::move(o));
  }
  item.gold_index = j.at("gold_index").get<int>();
  item.protocol_kind =
      protocol_kind_from_string(j.at("protocol_kind").get<std::string>());
  item.target_finding = j.at("target_finding").get<std::string>();
  item.variant_tag = j.at("variant_tag").get<std::string>();
  item.extra_fields = collect_extra(
      j, {"item_id", "study_id", "image_refs", "question", "options",
          "gold_index", "protocol_kind", "target_finding", "variant_tag"});
  return item;
}

ordered_json to_json(const PredictionRecord& pred) {
  ordered_json j;
  j["item_id"] = pred.item_id;
  j["choice_index"] = pred.choice_index;
  if (pred.base_confidence) j["base_confidence"] = *pred.base_confidence;
  if (pred.packet_choice_index)
    j["packet_choice_index"] = *pred.packet_choice_index;
  if (pred.packet_confidence) j["packet_confidence"] = *pred.packet_confidence;
  if (pred.option_logprobs) j["option_logprobs"] = *pred.option_logprobs;
  append_extra(j, pred.extra_fields);
  return j;
}

PredictionRecord prediction_from_json(const ordered_json& j) {
  PredictionRecord pred;
  pred.item_id = j.at("item_id").get<std::string>();
  pred.choice_index = j.at("choice_index").get<int>();
  if (j.contains("base_confidence") && !j.at("base_confidence").is_null())
    pred.base_confidence = j.at("base_confidence").get<double>();
  if (j.contains("packet_choice_index") &&
      !j.at("packet_choice_index").is_null())
    pred.packet_choice_index = j.at("packet_choice_index").get<int>();
  if (j.contains("packet_confidence") && !j.at("packet_confidence").is_null())
    pred.packet_confidence = j.at("packet_confidence").get<double>();
  if (j.contains("option_logprobs") && !j.at("option_logprobs").is_null())
    pred.option_logprobs = j.at("option_logprobs").get<std::vector<double>>();
  pred.extra_fields = collect_extra(
      j, {"item_id", "choice_index", "base_confidence", "packet_choice_index",
          "packet_confidence", "option_logprobs"});
  return pred;
}

ordered_json to_json(const VerifiedPrediction& v) {
  ordered_json j;
  j["item_id"] = v.item_id;
  j["base_index"] = v.base_index;
  j["final_index"] = v.final_index;
  j["triggered"] = v.triggered;
  j["reason"] = to_string(v.reason);
  return j;
}

VerifiedPrediction verified_from_json(const ordered_json& j) {
  VerifiedPrediction v;
  v.item_id = j.at("item_id").get<std::string>();
  v.base_index = j.at("base_index").get<int>();
  v.final_index = j.at("final_index").get<int>();
  v.triggered = j.at("triggered").get<bool>();
  v.reason = verify_reason_from_string(j.at("reason").get<std::string>());
  return v;
}

ordered_json to_json(const NegationLexicon& lexicon) {
  ordered_json j;
  j["name"] = lexicon.name;
  j["question_absence_cues"] = lexicon.question_absence_cues;
  j["question_presence_cues"] = lexicon.question_presence_cues;
  ordered_json patterns = ordered_json::array();
  for (const auto& p : lexicon.option_negation_patterns)
    patterns.push_back({{"pattern_id", p.pattern_id},
                        {"template", p.template_text}});
  j["option_negation_patterns"] = std::move(patterns);
  j["concept_synonyms"] = lexicon.concept_synonyms;
  return j;
}

NegationLexicon lexicon_from_json(const ordered_json& j) {
  NegationLexicon lexicon;
  lexicon.name = j.at("name").get<std::string>();
  lexicon.question_absence_cues =
      j.at("question_absence_cues").get<std::vector<std::string>>();
  lexicon.question_presence_cues =
      j.at("question_presence_cues").get<std::vector<std::string>>();
  for (const auto& pj : j.at("option_negation_patterns"))
    lexicon.option_negation_patterns.push_back(
        {pj.at("pattern_id").get<std::string>(),
         pj.at("template").get<std::string>()});
  if (j.contains("concept_synonyms"))
    lexicon.concept_synonyms =
        j.at("concept_synonyms").get<std::map<std::string, std::string>>();
  validate_lexicon(lexicon);
  return lexicon;
}

ordered_json to_json(const ValidationReport& report) {
  auto entries = [](const std::vector<Violation>& list) {
    ordered_json arr = ordered_json::array();
    for (const auto& v : list)
      arr.push_back({{"item_id", v.item_id}, {"message", v.message}});
    return arr;
  };
  ordered_json j;
  j["ok"] = report.ok();
  j["errors"] = entries(report.errors);
  j["warnings"] = entries(report.warnings);
  return j;
}

ordered_json to_json(const MetricCounts& c) {
  ordered_json j;
  j["n"] = c.n;
  j["correct"] = c.correct;
  j["accuracy_pct"] = c.n == 0 ? ordered_json() : ordered_json(c.accuracy_pct());
  j["contradictions"] = c.contradictions;
  j["presence_reversals"] = c.presence_reversals;
  j["wrong_with_negation"] = c.wrong_with_negation;
  j["repairable_reversals"] = c.repairable_reversals;
  return j;
}

ordered_json to_json(const MetricsReport& report) {
  ordered_json j;
  j["overall"] = to_json(report.overall);
  ordered_json findings = ordered_json::object();
  for (const auto& [finding, counts] : report.per_finding)
    findings[finding] = to_json(counts);
  j["per_finding"] = std::move(findings);
  j["question_polarity_split"] = {
      {"ABSENCE", to_json(report.absence_questions)},
      {"PRESENCE", to_json(report.presence_questions)}};
  return j;
}

ordered_json to_json(const DiffReport& report) {
  ordered_json j;
  j["n"] = report.n;
  j["changed"] = report.changed;
  j["improved"] = report.improved;
  j["worsened"] = report.worsened;
  j["changed_still_wrong"] = report.changed_still_wrong;
  j["triggered"] = report.triggered;
  j["base_correct"] = report.base_correct;
  j["verified_correct"] = report.verified_correct;
  j["coverage_pct"] = round_pct(report.coverage_pct());
  j["delta_pp"] = round_pct(report.delta_pp());
  j["worsened_item_ids"] = report.worsened_item_ids;
  return j;
}

ordered_json to_json(const GapSummary& summary) {
  ordered_json j;
  j["n"] = summary.n;
  j["skipped"] = summary.skipped;
  if (summary.n > 0) {
    j["mean"] = summary.mean;
    j["min"] = summary.min;
    j["q25"] = summary.q25;
    j["median"] = summary.median;
    j["q75"] = summary.q75;
    j["max"] = summary.max;
  }
  return j;
}

ordered_json to_json(const IntervalResult& r) {
  ordered_json j;
  j["point"] = r.point;
  j["ci_low"] = r.low;
  j["ci_high"] = r.high;
  j["n_resamples"] = r.n_resamples_used;
  j["method"] = to_string(r.method);
  j["statistic"] = to_string(r.statistic);
  j["seed"] = r.seed;
  return j;
}

ordered_json to_json(const BuildReport& r) {
  ordered_json j;
  j["n_records"] = r.n_records;
  j["n_studies"] = r.n_studies;
  j["records_per_study"] = r.records_per_study;
  j["per_finding"] = r.per_finding;
  j["records_per_kind"] = r.records_per_kind;
  return j;
}

ordered_json to_json(const VerifierConfig& cfg) {
  ordered_json j;
  j["lexicon"] = to_json(cfg.lexicon);
  j["slot_mode"] = to_string(cfg.slot_mode);
  j["y0_enabled"] = cfg.y0_enabled;
  j["y0_confidence_ceiling"] = cfg.y0_confidence_ceiling;
  j["y0_margin"] = cfg.y0_margin;
  return j;
}

ordered_json to_json(const TriggerSummary& summary,
                     const VerifierConfig& cfg) {
  ordered_json counts = ordered_json::object();
  for (const auto& [reason, count] : summary.reason_counts)
    counts[std::string(to_string(reason))] = count;
  ordered_json j;
  j["n"] = summary.n;
  j["triggered"] = summary.triggered;
  j["coverage_pct"] = round_pct(summary.coverage_pct());
  j["reason_counts"] = std::move(counts);
  j["repairs_by_pattern"] = summary.repairs_by_pattern;
  j["warnings"] = summary.warnings;
  // Coverage depends on which surface patterns the active lexicon can parse;
  // repairs_by_pattern records what actually fired so coverage differences
  // between lexicons stay visible in the report.
  j["coverage_note"] =
      "trigger coverage is surface-pattern dependent; see repairs_by_pattern "
      "for the patterns that fired under lexicon '" + cfg.lexicon.name + "'";
  j["config_echo"] = to_json(cfg);
  return j;
}

std::vector<ProtocolItem> read_protocol_jsonl(const std::filesystem::path& p) {
  return read_jsonl<ProtocolItem>(p, protocol_item_from_json);
}

std::vector<PredictionRecord> read_predictions_jsonl(
    const std::filesystem::path& p) {
  return read_jsonl<PredictionRecord>(p, prediction_from_json);
}

std::vector<VerifiedPrediction> read_verified_jsonl(
    const std::filesystem::path& p) {
  return read_jsonl<VerifiedPrediction>(p, verified_from_json);
}

void write_protocol_jsonl(const std::filesystem::path& p,
                          std::span<const ProtocolItem> items) {
  write_jsonl(p, items, [](const ProtocolItem& i) { return to_json(i); });
}

void write_predictions_jsonl(const std::filesystem::path& p,
                             std::span<const PredictionRecord> preds) {
  write_jsonl(p, preds, [](const PredictionRecord& r) { return to_json(r); });
}

void write_verified_jsonl(const std::filesystem::path& p,
                          std::span<const VerifiedPrediction> verified) {
  write_jsonl(p, verified,
              [](const VerifiedPrediction& v) { return to_json(v); });
}

NegationLexicon read_lexicon_json(const std::filesystem::path& p) {
  std::ifstream in(p);
  if (!in) throw std::runtime_error("cannot open " + p.string());
  ordered_json j;
  in >> j;
  return lexicon_from_json(j);
}

void write_lexicon_json(const std::filesystem::path& p,
                        const NegationLexicon& lexicon) {
  write_json_atomic(p, to_json(lexicon));
}

NegationLexicon resolve_lexicon(const std::string& name_or_path) {
  if (name_or_path == "original") return original_lexicon();
  if (name_or_path == "extended") return extended_lexicon();
  return read_lexicon_json(name_or_path);
}

namespace {

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> fields;
  std::string field;
  std::istringstream stream(line);
  while (std::getline(stream, field, sep)) fields.push_back(field);
  if (!line.empty() && line.back() == sep) fields.push_back("");
  return fields;
}

std::string strip(std::string s) {
  while (!s.empty() && (s.back() == '\r' || s.back() == ' ')) s.pop_back();
  size_t start = 0;
  while (start < s.size() && s[start] == ' ') ++start;
  return s.substr(start);
}

FindingLabel label_from_csv(const std::string& cell) {
  const std::string value = strip(cell);
  if (value.empty()) return FindingLabel::kUnmentioned;
  if (value == "1" || value == "1.0") return FindingLabel::kPresent;
  if (value == "0" || value == "0.0") return FindingLabel::kAbsent;
  if (value == "-1" || value == "-1.0") return FindingLabel::kUncertain;
  throw std::runtime_error("unrecognized label cell '" + value + "'");
}

LoadedLabelTable read_label_table_csv(const std::filesystem::path& p) {
  std::ifstream in(p);
  if (!in) throw std::runtime_error("cannot open " + p.string());
  std::string line;
  if (!std::getline(in, line))
    throw std::runtime_error("empty label table: " + p.string());

  auto header = split(line, ',');
  for (auto& h : header) h = strip(h);
  if (header.size() < 3 || header[0] != "study_id" || header[1] != "image_refs")
    throw std::runtime_error(
        "label CSV header must start with study_id,image_refs: " + p.string());

  LoadedLabelTable loaded;
  loaded.header_vocabulary.assign(header.begin() + 2, header.end());

  std::map<std::string, size_t> row_index;
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (strip(line).empty()) continue;
    auto cells = split(line, ',');
    if (cells.size() != header.size())
      throw std::runtime_error(p.string() + ":" + std::to_string(line_no) +
                               ": expected " + std::to_string(header.size()) +
                               " cells, found " + std::to_string(cells.size()));
    const std::string study_id = strip(cells[0]);
    std::vector<std::string> refs;
    for (const auto& ref : split(strip(cells[1]), ';'))
      if (!ref.empty()) refs.push_back(ref);

    std::map<std::string, FindingLabel> labels;
    for (size_t c = 2; c < cells.size(); ++c) {
      try {
        labels[header[c]] = label_from_csv(cells[c]);
      } catch (const std::exception& e) {
        throw std::runtime_error(p.string() + ":" + std::to_string(line_no) +
                                 ": " + e.what());
      }
    }

    auto it = row_index.find(study_id);
    if (it == row_index.end()) {
      row_index.emplace(study_id, loaded.table.rows.size());
      loaded.table.rows.push_back({study_id, std::move(refs), std::move(labels)});
    } else {
      // Additional views of the same study: refs merge, labels must agree.
      LabelRow& row = loaded.table.rows[it->second];
      for (auto& ref : refs) row.image_refs.push_back(std::move(ref));
      if (row.labels != labels)
        throw std::runtime_error(p.string() + ":" + std::to_string(line_no) +
                                 ": conflicting labels for study " + study_id);
    }
  }
  return loaded;
}

LoadedLabelTable read_label_table_jsonl(const std::filesystem::path& p) {
  LoadedLabelTable loaded;
  loaded.table.rows = read_jsonl<LabelRow>(p, [](const ordered_json& j) {
    LabelRow row;
    row.study_id = j.at("study_id").get<std::string>();
    row.image_refs = j.at("image_refs").get<std::vector<std::string>>();
    for (auto& [finding, value] : j.at("labels").items())
      row.labels[finding] =
          finding_label_from_string(value.get<std::string>());
    return row;
  });
  return loaded;
}

}  // namespace

LoadedLabelTable read_label_table(const std::filesystem::path& p) {
  return p.extension() == ".csv" ? read_label_table_csv(p)
                                 : read_label_table_jsonl(p);
}

void write_manifest(const std::filesystem::path& p, const RunManifest& m) {
  ordered_json j;
  j["subcommand"] = m.subcommand;
  j["input_paths"] = m.input_paths;
  j["config_echo"] = m.config_echo;
  j["tool_version"] = m.tool_version;
  j["wall_time_ms"] = m.wall_time_ms;
  write_json_atomic(p, j);
}

}  // namespace negaudit
