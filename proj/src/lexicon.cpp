#include "negaudit/lexicon.hpp"

#include <algorithm>
#include <cctype>
#include <set>
#include <stdexcept>

namespace negaudit {

namespace {

constexpr std::string_view kPlaceholder = "{X}";

bool is_word_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) != 0;
}

// Occurrences of `cue` in `text` at phrase boundaries (non-word or edge on
// both sides). Returns (begin, end) spans.
std::vector<std::pair<size_t, size_t>> phrase_spans(std::string_view text,
                                                    std::string_view cue) {
  std::vector<std::pair<size_t, size_t>> spans;
  if (cue.empty()) return spans;
  size_t pos = 0;
  while ((pos = text.find(cue, pos)) != std::string_view::npos) {
    const size_t end = pos + cue.size();
    const bool left_ok = pos == 0 || !is_word_char(text[pos - 1]);
    const bool right_ok = end == text.size() || !is_word_char(text[end]);
    if (left_ok && right_ok) spans.emplace_back(pos, end);
    ++pos;
  }
  return spans;
}

bool contains_word(std::string_view text, std::string_view word) {
  return !phrase_spans(text, word).empty();
}

struct SplitTemplate {
  std::string prefix;
  std::string suffix;
};

SplitTemplate split_template(const std::string& template_text) {
  const size_t at = template_text.find(kPlaceholder);
  if (at == std::string::npos)
    throw std::invalid_argument("template lacks {X}: " + template_text);
  return {template_text.substr(0, at),
          template_text.substr(at + kPlaceholder.size())};
}

}  // namespace

std::string_view to_string(PolarityClass c) {
  switch (c) {
    case PolarityClass::kAbsence: return "ABSENCE";
    case PolarityClass::kPresence: return "PRESENCE";
    case PolarityClass::kUnknown: return "UNKNOWN";
  }
  return "?";
}

std::string canonicalize(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  bool pending_space = false;
  for (char raw : text) {
    const auto c = static_cast<unsigned char>(raw);
    if (std::isspace(c)) {
      pending_space = !out.empty();
      continue;
    }
    if (pending_space) {
      out.push_back(' ');
      pending_space = false;
    }
    out.push_back(static_cast<char>(std::tolower(c)));
  }
  while (!out.empty()) {
    const char back = out.back();
    if (back == '.' || back == ',' || back == ';' || back == ':' ||
        back == '!' || back == '?' || back == ' ')
      out.pop_back();
    else
      break;
  }
  return out;
}

void validate_lexicon(const NegationLexicon& lexicon) {
  std::set<std::string> ids;
  for (const auto& p : lexicon.option_negation_patterns) {
    if (!ids.insert(p.pattern_id).second)
      throw std::invalid_argument("duplicate pattern_id: " + p.pattern_id);
    const size_t first = p.template_text.find(kPlaceholder);
    if (first == std::string::npos ||
        p.template_text.find(kPlaceholder, first + 1) != std::string::npos)
      throw std::invalid_argument("template must contain exactly one {X}: " +
                                  p.template_text);
  }
  auto check_lower = [](const std::vector<std::string>& cues) {
    for (const auto& cue : cues)
      if (cue != canonicalize(cue))
        throw std::invalid_argument("cue not canonical lowercase: " + cue);
  };
  check_lower(lexicon.question_absence_cues);
  check_lower(lexicon.question_presence_cues);
}

const NegationLexicon& original_lexicon() {
  static const NegationLexicon lex = [] {
    NegationLexicon l;
    l.name = "original";
    l.question_absence_cues = {"absent", "not present"};
    l.question_presence_cues = {"present"};
    l.option_negation_patterns = {{"canonical_no", "no {X}"}};
    validate_lexicon(l);
    return l;
  }();
  return lex;
}

const NegationLexicon& extended_lexicon() {
  static const NegationLexicon lex = [] {
    NegationLexicon l;
    l.name = "extended";
    l.question_absence_cues = {"absent",         "not present", "absence of",
                               "no evidence of", "clear of",    "free of"};
    l.question_presence_cues = {"present"};
    // Longer prefixes first so "no evidence of X" does not fall into "no {X}"
    // with a mangled concept.
    l.option_negation_patterns = {
        {"no_evidence_of", "no evidence of {X}"},
        {"canonical_no", "no {X}"},
        {"absence_of", "absence of {X}"},
        {"not_present", "{X} is not present"},
        {"clear_of", "clear of {X}"},
    };
    validate_lexicon(l);
    return l;
  }();
  return lex;
}

PolarityClass classify_question(std::string_view question,
                                const NegationLexicon& lexicon) {
  const std::string text = canonicalize(question);
  // Hedged comparatives are never safely classifiable.
  if (contains_word(text, "least") || contains_word(text, "unlikely"))
    return PolarityClass::kUnknown;

  std::vector<std::pair<size_t, size_t>> absence_spans;
  for (const auto& cue : lexicon.question_absence_cues)
    for (auto span : phrase_spans(text, cue)) absence_spans.push_back(span);

  bool presence_hit = false;
  for (const auto& cue : lexicon.question_presence_cues) {
    for (auto [b, e] : phrase_spans(text, cue)) {
      const bool inside_absence =
          std::any_of(absence_spans.begin(), absence_spans.end(),
                      [&](auto s) { return s.first <= b && e <= s.second; });
      if (!inside_absence) presence_hit = true;
    }
  }

  const bool absence_hit = !absence_spans.empty();
  if (absence_hit && !presence_hit) return PolarityClass::kAbsence;
  if (presence_hit && !absence_hit) return PolarityClass::kPresence;
  return PolarityClass::kUnknown;
}

AnswerOption parse_option(std::string_view text,
                          const NegationLexicon& lexicon) {
  const std::string canonical = canonicalize(text);
  AnswerOption option;
  option.surface_text = std::string(text);

  auto apply_synonym = [&](std::string concept_name) {
    auto it = lexicon.concept_synonyms.find(concept_name);
    return it == lexicon.concept_synonyms.end() ? concept_name : it->second;
  };

  for (const auto& pattern : lexicon.option_negation_patterns) {
    const auto [prefix, suffix] = split_template(pattern.template_text);
    if (canonical.size() <= prefix.size() + suffix.size()) continue;
    if (canonical.compare(0, prefix.size(), prefix) != 0) continue;
    if (!suffix.empty() &&
        canonical.compare(canonical.size() - suffix.size(), suffix.size(),
                          suffix) != 0)
      continue;
    const std::string captured = canonicalize(canonical.substr(
        prefix.size(), canonical.size() - prefix.size() - suffix.size()));
    if (captured.empty()) continue;
    option.concept_name = apply_synonym(captured);
    option.polarity = Polarity::kNeg;
    option.lexicon_pattern_id = pattern.pattern_id;
    return option;
  }

  option.concept_name = apply_synonym(canonical);
  option.polarity = Polarity::kPos;
  return option;
}

std::optional<int> find_positive_counterpart(
    const std::vector<AnswerOption>& options, int negated_index) {
  if (negated_index < 0 || negated_index >= static_cast<int>(options.size()) ||
      options[negated_index].polarity != Polarity::kNeg)
    throw std::invalid_argument(
        "find_positive_counterpart: negated_index does not name a NEG option");

  const std::string& concept_name = options[negated_index].concept_name;
  std::optional<int> found;
  for (int i = 0; i < static_cast<int>(options.size()); ++i) {
    if (i == negated_index) continue;
    if (options[i].polarity == Polarity::kPos &&
        options[i].concept_name == concept_name) {
      if (found) return std::nullopt;  // non-unique
      found = i;
    }
  }
  return found;
}

std::string render_negated(const NegationPattern& pattern,
                           std::string_view concept_name) {
  const auto [prefix, suffix] = split_template(pattern.template_text);
  std::string out = prefix;
  out += concept_name;
  out += suffix;
  for (char& c : out) {
    if (std::isalpha(static_cast<unsigned char>(c))) {
      c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
      break;
    }
  }
  return out;
}

std::string render_positive(std::string_view concept_name) {
  std::string out(concept_name);
  if (!out.empty())
    out.front() = static_cast<char>(
        std::toupper(static_cast<unsigned char>(out.front())));
  return out;
}

}  // namespace negaudit
