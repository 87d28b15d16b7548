#pragma once

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "negaudit/model.hpp"

namespace negaudit {

// One negated-option template. The template contains exactly one "{X}"
// placeholder, e.g. "no {X}" or "{X} is not present".
struct NegationPattern {
  std::string pattern_id;
  std::string template_text;

  bool operator==(const NegationPattern&) const = default;
};

// Deterministic cue tables for question polarity and option parsing.
// Immutable after construction; every operation on it is pure.
struct NegationLexicon {
  std::string name;
  std::vector<std::string> question_absence_cues;   // lowercase phrases
  std::vector<std::string> question_presence_cues;  // lowercase phrases
  std::vector<NegationPattern> option_negation_patterns;  // tried in order
  std::map<std::string, std::string> concept_synonyms;    // empty by default

  bool operator==(const NegationLexicon&) const = default;
};

// Built-in lexicons. "original" knows only the canonical "no {X}" surface and
// the literal absence cue words; "extended" is a strict superset covering the
// paraphrase set (absence of / not present / no evidence of / clear of) on
// both the question and option side.
const NegationLexicon& original_lexicon();
const NegationLexicon& extended_lexicon();

// Throws std::invalid_argument when pattern ids collide, a template does not
// contain exactly one "{X}", or a cue is not lowercase.
void validate_lexicon(const NegationLexicon& lexicon);

enum class PolarityClass { kAbsence, kPresence, kUnknown };

std::string_view to_string(PolarityClass c);

// Lowercases, collapses internal whitespace, trims, and strips trailing
// punctuation. All cue and template matching runs on canonicalized text.
std::string canonicalize(std::string_view text);

// ABSENCE iff at least one absence cue matches and no presence cue matches;
// PRESENCE symmetric; UNKNOWN otherwise. Matching is case-insensitive
// whole-phrase. A presence cue nested inside an absence-cue span does not
// count ("not present" must not also fire "present"). Hedged comparative
// questions ("least", "unlikely") are always UNKNOWN: the verifier must
// refuse them rather than guess.
PolarityClass classify_question(std::string_view question,
                                const NegationLexicon& lexicon);

// Tries option_negation_patterns in order against the canonicalized text,
// anchored full-string. First match wins: polarity NEG, concept = the
// canonicalized capture (through the synonym table), pattern id recorded.
// No match: polarity POS, concept = the canonicalized full text.
AnswerOption parse_option(std::string_view text,
                          const NegationLexicon& lexicon);

// Index of the unique positive option sharing the negated option's concept,
// or nullopt when none or several exist. Throws std::invalid_argument if
// options[negated_index] is not NEG.
std::optional<int> find_positive_counterpart(
    const std::vector<AnswerOption>& options, int negated_index);

// Renders a concept through a pattern for display: placeholder substitution
// plus an uppercased first letter ("no {X}" + "edema" -> "No edema").
std::string render_negated(const NegationPattern& pattern,
                           std::string_view concept_name);

// Display form of a positive option ("pleural effusion" -> "Pleural effusion").
std::string render_positive(std::string_view concept_name);

}  // namespace negaudit
