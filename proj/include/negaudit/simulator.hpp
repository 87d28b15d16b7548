#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "negaudit/model.hpp"
#include "negaudit/verifier.hpp"

namespace negaudit {

struct PolarityResiduals {
  double pos = 0.0;
  double neg = 0.0;
};

// Additive option scorer: score(o) = u[concept] + v[concept, polarity].
// u is the concept-support term, v the polarity residual. Entries are never
// defaulted; a missing concept is a hard error naming it.
struct ScoreModel {
  std::map<std::string, double> concept_support;            // u
  std::map<std::string, PolarityResiduals> polarity_residual;  // v

  double support(const std::string& concept_name) const;
  double residual(const std::string& concept_name, Polarity p) const;
};

double score_option(const ScoreModel& model, const AnswerOption& option);

// Argmax over option scores; ties break to the lowest index.
int predict(const ScoreModel& model, const ProtocolItem& item);

struct Prop1Result {
  bool assumptions_hold = false;
  bool conclusion_holds = false;
};

// Concept preservation with within-concept polarity bias: if the
// concept-matched pair outranks every distractor and the negative residual
// exceeds the positive one, the prediction must be the negated option.
// Requires an item whose unique positive counterpart is the gold answer.
Prop1Result check_proposition_1(const ScoreModel& model,
                                const ProtocolItem& item);

// Auditability biconditional: the prediction is the negated option iff its
// concept matches gold and its polarity differs. Returns whether the
// biconditional held.
bool check_proposition_2(const ScoreModel& model, const ProtocolItem& item);

struct SimRanges {
  double u_min = 0.0, u_max = 8.0;
  double v_pos_min = 0.0, v_pos_max = 1.0;
  double v_neg_min = 0.0, v_neg_max = 2.0;
};

struct SimInstance {
  ScoreModel model;
  ProtocolItem item;
  PredictionRecord prediction;
};

// Seeded random three-to-five-option items whose negated option has a unique
// positive counterpart equal to gold. Predictions come from predict();
// option_logprobs are the scores shifted by log-sum-exp, so score gaps and
// logprob gaps coincide. Deterministic given (seed, n, ranges).
std::vector<SimInstance> generate_instances(std::uint64_t seed, int n,
                                            const SimRanges& ranges);

struct SafeSubsetReport {
  int n = 0;
  int triggered = 0;
  int base_wrong = 0;
  bool exact_on_triggered = true;   // every triggered final equals gold
  bool unchanged_outside = true;    // every non-triggered final equals base
  bool harm_empty = true;           // no item goes right -> wrong
  bool delta_identity = true;       // corrected == triggered-and-base-wrong
  std::vector<std::string> failures;  // item ids of violated assertions

  bool ok() const {
    return exact_on_triggered && unchanged_outside && harm_empty &&
           delta_identity;
  }
};

// Runs the verifier over generated instances and checks the repair
// identities: exactness on the triggered subset, identity outside it, an
// empty harm set, and the exact accuracy-delta bookkeeping.
SafeSubsetReport check_safe_subset(std::span<const SimInstance> instances,
                                   const VerifierConfig& cfg);

}  // namespace negaudit
