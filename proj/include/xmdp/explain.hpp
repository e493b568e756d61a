#pragma once

#include "xmdp/alternatives.hpp"

#include <optional>
#include <span>
#include <string>
#include <vector>

namespace xmdp::expl {

/// Quantities render at one decimal with a trimmed trailing zero, matching
/// the wording of the explanation templates ("0.8", "10", "5").
std::string format_quantity(double value);

/// Editable template strings keyed by purpose and QA kind. Placeholders in
/// braces are filled from the vocabulary and the computed quantities.
struct TemplateSet {
    std::map<std::string, std::string> strings;

    static TemplateSet defaults();
    const std::string& at(const std::string& key) const;

    std::string to_json() const;
    static TemplateSet from_json(const std::string& text); // overrides on defaults
};

/// Fills {name} placeholders; unknown placeholders are an error.
std::string fill_template(const std::string& tmpl,
                          const std::map<std::string, std::string>& slots);

enum class VerdictKind { BestPossible, TradedOff };

struct TradeoffQa {
    std::string qa;
    double amount = 0.0;
};

struct TradeoffRecord {
    int altIndex = -1;     // into the alternatives list handed to the renderer
    std::string targetQa;
    std::vector<TradeoffQa> improved;
    std::vector<TradeoffQa> worsened;
    std::string paragraph; // the filled contrastive template
};

struct QaVerdict {
    std::string qa;
    VerdictKind kind = VerdictKind::BestPossible;
    std::optional<int> altIndex; // TradedOff with a presented alternative
    std::string sentence;        // best-possible or no-alternative line
};

struct Explanation {
    std::vector<std::string> objectiveLines;
    std::vector<std::string> consequenceLines;
    std::vector<QaVerdict> verdicts;      // one per QA, declaration order
    std::vector<TradeoffRecord> tradeoffs; // one per presented alternative
    std::string text;                      // full rendered explanation
};

/// One objective line per QA ("minimize the expected number of collisions").
/// Throws MissingVocabulary when a QA has no usable vocabulary entry.
std::vector<std::string> describe_objectives(const std::vector<QaSpec>& qas,
                                             const Vocabulary& vocab,
                                             const TemplateSet& templates = TemplateSet::defaults());

/// One consequence line per QA; non-standard QAs render their event counts
/// qualitatively with zero-count labels omitted.
std::vector<std::string> describe_valuation(const std::vector<QaSpec>& qas,
                                            const PolicyValuation& valuation,
                                            const Vocabulary& vocab,
                                            const TemplateSet& templates = TemplateSet::defaults());

/// Assembles the full contrastive explanation: objectives, consequences, a
/// verdict per QA (best possible vs. traded off) and one contrastive
/// paragraph per alternative, in QA declaration order.
Explanation render_contrastive(const ExplicitMdp& mdp, const PolicyValuation& solutionValuation,
                               std::span<const double> lowerBounds,
                               const std::vector<alt::AlternativeResult>& alternatives,
                               const Vocabulary& vocab,
                               const TemplateSet& templates = TemplateSet::defaults());

/// GraphViz rendering of a policy's reachable transitions.
std::string policy_dot(const ExplicitMdp& mdp, const Policy& policy, const std::string& label);

} // namespace xmdp::expl
