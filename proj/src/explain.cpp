#include "xmdp/explain.hpp"

#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <sstream>

namespace xmdp::expl {

namespace {

const char* kind_key(QaKind kind) {
    switch (kind) {
    case QaKind::EventCount: return "eventCount";
    case QaKind::Standard: return "standard";
    case QaKind::NonStandard: return "nonStandard";
    }
    return "standard";
}

const QaVocabulary& vocab_for(const Vocabulary& vocab, const QaSpec& qa) {
    auto it = vocab.find(qa.name);
    require(it != vocab.end(), Errc::MissingVocabulary,
            "no vocabulary entry for QA '" + qa.name + "'");
    switch (qa.kind) {
    case QaKind::EventCount:
        require(!it->second.eventNoun.plural.empty(), Errc::MissingVocabulary,
                "QA '" + qa.name + "' needs an event noun");
        break;
    case QaKind::Standard:
        require(!it->second.noun.empty() && !it->second.unit.plural.empty(),
                Errc::MissingVocabulary, "QA '" + qa.name + "' needs a noun and a unit");
        break;
    case QaKind::NonStandard:
        require(!it->second.noun.empty(), Errc::MissingVocabulary,
                "QA '" + qa.name + "' needs a noun");
        break;
    }
    return it->second;
}

std::string unit_text(const UnitText& unit, const std::string& formattedAmount) {
    return formattedAmount == "1" ? unit.singular : unit.plural;
}

/// "a", "a and b", "a, b and c"
std::string join_list(const std::vector<std::string>& items) {
    std::string out;
    for (size_t i = 0; i < items.size(); ++i) {
        if (i > 0) out += i + 1 == items.size() ? " and " : ", ";
        out += items[i];
    }
    return out;
}

std::string amount_with_unit(const QaSpec& qa, const QaVocabulary& v, double amount) {
    std::string formatted = format_quantity(amount);
    if (qa.kind == QaKind::Standard) return formatted + " " + unit_text(v.unit, formatted);
    return formatted;
}

} // namespace

std::string format_quantity(double value) {
    double rounded = std::round(value * 10.0) / 10.0;
    if (rounded == 0.0) rounded = 0.0; // normalize -0
    char buf[40];
    if (std::abs(rounded - std::round(rounded)) < 1e-9)
        std::snprintf(buf, sizeof(buf), "%.0f", rounded);
    else
        std::snprintf(buf, sizeof(buf), "%.1f", rounded);
    return buf;
}

TemplateSet TemplateSet::defaults() {
    TemplateSet t;
    t.strings = {
        {"objective.eventCount", "minimize the expected number of {eventNounPlural}"},
        {"objective.standard", "minimize the expected {noun}"},
        {"objective.nonStandard", "minimize the expected {noun}"},
        {"value.eventCount", "the expected number of {eventNounPlural} is {value}"},
        {"value.standard", "the expected {noun} is {value} {unit}"},
        {"value.nonStandard", "{subject} is expected to be {eventList}"},
        {"value.eventItem", "{label} at {count} {placeNoun}"},
        {"verdict.bestPossible",
         "The expected {noun} of my plan is already the best possible value."},
        {"verdict.bestPossibleCustom", "My plan {phrase}."},
        {"verdict.noAlternative",
         "I could not find an alternative policy that improves the expected {noun} enough to be "
         "worth presenting."},
        {"contrastive.paragraph",
         "I could {gains}, by carrying out the alternative policy shown below instead. However, "
         "this would {losses}. I decided not to do that because {gainsRestated} is not worth "
         "{lossesRestated}."},
        {"gain.standard", "reduce the expected {noun} by {amount}"},
        {"gain.eventCount", "reduce the expected number of {eventNounPlural} by {amount}"},
        {"gain.nonStandard", "reduce the expected {noun} penalty by {amount}"},
        {"loss.standard", "increase the expected {noun} by {amount}"},
        {"loss.eventCount", "increase the expected number of {eventNounPlural} by {amount}"},
        {"loss.nonStandard", "increase the expected {noun} penalty by {amount}"},
        {"restate.gain", "improving {noun} by {amount}"},
        {"restate.loss", "worsening {noun} by {amount}"},
        {"heading.objectives", "I am planning with these objectives:"},
        {"heading.consequences", "The expected consequences of my plan are:"},
        {"heading.alternative", "Alternative policy improving {noun}:"},
    };
    return t;
}

const std::string& TemplateSet::at(const std::string& key) const {
    auto it = strings.find(key);
    require(it != strings.end(), Errc::InvalidArgument, "unknown template key '" + key + "'");
    return it->second;
}

std::string TemplateSet::to_json() const {
    nlohmann::ordered_json j;
    for (const auto& [k, v] : strings) j[k] = v;
    return j.dump(2) + "\n";
}

TemplateSet TemplateSet::from_json(const std::string& text) {
    TemplateSet t = defaults();
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        fail(Errc::ParseError, std::string("template file: ") + e.what());
    }
    require(j.is_object(), Errc::ParseError, "template file must be a JSON object");
    for (const auto& [k, v] : j.items()) {
        require(v.is_string(), Errc::ParseError, "template '" + k + "' must be a string");
        t.strings[k] = v.get<std::string>();
    }
    return t;
}

std::string fill_template(const std::string& tmpl,
                          const std::map<std::string, std::string>& slots) {
    std::string out;
    out.reserve(tmpl.size());
    for (size_t i = 0; i < tmpl.size();) {
        if (tmpl[i] == '{') {
            size_t end = tmpl.find('}', i);
            require(end != std::string::npos, Errc::InvalidArgument,
                    "unterminated placeholder in template '" + tmpl + "'");
            std::string key = tmpl.substr(i + 1, end - i - 1);
            auto it = slots.find(key);
            require(it != slots.end(), Errc::InvalidArgument,
                    "template placeholder '" + key + "' has no value");
            out += it->second;
            i = end + 1;
        } else {
            out += tmpl[i++];
        }
    }
    return out;
}

namespace {

std::map<std::string, std::string> base_slots(const QaSpec& qa, const QaVocabulary& v) {
    return {
        {"noun", v.noun},
        {"eventNounPlural", v.eventNoun.plural},
        {"eventNounSingular", v.eventNoun.singular},
        {"subject", v.subject},
        {"unit", v.unit.plural},
    };
}

std::string gain_or_loss_phrase(const TemplateSet& templates, const char* which, const QaSpec& qa,
                                const QaVocabulary& v, double amount) {
    auto slots = base_slots(qa, v);
    std::string formatted = format_quantity(amount);
    slots["amount"] = qa.kind == QaKind::Standard ? formatted + " " + unit_text(v.unit, formatted)
                                                  : formatted;
    return fill_template(templates.at(std::string(which) + "." + kind_key(qa.kind)), slots);
}

std::string restate_phrase(const TemplateSet& templates, const char* which, const QaSpec& qa,
                           const QaVocabulary& v, double amount) {
    auto slots = base_slots(qa, v);
    std::string formatted = format_quantity(amount);
    slots["amount"] = qa.kind == QaKind::Standard ? formatted + " " + unit_text(v.unit, formatted)
                                                  : formatted;
    slots["noun"] = qa.kind == QaKind::EventCount ? v.eventNoun.plural : v.noun;
    return fill_template(templates.at(std::string("restate.") + which), slots);
}

} // namespace

std::vector<std::string> describe_objectives(const std::vector<QaSpec>& qas,
                                             const Vocabulary& vocab,
                                             const TemplateSet& templates) {
    std::vector<std::string> lines;
    for (const auto& qa : qas) {
        const QaVocabulary& v = vocab_for(vocab, qa);
        lines.push_back(
            fill_template(templates.at(std::string("objective.") + kind_key(qa.kind)),
                          base_slots(qa, v)));
    }
    return lines;
}

std::vector<std::string> describe_valuation(const std::vector<QaSpec>& qas,
                                            const PolicyValuation& valuation,
                                            const Vocabulary& vocab,
                                            const TemplateSet& templates) {
    std::vector<std::string> lines;
    for (size_t qi = 0; qi < qas.size(); ++qi) {
        const QaSpec& qa = qas[qi];
        const QaVocabulary& v = vocab_for(vocab, qa);
        auto slots = base_slots(qa, v);
        if (qa.kind == QaKind::NonStandard) {
            std::vector<std::string> items;
            for (const auto& e : qa.events) {
                auto it = valuation.eventCounts.find(e.name);
                double count = it == valuation.eventCounts.end() ? 0.0 : it->second;
                std::string formatted = format_quantity(count);
                if (formatted == "0") continue; // omit zero-count labels
                items.push_back(fill_template(
                    templates.at("value.eventItem"),
                    {{"label", e.label},
                     {"count", formatted},
                     {"placeNoun", unit_text(v.placeNoun, formatted)}}));
            }
            if (items.empty() && !qa.events.empty())
                items.push_back(fill_template(templates.at("value.eventItem"),
                                              {{"label", qa.events.front().label},
                                               {"count", "0"},
                                               {"placeNoun", v.placeNoun.plural}}));
            slots["eventList"] = join_list(items);
        } else {
            std::string formatted = format_quantity(valuation.qaValue[qi]);
            slots["value"] = formatted;
            slots["unit"] = unit_text(v.unit, formatted);
        }
        lines.push_back(
            fill_template(templates.at(std::string("value.") + kind_key(qa.kind)), slots));
    }
    return lines;
}

std::string policy_dot(const ExplicitMdp& mdp, const Policy& policy, const std::string& label) {
    std::ostringstream os;
    os << "digraph \"" << label << "\" {\n";
    os << "  rankdir=LR;\n  node [shape=box, fontsize=10];\n";
    for (int s = 0; s < mdp.state_count(); ++s) {
        if (!policy.reachable[static_cast<size_t>(s)]) continue;
        os << "  \"" << mdp.stateKeys[static_cast<size_t>(s)] << "\"";
        std::vector<std::string> attrs;
        if (mdp.totalCost && !mdp.goal.empty() && mdp.goal[static_cast<size_t>(s)])
            attrs.push_back("peripheries=2");
        if (mdp.totalCost && s == mdp.s0) attrs.push_back("penwidth=2");
        if (!attrs.empty()) {
            os << " [";
            for (size_t i = 0; i < attrs.size(); ++i) os << (i ? ", " : "") << attrs[i];
            os << "]";
        }
        os << ";\n";
    }
    for (int s = 0; s < mdp.state_count(); ++s) {
        if (!policy.reachable[static_cast<size_t>(s)]) continue;
        int slot = policy.choice[static_cast<size_t>(s)];
        if (slot < 0) continue;
        const ExplicitAction& ea = mdp.acts[static_cast<size_t>(s)][static_cast<size_t>(slot)];
        for (const auto& [t, prob] : ea.succ) {
            if (prob <= 0.0) continue;
            os << "  \"" << mdp.stateKeys[static_cast<size_t>(s)] << "\" -> \""
               << mdp.stateKeys[static_cast<size_t>(t)] << "\" [label=\"" << mdp.action_name(s, slot);
            if (prob < 1.0) os << " (p=" << format_quantity(prob * 10.0) << "/10)";
            os << "\"];\n";
        }
    }
    os << "}\n";
    return os.str();
}

Explanation render_contrastive(const ExplicitMdp& mdp, const PolicyValuation& solutionValuation,
                               std::span<const double> lowerBounds,
                               const std::vector<alt::AlternativeResult>& alternatives,
                               const Vocabulary& vocab, const TemplateSet& templates) {
    const std::vector<QaSpec>& qas = mdp.problem->qas;
    require(lowerBounds.size() == qas.size(), Errc::LengthMismatch,
            "lower bound vector does not match the QA count");

    Explanation ex;
    ex.objectiveLines = describe_objectives(qas, vocab, templates);
    ex.consequenceLines = describe_valuation(qas, solutionValuation, vocab, templates);

    // alternatives indexed by target QA (at most one each, QA order)
    std::vector<int> altOfQa(qas.size(), -1);
    for (size_t ai = 0; ai < alternatives.size(); ++ai)
        altOfQa[static_cast<size_t>(alternatives[ai].targetQa)] = static_cast<int>(ai);

    std::ostringstream body;
    body << templates.at("heading.objectives") << "\n";
    for (const auto& line : ex.objectiveLines) body << line << "\n";
    body << "\n" << templates.at("heading.consequences") << "\n";
    for (const auto& line : ex.consequenceLines) body << line << "\n";

    for (size_t qi = 0; qi < qas.size(); ++qi) {
        const QaSpec& qa = qas[qi];
        const QaVocabulary& v = vocab_for(vocab, qa);
        QaVerdict verdict;
        verdict.qa = qa.name;
        bool atBound = solutionValuation.qaValue[qi] <= lowerBounds[qi] + 1e-6;
        if (atBound) {
            verdict.kind = VerdictKind::BestPossible;
            auto slots = base_slots(qa, v);
            slots["noun"] = qa.kind == QaKind::EventCount ? "number of " + v.eventNoun.plural
                                                          : v.noun;
            verdict.sentence =
                v.bestPossible.empty()
                    ? fill_template(templates.at("verdict.bestPossible"), slots)
                    : fill_template(templates.at("verdict.bestPossibleCustom"),
                                    {{"phrase", v.bestPossible}});
            body << "\n" << verdict.sentence << "\n";
        } else {
            verdict.kind = VerdictKind::TradedOff;
            int ai = altOfQa[qi];
            if (ai < 0) {
                auto slots = base_slots(qa, v);
                slots["noun"] = qa.kind == QaKind::EventCount ? "number of " + v.eventNoun.plural
                                                              : v.noun;
                verdict.sentence = fill_template(templates.at("verdict.noAlternative"), slots);
                body << "\n" << verdict.sentence << "\n";
            } else {
                verdict.altIndex = ai;
                const alt::AlternativeResult& alternative = alternatives[static_cast<size_t>(ai)];
                TradeoffRecord record;
                record.altIndex = ai;
                record.targetQa = qa.name;
                std::vector<std::string> gainPhrases, lossPhrases, gainRestated, lossRestated;
                for (const auto& g : alternative.gains) {
                    const QaSpec& gq = qas[static_cast<size_t>(g.qa)];
                    const QaVocabulary& gv = vocab_for(vocab, gq);
                    record.improved.push_back({gq.name, g.amount});
                    gainPhrases.push_back(
                        gain_or_loss_phrase(templates, "gain", gq, gv, g.amount));
                    gainRestated.push_back(restate_phrase(templates, "gain", gq, gv, g.amount));
                }
                for (const auto& l : alternative.losses) {
                    const QaSpec& lq = qas[static_cast<size_t>(l.qa)];
                    const QaVocabulary& lv = vocab_for(vocab, lq);
                    record.worsened.push_back({lq.name, l.amount});
                    lossPhrases.push_back(
                        gain_or_loss_phrase(templates, "loss", lq, lv, l.amount));
                    lossRestated.push_back(restate_phrase(templates, "loss", lq, lv, l.amount));
                }
                record.paragraph = fill_template(
                    templates.at("contrastive.paragraph"),
                    {{"gains", join_list(gainPhrases)},
                     {"losses", join_list(lossPhrases)},
                     {"gainsRestated", join_list(gainRestated)},
                     {"lossesRestated", join_list(lossRestated)}});
                body << "\n" << record.paragraph << "\n";
                body << fill_template(templates.at("heading.alternative"),
                                      {{"noun", qa.kind == QaKind::EventCount
                                                    ? "number of " + v.eventNoun.plural
                                                    : v.noun}})
                     << "\n";
                for (const auto& [state, action] : policy_table(mdp, alternative.policy)) {
                    // list only decisions along the alternative's own walk
                    int idx = mdp.find_state([&] {
                        StateAssignment assign;
                        std::istringstream is(state);
                        std::string part;
                        while (std::getline(is, part, ',')) {
                            size_t eq = part.find('=');
                            assign[part.substr(0, eq)] = part.substr(eq + 1);
                        }
                        return assign;
                    }());
                    if (idx >= 0 && alternative.policy.reachable[static_cast<size_t>(idx)])
                        body << "  " << state << " -> " << action << "\n";
                }
                ex.tradeoffs.push_back(std::move(record));
            }
        }
        ex.verdicts.push_back(std::move(verdict));
    }
    ex.text = body.str();
    return ex;
}

} // namespace xmdp::expl
