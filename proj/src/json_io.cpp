#include "xmdp/json_io.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>

namespace xmdp {

namespace {

Json attr_to_json(const AttrValue& v) {
    if (std::holds_alternative<double>(v)) return std::get<double>(v);
    return std::get<std::string>(v);
}

AttrValue attr_from_json(const Json& j) {
    if (j.is_number()) return j.get<double>();
    require(j.is_string(), Errc::ParseError, "attribute values must be numbers or strings");
    return j.get<std::string>();
}

std::string shortest_number(double v) {
    char buf[40];
    for (int prec = 15; prec <= 17; ++prec) {
        std::snprintf(buf, sizeof(buf), "%.*g", prec, v);
        if (std::strtod(buf, nullptr) == v) break;
    }
    return buf;
}

bool expr_is_number(const std::string& text, double& out) {
    char* end = nullptr;
    out = std::strtod(text.c_str(), &end);
    return end && *end == '\0' && !text.empty();
}

Json valuefn_to_json(const ValueFn& fn) {
    switch (fn.kind()) {
    case ValueFn::Kind::Constant: return Json{{"const", fn.constant_value()}};
    case ValueFn::Kind::Expression: return Json{{"expr", fn.expr().text()}};
    case ValueFn::Kind::Table: {
        Json rows = Json::array();
        for (const auto& row : fn.rows()) {
            Json when = Json::object();
            for (const auto& clause : row.when) {
                if (clause.any_of.size() == 1) {
                    when[clause.ref] = attr_to_json(clause.any_of.front());
                } else {
                    Json values = Json::array();
                    for (const auto& v : clause.any_of) values.push_back(attr_to_json(v));
                    when[clause.ref] = values;
                }
            }
            Json entry{{"when", when}};
            double num;
            if (expr_is_number(row.value.text(), num))
                entry["value"] = num;
            else
                entry["value"] = Json{{"expr", row.value.text()}};
            rows.push_back(entry);
        }
        return Json{{"table", rows}, {"default", fn.fallback()}};
    }
    }
    fail(Errc::SolverFailure, "corrupt value function");
}

ValueFn valuefn_from_json(const Json& j, const std::string& context) {
    require(j.is_object(), Errc::ParseError, context + ": value function must be an object");
    if (j.contains("const")) return ValueFn::constant(j.at("const").get<double>());
    if (j.contains("expr")) return ValueFn::expression(j.at("expr").get<std::string>());
    require(j.contains("table"), Errc::ParseError,
            context + ": value function needs 'const', 'expr' or 'table'");
    std::vector<TableRow> rows;
    for (const auto& entry : j.at("table")) {
        TableRow row;
        for (const auto& [ref, value] : entry.at("when").items()) {
            MatchClause clause;
            clause.ref = ref;
            if (value.is_array())
                for (const auto& v : value) clause.any_of.push_back(attr_from_json(v));
            else
                clause.any_of.push_back(attr_from_json(value));
            row.when.push_back(std::move(clause));
        }
        const Json& value = entry.at("value");
        if (value.is_number())
            row.value = Expr::parse(shortest_number(value.get<double>()));
        else
            row.value = Expr::parse(value.at("expr").get<std::string>());
        rows.push_back(std::move(row));
    }
    double fallback = j.value("default", 0.0);
    return ValueFn::table(std::move(rows), fallback);
}

Json unit_to_json(const UnitText& u) { return Json{{"singular", u.singular}, {"plural", u.plural}}; }

UnitText unit_from_json(const Json& j) {
    UnitText u;
    if (j.is_string()) {
        u.singular = u.plural = j.get<std::string>();
    } else {
        u.singular = j.value("singular", "");
        u.plural = j.value("plural", u.singular);
    }
    return u;
}

const char* qa_kind_name(QaKind k) {
    switch (k) {
    case QaKind::EventCount: return "eventCount";
    case QaKind::Standard: return "standard";
    case QaKind::NonStandard: return "nonStandard";
    }
    return "standard";
}

QaKind qa_kind_from(const std::string& s) {
    if (s == "eventCount") return QaKind::EventCount;
    if (s == "standard") return QaKind::Standard;
    if (s == "nonStandard") return QaKind::NonStandard;
    fail(Errc::ParseError, "unknown QA kind '" + s + "'");
}

} // namespace

std::string describe_position(const std::string& text, size_t byteOffset) {
    size_t line = 1, col = 1;
    for (size_t i = 0; i < byteOffset && i < text.size(); ++i) {
        if (text[i] == '\n') {
            ++line;
            col = 1;
        } else {
            ++col;
        }
    }
    return "line " + std::to_string(line) + ", column " + std::to_string(col);
}

Json problem_to_json_obj(const Problem& p) {
    Json j;
    j["name"] = p.name;
    j["variables"] = Json::array();
    for (const auto& v : p.variables) {
        Json entry{{"name", v.name}, {"values", v.values}};
        if (!v.type.empty()) entry["type"] = v.type;
        j["variables"].push_back(entry);
    }
    if (!p.types.empty()) {
        Json types = Json::object();
        for (const auto& [name, type] : p.types) {
            Json attrs = Json::object();
            for (const auto& [attr, perValue] : type.attributes) {
                Json table = Json::object();
                for (const auto& [value, av] : perValue) table[value] = attr_to_json(av);
                attrs[attr] = table;
            }
            types[name] = Json{{"attributes", attrs}};
        }
        j["types"] = types;
    }
    if (!p.actionTypes.empty()) {
        Json types = Json::object();
        for (const auto& [name, type] : p.actionTypes)
            types[name] = Json{{"attributes", type.attributes}};
        j["actionTypes"] = types;
    }
    j["actions"] = Json::array();
    for (const auto& a : p.actions) {
        Json entry{{"name", a.name}};
        if (!a.type.empty()) entry["type"] = a.type;
        if (!a.attributes.empty()) {
            Json attrs = Json::object();
            for (const auto& [k, v] : a.attributes) attrs[k] = attr_to_json(v);
            entry["attributes"] = attrs;
        }
        if (!a.pre.empty()) {
            Json pre = Json::object();
            for (const auto& [var, allowed] : a.pre) pre[var] = allowed;
            entry["pre"] = pre;
        }
        Json outcomes = Json::array();
        for (const auto& o : a.outcomes) {
            Json oc{{"prob", o.prob}};
            Json set = Json::object();
            for (const auto& [var, value] : o.assign) set[var] = value;
            oc["set"] = set;
            outcomes.push_back(oc);
        }
        entry["outcomes"] = outcomes;
        j["actions"].push_back(entry);
    }
    if (p.is_total_cost()) {
        const auto& tc = std::get<TotalCostCriterion>(p.criterion);
        Json goals = Json::array();
        for (const auto& g : tc.goals) {
            Json cond = Json::object();
            for (const auto& [var, value] : g) cond[var] = value;
            goals.push_back(cond);
        }
        Json initial = Json::object();
        for (const auto& [var, value] : tc.initial) initial[var] = value;
        j["criterion"] = Json{{"kind", "totalCostToGoal"}, {"goals", goals}, {"initial", initial}};
    } else {
        const auto& ac = std::get<AverageCostCriterion>(p.criterion);
        Json initial = Json::array();
        for (const auto& [assign, prob] : ac.initial) {
            Json state = Json::object();
            for (const auto& [var, value] : assign) state[var] = value;
            initial.push_back(Json{{"state", state}, {"prob", prob}});
        }
        j["criterion"] = Json{{"kind", "averageCost"}, {"initial", initial}};
    }
    j["qas"] = Json::array();
    for (const auto& qa : p.qas) {
        Json entry{{"name", qa.name}, {"kind", qa_kind_name(qa.kind)}};
        switch (qa.kind) {
        case QaKind::Standard:
            entry["unit"] = unit_to_json(qa.unit);
            entry["value"] = valuefn_to_json(qa.value);
            break;
        case QaKind::EventCount:
            entry["event"] = qa.eventName;
            entry["value"] = valuefn_to_json(qa.value);
            break;
        case QaKind::NonStandard: {
            Json events = Json::array();
            for (const auto& e : qa.events)
                events.push_back(Json{{"name", e.name},
                                      {"label", e.label},
                                      {"penalty", e.penalty},
                                      {"prob", valuefn_to_json(e.prob)}});
            entry["events"] = events;
            break;
        }
        }
        j["qas"].push_back(entry);
    }
    {
        Json scal;
        switch (p.scalarization.mode) {
        case ScalarizationProfile::Mode::Identity: scal["mode"] = "identity"; break;
        case ScalarizationProfile::Mode::MinMax: scal["mode"] = "minmax"; break;
        case ScalarizationProfile::Mode::Explicit: scal["mode"] = "explicit"; break;
        }
        Json weights = Json::object();
        for (const auto& [qa, w] : p.scalarization.weights) weights[qa] = w;
        scal["weights"] = weights;
        if (p.scalarization.mode == ScalarizationProfile::Mode::Explicit) {
            Json norms = Json::object();
            for (const auto& [qa, n] : p.scalarization.normalizers)
                norms[qa] = Json{{"scale", n.scale}, {"offset", n.offset}};
            scal["normalizers"] = norms;
        }
        j["scalarization"] = scal;
    }
    if (!p.vocabulary.empty()) {
        Json vocab = Json::object();
        for (const auto& [qa, v] : p.vocabulary) {
            Json entry = Json::object();
            if (!v.noun.empty()) entry["noun"] = v.noun;
            if (!v.unit.plural.empty()) entry["unit"] = unit_to_json(v.unit);
            if (!v.eventNoun.plural.empty()) entry["eventNoun"] = unit_to_json(v.eventNoun);
            if (v.subject != "the robot") entry["subject"] = v.subject;
            if (v.placeNoun.plural != "locations") entry["placeNoun"] = unit_to_json(v.placeNoun);
            if (!v.bestPossible.empty()) entry["bestPossible"] = v.bestPossible;
            vocab[qa] = entry;
        }
        j["vocabulary"] = vocab;
    }
    return j;
}

Problem problem_from_json_obj(const Json& j) {
    Problem p;
    require(j.is_object(), Errc::ParseError, "problem document must be a JSON object");
    p.name = j.value("name", "problem");
    require(j.contains("variables"), Errc::ParseError, "problem needs 'variables'");
    for (const auto& entry : j.at("variables")) {
        StateVariable v;
        v.name = entry.at("name").get<std::string>();
        v.type = entry.value("type", "");
        for (const auto& value : entry.at("values")) v.values.push_back(value.get<std::string>());
        p.variables.push_back(std::move(v));
    }
    if (j.contains("types")) {
        for (const auto& [name, spec] : j.at("types").items()) {
            StateVarType t;
            t.name = name;
            if (spec.contains("attributes"))
                for (const auto& [attr, table] : spec.at("attributes").items())
                    for (const auto& [value, av] : table.items())
                        t.attributes[attr][value] = attr_from_json(av);
            p.types[name] = std::move(t);
        }
    }
    if (j.contains("actionTypes")) {
        for (const auto& [name, spec] : j.at("actionTypes").items()) {
            ActionType t;
            t.name = name;
            if (spec.contains("attributes"))
                for (const auto& attr : spec.at("attributes"))
                    t.attributes.push_back(attr.get<std::string>());
            p.actionTypes[name] = std::move(t);
        }
    }
    require(j.contains("actions"), Errc::ParseError, "problem needs 'actions'");
    for (const auto& entry : j.at("actions")) {
        GroundAction a;
        a.name = entry.at("name").get<std::string>();
        a.type = entry.value("type", "");
        if (entry.contains("attributes"))
            for (const auto& [k, v] : entry.at("attributes").items())
                a.attributes[k] = attr_from_json(v);
        if (entry.contains("pre"))
            for (const auto& [var, allowed] : entry.at("pre").items())
                for (const auto& v : allowed) a.pre[var].push_back(v.get<std::string>());
        require(entry.contains("outcomes"), Errc::ParseError,
                "action '" + a.name + "' needs 'outcomes'");
        for (const auto& oc : entry.at("outcomes")) {
            Outcome o;
            o.prob = oc.value("prob", 1.0);
            if (oc.contains("set"))
                for (const auto& [var, value] : oc.at("set").items())
                    o.assign[var] = value.get<std::string>();
            a.outcomes.push_back(std::move(o));
        }
        p.actions.push_back(std::move(a));
    }
    require(j.contains("criterion"), Errc::ParseError, "problem needs 'criterion'");
    {
        const Json& c = j.at("criterion");
        std::string kind = c.at("kind").get<std::string>();
        if (kind == "totalCostToGoal") {
            TotalCostCriterion tc;
            for (const auto& g : c.at("goals")) {
                PartialState cond;
                for (const auto& [var, value] : g.items()) cond[var] = value.get<std::string>();
                tc.goals.push_back(std::move(cond));
            }
            for (const auto& [var, value] : c.at("initial").items())
                tc.initial[var] = value.get<std::string>();
            p.criterion = std::move(tc);
        } else if (kind == "averageCost") {
            AverageCostCriterion ac;
            for (const auto& entry : c.at("initial")) {
                StateAssignment assign;
                for (const auto& [var, value] : entry.at("state").items())
                    assign[var] = value.get<std::string>();
                ac.initial.emplace_back(std::move(assign), entry.at("prob").get<double>());
            }
            p.criterion = std::move(ac);
        } else {
            fail(Errc::ParseError, "unknown criterion kind '" + kind + "'");
        }
    }
    require(j.contains("qas"), Errc::ParseError, "problem needs 'qas'");
    for (const auto& entry : j.at("qas")) {
        QaSpec qa;
        qa.name = entry.at("name").get<std::string>();
        qa.kind = qa_kind_from(entry.at("kind").get<std::string>());
        switch (qa.kind) {
        case QaKind::Standard:
            if (entry.contains("unit")) qa.unit = unit_from_json(entry.at("unit"));
            qa.value = valuefn_from_json(entry.at("value"), "QA '" + qa.name + "'");
            break;
        case QaKind::EventCount:
            qa.eventName = entry.at("event").get<std::string>();
            qa.value = valuefn_from_json(entry.at("value"), "QA '" + qa.name + "'");
            break;
        case QaKind::NonStandard:
            for (const auto& e : entry.at("events")) {
                QaEvent event;
                event.name = e.at("name").get<std::string>();
                event.label = e.value("label", event.name);
                event.penalty = e.at("penalty").get<double>();
                event.prob = valuefn_from_json(e.at("prob"), "event '" + event.name + "'");
                qa.events.push_back(std::move(event));
            }
            break;
        }
        p.qas.push_back(std::move(qa));
    }
    if (j.contains("scalarization")) {
        const Json& s = j.at("scalarization");
        std::string mode = s.value("mode", "minmax");
        if (mode == "identity")
            p.scalarization.mode = ScalarizationProfile::Mode::Identity;
        else if (mode == "minmax")
            p.scalarization.mode = ScalarizationProfile::Mode::MinMax;
        else if (mode == "explicit")
            p.scalarization.mode = ScalarizationProfile::Mode::Explicit;
        else
            fail(Errc::ParseError, "unknown scalarization mode '" + mode + "'");
        for (const auto& [qa, w] : s.at("weights").items())
            p.scalarization.weights[qa] = w.get<double>();
        if (s.contains("normalizers"))
            for (const auto& [qa, n] : s.at("normalizers").items())
                p.scalarization.normalizers[qa] = {n.at("scale").get<double>(),
                                                   n.at("offset").get<double>()};
    }
    if (j.contains("vocabulary")) {
        for (const auto& [qa, v] : j.at("vocabulary").items()) {
            QaVocabulary entry;
            entry.noun = v.value("noun", "");
            if (v.contains("unit")) entry.unit = unit_from_json(v.at("unit"));
            if (v.contains("eventNoun")) entry.eventNoun = unit_from_json(v.at("eventNoun"));
            entry.subject = v.value("subject", "the robot");
            if (v.contains("placeNoun")) entry.placeNoun = unit_from_json(v.at("placeNoun"));
            entry.bestPossible = v.value("bestPossible", "");
            p.vocabulary[qa] = std::move(entry);
        }
    }
    return p;
}

Problem problem_from_json(const std::string& text) {
    Json j;
    try {
        j = Json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        fail(Errc::ParseError,
             "malformed JSON at " + describe_position(text, e.byte ? e.byte - 1 : 0) + ": " +
                 e.what());
    }
    try {
        return problem_from_json_obj(j);
    } catch (const nlohmann::json::exception& e) {
        fail(Errc::ParseError, std::string("problem document: ") + e.what());
    }
}

std::string problem_to_json(const Problem& problem) {
    return problem_to_json_obj(problem).dump(2) + "\n";
}

Json policy_to_json_obj(const ExplicitMdp& mdp, const Policy& policy) {
    Json j;
    j["criterion"] = mdp.totalCost ? "total" : "average";
    switch (policy.provenance) {
    case Policy::Provenance::Planner: j["provenance"] = "planner"; break;
    case Policy::Provenance::MilpAlternative: j["provenance"] = "milpAlternative"; break;
    case Policy::Provenance::External: j["provenance"] = "external"; break;
    }
    if (policy.targetQa >= 0)
        j["targetQa"] = mdp.problem->qas[static_cast<size_t>(policy.targetQa)].name;
    Json choices = Json::array();
    for (const auto& [state, action] : policy_table(mdp, policy))
        choices.push_back(Json{{"state", state}, {"action", action}});
    j["choices"] = choices;
    return j;
}

Policy policy_from_json_obj(const ExplicitMdp& mdp, const Json& j) {
    std::vector<std::pair<std::string, std::string>> table;
    for (const auto& entry : j.at("choices"))
        table.emplace_back(entry.at("state").get<std::string>(),
                           entry.at("action").get<std::string>());
    Policy::Provenance prov = Policy::Provenance::External;
    std::string provName = j.value("provenance", "external");
    if (provName == "planner") prov = Policy::Provenance::Planner;
    if (provName == "milpAlternative") prov = Policy::Provenance::MilpAlternative;
    Policy p = policy_from_table(mdp, table, prov);
    if (j.contains("targetQa"))
        p.targetQa = mdp.problem->qa_index(j.at("targetQa").get<std::string>());
    return p;
}

Json valuation_to_json_obj(const ExplicitMdp& mdp, const PolicyValuation& valuation) {
    Json j;
    Json qas = Json::array();
    for (int qi = 0; qi < mdp.qa_count(); ++qi) {
        const QaSpec& qa = mdp.problem->qas[static_cast<size_t>(qi)];
        Json entry{{"name", qa.name}, {"value", valuation.qaValue[static_cast<size_t>(qi)]}};
        if (qa.kind == QaKind::Standard && !qa.unit.plural.empty()) entry["unit"] = qa.unit.plural;
        qas.push_back(entry);
    }
    j["qas"] = qas;
    Json events = Json::object();
    for (const auto& [name, count] : valuation.eventCounts) events[name] = count;
    j["eventCounts"] = events;
    j["scalarizedCost"] = valuation.scalarizedCost;
    return j;
}

PolicyValuation valuation_from_json_obj(const ExplicitMdp& mdp, const Json& j) {
    PolicyValuation val;
    val.qaValue.assign(static_cast<size_t>(mdp.qa_count()), 0.0);
    for (const auto& entry : j.at("qas")) {
        int qi = mdp.problem->qa_index(entry.at("name").get<std::string>());
        require(qi >= 0, Errc::ParseError,
                "valuation references unknown QA '" + entry.at("name").get<std::string>() + "'");
        val.qaValue[static_cast<size_t>(qi)] = entry.at("value").get<double>();
    }
    if (j.contains("eventCounts"))
        for (const auto& [name, count] : j.at("eventCounts").items())
            val.eventCounts[name] = count.get<double>();
    val.scalarizedCost = j.value("scalarizedCost", 0.0);
    return val;
}

Json explanation_to_json_obj(const expl::Explanation& explanation) {
    Json j;
    j["objectives"] = explanation.objectiveLines;
    j["consequences"] = explanation.consequenceLines;
    Json verdicts = Json::array();
    for (const auto& v : explanation.verdicts) {
        Json entry{{"qa", v.qa},
                   {"kind", v.kind == expl::VerdictKind::BestPossible ? "bestPossible"
                                                                      : "tradedOff"}};
        if (v.altIndex) entry["alternative"] = *v.altIndex;
        if (!v.sentence.empty()) entry["sentence"] = v.sentence;
        verdicts.push_back(entry);
    }
    j["verdicts"] = verdicts;
    Json tradeoffs = Json::array();
    for (const auto& t : explanation.tradeoffs) {
        Json improved = Json::array(), worsened = Json::array();
        for (const auto& g : t.improved)
            improved.push_back(Json{{"qa", g.qa}, {"amount", g.amount}});
        for (const auto& l : t.worsened)
            worsened.push_back(Json{{"qa", l.qa}, {"amount", l.amount}});
        tradeoffs.push_back(Json{{"alternative", t.altIndex},
                                 {"targetQa", t.targetQa},
                                 {"improved", improved},
                                 {"worsened", worsened},
                                 {"paragraph", t.paragraph}});
    }
    j["tradeoffs"] = tradeoffs;
    j["text"] = explanation.text;
    return j;
}

Json alternative_to_json_obj(const ExplicitMdp& mdp, const alt::AlternativeResult& alternative) {
    Json j;
    j["targetQa"] = mdp.problem->qas[static_cast<size_t>(alternative.targetQa)].name;
    j["policy"] = policy_to_json_obj(mdp, alternative.policy);
    j["valuation"] = valuation_to_json_obj(mdp, alternative.valuation);
    j["violation"] = alternative.violation;
    Json gains = Json::array(), losses = Json::array();
    for (const auto& g : alternative.gains)
        gains.push_back(Json{{"qa", mdp.problem->qas[static_cast<size_t>(g.qa)].name},
                             {"amount", g.amount}});
    for (const auto& l : alternative.losses)
        losses.push_back(Json{{"qa", mdp.problem->qas[static_cast<size_t>(l.qa)].name},
                              {"amount", l.amount}});
    j["gains"] = gains;
    j["losses"] = losses;
    return j;
}

} // namespace xmdp
