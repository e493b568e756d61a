#include "xmdp/milp/lp_format.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <map>
#include <sstream>

namespace xmdp::milp {

namespace {

/// Shortest decimal representation that parses back to the same double.
std::string num(double v) {
    char buf[40];
    for (int prec = 15; prec <= 17; ++prec) {
        std::snprintf(buf, sizeof(buf), "%.*g", prec, v);
        if (std::strtod(buf, nullptr) == v) return buf;
    }
    return buf;
}

void write_terms(std::ostringstream& os, const std::vector<std::pair<int, double>>& terms,
                 const MilpModel& model, double constant) {
    bool first = true;
    for (const auto& [j, c] : terms) {
        if (c >= 0.0)
            os << (first ? "" : " + ");
        else
            os << (first ? "- " : " - ");
        double mag = std::abs(c);
        if (mag != 1.0) os << num(mag) << ' ';
        os << model.vars[static_cast<size_t>(j)].name;
        first = false;
    }
    if (constant != 0.0) {
        if (constant > 0.0)
            os << (first ? "" : " + ") << num(constant);
        else
            os << (first ? "- " : " - ") << num(-constant);
        first = false;
    }
    if (first) os << "0";
}

struct Tokenizer {
    std::string text;
    size_t pos = 0;

    explicit Tokenizer(std::string t) : text(std::move(t)) {}

    void skip_ws_and_comments() {
        while (pos < text.size()) {
            char c = text[pos];
            if (c == '\\') { // comment to end of line
                while (pos < text.size() && text[pos] != '\n') ++pos;
            } else if (std::isspace(static_cast<unsigned char>(c))) {
                ++pos;
            } else {
                break;
            }
        }
    }

    bool eof() {
        skip_ws_and_comments();
        return pos >= text.size();
    }

    char peek() {
        skip_ws_and_comments();
        return pos < text.size() ? text[pos] : '\0';
    }

    static bool ident_char(char c) {
        return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '(' || c == ')' ||
               c == '[' || c == ']' || c == '.' || c == '#' || c == '@';
    }

    /// Next token: identifier, number, relational operator, sign or colon.
    std::string next() {
        skip_ws_and_comments();
        if (pos >= text.size()) return "";
        char c = text[pos];
        if (c == '<' || c == '>' || c == '=') {
            size_t start = pos++;
            if (pos < text.size() && (text[pos] == '=' || text[pos] == '<' || text[pos] == '>')) ++pos;
            return text.substr(start, pos - start);
        }
        if (c == '+' || c == '-' || c == ':') {
            ++pos;
            return std::string(1, c);
        }
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
            size_t start = pos;
            while (pos < text.size() &&
                   (std::isdigit(static_cast<unsigned char>(text[pos])) || text[pos] == '.' ||
                    text[pos] == 'e' || text[pos] == 'E' ||
                    ((text[pos] == '+' || text[pos] == '-') &&
                     (text[pos - 1] == 'e' || text[pos - 1] == 'E'))))
                ++pos;
            return text.substr(start, pos - start);
        }
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            size_t start = pos;
            while (pos < text.size() && ident_char(text[pos])) ++pos;
            return text.substr(start, pos - start);
        }
        fail(Errc::ParseError, std::string("unexpected character '") + c + "' in LP file");
    }

    std::string peek_token() {
        size_t save = pos;
        std::string t = next();
        pos = save;
        return t;
    }
};

bool is_number_token(const std::string& t) {
    return !t.empty() && (std::isdigit(static_cast<unsigned char>(t[0])) || t[0] == '.');
}

bool iequal(const std::string& a, const char* b) {
    size_t n = std::strlen(b);
    if (a.size() != n) return false;
    for (size_t i = 0; i < n; ++i)
        if (std::tolower(static_cast<unsigned char>(a[i])) !=
            std::tolower(static_cast<unsigned char>(b[i])))
            return false;
    return true;
}

bool at_section_boundary_token(const std::string& t) {
    return iequal(t, "subject") || iequal(t, "st") || iequal(t, "s.t.") || iequal(t, "bounds") ||
           iequal(t, "bound") || iequal(t, "binaries") || iequal(t, "binary") || iequal(t, "bin") ||
           iequal(t, "end") || iequal(t, "general") || iequal(t, "generals") || iequal(t, "gen");
}

bool is_section_keyword(Tokenizer& tz, const char* first, const char* second = nullptr) {
    size_t save = tz.pos;
    std::string a = tz.next();
    if (!iequal(a, first)) {
        tz.pos = save;
        return false;
    }
    if (second) {
        std::string b = tz.next();
        if (!iequal(b, second)) {
            tz.pos = save;
            return false;
        }
    }
    return true;
}

bool at_section_boundary(Tokenizer& tz) {
    size_t save = tz.pos;
    std::string t = tz.next();
    tz.pos = save;
    if (t.empty()) return true;
    return at_section_boundary_token(t);
}

} // namespace

std::string export_lp(const MilpModel& model) {
    model.validate();
    std::ostringstream os;
    if (!model.name.empty()) os << "\\ " << model.name << "\n";
    os << "Minimize\n obj: ";
    std::vector<std::pair<int, double>> objTerms;
    for (size_t j = 0; j < model.vars.size(); ++j)
        if (model.objective[j] != 0.0) objTerms.emplace_back(static_cast<int>(j), model.objective[j]);
    write_terms(os, objTerms, model, model.objectiveConstant);
    os << "\nSubject To\n";
    for (const auto& con : model.cons) {
        os << ' ' << con.name << ": ";
        write_terms(os, con.terms, model, 0.0);
        switch (con.sense) {
        case Sense::Le: os << " <= "; break;
        case Sense::Eq: os << " = "; break;
        case Sense::Ge: os << " >= "; break;
        }
        os << num(con.rhs) << "\n";
    }
    os << "Bounds\n";
    for (const auto& v : model.vars) {
        os << ' ';
        bool loInf = !std::isfinite(v.lo);
        bool hiInf = !std::isfinite(v.hi);
        if (loInf && hiInf)
            os << v.name << " free";
        else if (v.lo == v.hi)
            os << v.name << " = " << num(v.lo);
        else if (loInf)
            os << "-inf <= " << v.name << " <= " << num(v.hi);
        else if (hiInf)
            os << v.name << " >= " << num(v.lo);
        else
            os << num(v.lo) << " <= " << v.name << " <= " << num(v.hi);
        os << "\n";
    }
    bool anyBinary = false;
    for (const auto& v : model.vars) anyBinary = anyBinary || v.kind == VarKind::Binary;
    if (anyBinary) {
        os << "Binaries\n";
        for (const auto& v : model.vars)
            if (v.kind == VarKind::Binary) os << ' ' << v.name << "\n";
    }
    os << "End\n";
    return os.str();
}

MilpModel parse_lp(const std::string& text) {
    MilpModel model;
    std::map<std::string, int> varIndex;
    auto var_of = [&](const std::string& name) {
        auto it = varIndex.find(name);
        if (it != varIndex.end()) return it->second;
        int j = model.add_var(name, 0.0, kInfinity, VarKind::Continuous);
        varIndex[name] = j;
        return j;
    };

    // Pre-scan the Bounds section so variables get their exported declaration
    // order even when the objective mentions only a subset of them.
    {
        Tokenizer scan(text);
        bool inBounds = false;
        while (!scan.eof()) {
            std::string t = scan.next();
            if (iequal(t, "bounds") || iequal(t, "bound")) {
                inBounds = true;
                continue;
            }
            if (at_section_boundary_token(t) || iequal(t, "minimize") || iequal(t, "min")) {
                if (iequal(t, "end")) break;
                inBounds = false;
                continue;
            }
            if (inBounds && !is_number_token(t) && t != "+" && t != "-" && t != "<=" && t != ">=" &&
                t != "=" && t != "<" && t != ">" && !iequal(t, "free") && !iequal(t, "inf") &&
                !iequal(t, "infinity"))
                (void)var_of(t);
        }
    }

    Tokenizer tz(text);

    // objective sense
    {
        std::string t = tz.next();
        if (iequal(t, "minimize") || iequal(t, "min") || iequal(t, "minimise")) {
            // fall through
        } else {
            fail(Errc::ParseError, "LP file must start with Minimize (got '" + t + "')");
        }
    }

    // expression parser shared by the objective and constraint rows; returns
    // when a relational operator or section keyword is met
    auto parse_expression = [&](std::vector<std::pair<int, double>>& terms, double& constant,
                                std::string* relationOut) {
        constant = 0.0;
        double sign = 1.0;
        bool pendingSign = false;
        while (true) {
            if (tz.eof()) return;
            size_t save = tz.pos;
            std::string t = tz.next();
            if (t == "+") {
                pendingSign = true;
                continue;
            }
            if (t == "-") {
                sign = -sign;
                pendingSign = true;
                continue;
            }
            if (t == "<=" || t == ">=" || t == "=" || t == "<" || t == ">" || t == "=<" || t == "=>") {
                if (relationOut) *relationOut = t;
                return;
            }
            if (!pendingSign && at_section_boundary_token(t)) {
                tz.pos = save;
                return;
            }
            double coeff = sign;
            sign = 1.0;
            pendingSign = false;
            if (is_number_token(t)) {
                coeff *= std::strtod(t.c_str(), nullptr);
                std::string nxt = tz.peek_token();
                if (nxt.empty() || is_number_token(nxt) || nxt == "+" || nxt == "-" || nxt == "<=" ||
                    nxt == ">=" || nxt == "=" || nxt == "<" || nxt == ">" ||
                    at_section_boundary_token(nxt)) {
                    constant += coeff; // bare number term
                    continue;
                }
                t = tz.next(); // variable following the coefficient
            }
            terms.emplace_back(var_of(t), coeff);
        }
    };

    // objective label
    {
        size_t save = tz.pos;
        std::string t = tz.next();
        if (tz.peek() == ':') {
            tz.next(); // ':'
        } else {
            tz.pos = save;
        }
        (void)t;
    }
    {
        std::vector<std::pair<int, double>> terms;
        double constant = 0.0;
        parse_expression(terms, constant, nullptr);
        std::map<int, double> merged;
        for (auto& [j, c] : terms) merged[j] += c;
        for (auto& [j, c] : merged) model.objective[static_cast<size_t>(j)] = c;
        model.objectiveConstant = constant;
    }

    // Subject To
    if (!is_section_keyword(tz, "subject", "to") && !is_section_keyword(tz, "st") &&
        !is_section_keyword(tz, "s.t."))
        fail(Errc::ParseError, "expected 'Subject To' section");

    while (!tz.eof() && !at_section_boundary(tz)) {
        std::string label;
        {
            size_t save = tz.pos;
            std::string t = tz.next();
            if (tz.peek() == ':') {
                label = t;
                tz.next(); // ':'
            } else {
                tz.pos = save;
            }
        }
        std::vector<std::pair<int, double>> terms;
        double constant = 0.0;
        std::string relation;
        parse_expression(terms, constant, &relation);
        require(!relation.empty(), Errc::ParseError,
                "constraint '" + label + "' has no relational operator");
        std::string rhsTok = tz.next();
        double rhsSign = 1.0;
        if (rhsTok == "-") {
            rhsSign = -1.0;
            rhsTok = tz.next();
        } else if (rhsTok == "+") {
            rhsTok = tz.next();
        }
        require(is_number_token(rhsTok), Errc::ParseError,
                "constraint '" + label + "' right-hand side is not a number");
        double rhs = rhsSign * std::strtod(rhsTok.c_str(), nullptr) - constant;
        Sense sense = relation == "<=" || relation == "<" || relation == "=<"
                          ? Sense::Le
                          : (relation == ">=" || relation == ">" || relation == "=>" ? Sense::Ge
                                                                                     : Sense::Eq);
        if (label.empty()) label = "c" + std::to_string(model.cons.size());
        model.add_constraint(label, std::move(terms), sense, rhs);
    }

    // Bounds
    if (is_section_keyword(tz, "bounds") || is_section_keyword(tz, "bound")) {
        while (!tz.eof() && !at_section_boundary(tz)) {
            // forms: v free | v = a | v <= b | v >= a | a <= v <= b | -inf <= v ...
            double first = 0.0;
            bool firstIsNumber = false;
            std::string t = tz.next();
            double sgn = 1.0;
            if (t == "-" || t == "+") {
                sgn = t == "-" ? -1.0 : 1.0;
                t = tz.next();
            }
            if (is_number_token(t) || iequal(t, "inf") || iequal(t, "infinity")) {
                first = iequal(t, "inf") || iequal(t, "infinity") ? kInfinity
                                                                  : std::strtod(t.c_str(), nullptr);
                first *= sgn;
                firstIsNumber = true;
                t = tz.next(); // relation
                require(t == "<=" || t == "<", Errc::ParseError, "malformed bounds line");
                t = tz.next(); // variable
            }
            int j = var_of(t);
            std::string rel = tz.peek_token();
            if (iequal(rel, "free")) {
                tz.next();
                model.vars[static_cast<size_t>(j)].lo = -kInfinity;
                model.vars[static_cast<size_t>(j)].hi = kInfinity;
                continue;
            }
            if (firstIsNumber) model.vars[static_cast<size_t>(j)].lo = first;
            if (rel == "<=" || rel == "<" || rel == ">=" || rel == ">" || rel == "=") {
                tz.next();
                std::string vTok = tz.next();
                double s2 = 1.0;
                if (vTok == "-" || vTok == "+") {
                    s2 = vTok == "-" ? -1.0 : 1.0;
                    vTok = tz.next();
                }
                double v = iequal(vTok, "inf") || iequal(vTok, "infinity")
                               ? kInfinity
                               : std::strtod(vTok.c_str(), nullptr);
                v *= s2;
                if (rel == "<=" || rel == "<")
                    model.vars[static_cast<size_t>(j)].hi = v;
                else if (rel == ">=" || rel == ">")
                    model.vars[static_cast<size_t>(j)].lo = v;
                else {
                    model.vars[static_cast<size_t>(j)].lo = v;
                    model.vars[static_cast<size_t>(j)].hi = v;
                }
            }
        }
    }

    // Binaries
    if (is_section_keyword(tz, "binaries") || is_section_keyword(tz, "binary") ||
        is_section_keyword(tz, "bin")) {
        while (!tz.eof() && !at_section_boundary(tz)) {
            std::string t = tz.next();
            int j = var_of(t);
            model.vars[static_cast<size_t>(j)].kind = VarKind::Binary;
            if (model.vars[static_cast<size_t>(j)].lo < 0.0) model.vars[static_cast<size_t>(j)].lo = 0.0;
            if (model.vars[static_cast<size_t>(j)].hi > 1.0) model.vars[static_cast<size_t>(j)].hi = 1.0;
        }
    }

    if (!is_section_keyword(tz, "end"))
        fail(Errc::ParseError, "LP file does not terminate with End");

    model.validate();
    return model;
}

} // namespace xmdp::milp
