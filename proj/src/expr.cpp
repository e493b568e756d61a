#include "xmdp/expr.hpp"

#include <cctype>
#include <cmath>
#include <cstdlib>
#include <sstream>

namespace xmdp {

bool attr_equal(const AttrValue& a, const AttrValue& b) {
    if (a.index() != b.index()) {
        // allow numeric strings in problem files to match numbers
        const std::string* s = std::get_if<std::string>(&a) ? std::get_if<std::string>(&a)
                                                            : std::get_if<std::string>(&b);
        const double* d = std::get_if<double>(&a) ? std::get_if<double>(&a) : std::get_if<double>(&b);
        if (s && d) {
            char* end = nullptr;
            double parsed = std::strtod(s->c_str(), &end);
            if (end && *end == '\0' && !s->empty()) return parsed == *d;
        }
        return false;
    }
    if (std::holds_alternative<double>(a))
        return std::get<double>(a) == std::get<double>(b);
    return std::get<std::string>(a) == std::get<std::string>(b);
}

std::string attr_to_string(const AttrValue& v) {
    if (std::holds_alternative<std::string>(v)) return std::get<std::string>(v);
    std::ostringstream os;
    os << std::get<double>(v);
    return os.str();
}

std::optional<AttrValue> AttrContext::lookup(std::string_view ref) const {
    auto dot = ref.find('.');
    if (dot == std::string_view::npos) {
        if (auto it = action_attrs_.find(ref); it != action_attrs_.end()) return it->second;
        if (auto it = var_values_.find(ref); it != var_values_.end()) return AttrValue(it->second);
        return std::nullopt;
    }
    std::string_view head = ref.substr(0, dot);
    std::string_view tail = ref.substr(dot + 1);
    if (head == "action") {
        if (tail == "type") return AttrValue(action_type_);
        if (tail == "name") return AttrValue(action_name_);
        if (auto it = action_attrs_.find(tail); it != action_attrs_.end()) return it->second;
        return std::nullopt;
    }
    if (auto it = var_attrs_.find(ref); it != var_attrs_.end()) return it->second;
    return std::nullopt;
}

AttrValue AttrContext::resolve(std::string_view ref) const {
    auto v = lookup(ref);
    if (!v) fail(Errc::UndefinedAttribute, "unresolvable attribute reference '" + std::string(ref) + "'");
    return *v;
}

double AttrContext::resolve_number(std::string_view ref) const {
    AttrValue v = resolve(ref);
    if (!std::holds_alternative<double>(v))
        fail(Errc::UndefinedAttribute,
             "attribute '" + std::string(ref) + "' is not numeric (value '" + attr_to_string(v) + "')");
    return std::get<double>(v);
}

// ---------------------------------------------------------------------------
// expression parsing

class ExprParser {
  public:
    ExprParser(const std::string& text, Expr& out) : text_(text), out_(out) {}

    void run() {
        int root = parse_expr();
        skip_ws();
        if (pos_ != text_.size())
            fail(Errc::ParseError, "trailing input in expression '" + text_ + "' at offset " +
                                       std::to_string(pos_));
        (void)root; // root is the last node by construction
        out_.text_ = text_;
    }

  private:
    const std::string& text_;
    Expr& out_;
    size_t pos_ = 0;

    void skip_ws() {
        while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    }
    bool consume(char c) {
        skip_ws();
        if (pos_ < text_.size() && text_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }
    char peek() {
        skip_ws();
        return pos_ < text_.size() ? text_[pos_] : '\0';
    }

    int add(Expr::Node n) {
        out_.nodes_.push_back(std::move(n));
        return static_cast<int>(out_.nodes_.size()) - 1;
    }

    int parse_expr() {
        int lhs = parse_term();
        while (true) {
            char c = peek();
            if (c == '+' || c == '-') {
                ++pos_;
                int rhs = parse_term();
                Expr::Node n;
                n.op = c == '+' ? Expr::Op::Add : Expr::Op::Sub;
                n.lhs = lhs;
                n.rhs = rhs;
                lhs = add(std::move(n));
            } else {
                return lhs;
            }
        }
    }

    int parse_term() {
        int lhs = parse_factor();
        while (true) {
            char c = peek();
            if (c == '*' || c == '/') {
                ++pos_;
                int rhs = parse_factor();
                Expr::Node n;
                n.op = c == '*' ? Expr::Op::Mul : Expr::Op::Div;
                n.lhs = lhs;
                n.rhs = rhs;
                lhs = add(std::move(n));
            } else {
                return lhs;
            }
        }
    }

    int parse_factor() {
        skip_ws();
        if (pos_ >= text_.size()) fail(Errc::ParseError, "unexpected end of expression '" + text_ + "'");
        char c = text_[pos_];
        if (c == '-') {
            ++pos_;
            int inner = parse_factor();
            Expr::Node n;
            n.op = Expr::Op::Neg;
            n.lhs = inner;
            return add(std::move(n));
        }
        if (c == '(') {
            ++pos_;
            int inner = parse_expr();
            if (!consume(')'))
                fail(Errc::ParseError, "missing ')' in expression '" + text_ + "'");
            return inner;
        }
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
            char* end = nullptr;
            double v = std::strtod(text_.c_str() + pos_, &end);
            pos_ = static_cast<size_t>(end - text_.c_str());
            Expr::Node n;
            n.op = Expr::Op::Num;
            n.num = v;
            return add(std::move(n));
        }
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            size_t start = pos_;
            while (pos_ < text_.size()) {
                char d = text_[pos_];
                if (std::isalnum(static_cast<unsigned char>(d)) || d == '_' || d == '.' || d == '-') {
                    // '-' inside identifiers supports names like "semi-private";
                    // a '-' followed by space/digit ends the identifier instead.
                    if (d == '-') {
                        if (pos_ + 1 >= text_.size()) break;
                        char e = text_[pos_ + 1];
                        if (!(std::isalpha(static_cast<unsigned char>(e)) || e == '_')) break;
                    }
                    ++pos_;
                } else {
                    break;
                }
            }
            Expr::Node n;
            n.op = Expr::Op::Ref;
            n.ref = text_.substr(start, pos_ - start);
            return add(std::move(n));
        }
        fail(Errc::ParseError, "unexpected character '" + std::string(1, c) + "' in expression '" + text_ + "'");
    }
};

Expr Expr::parse(const std::string& text) {
    Expr e;
    ExprParser(text, e).run();
    return e;
}

double Expr::eval_node(int idx, const AttrContext& ctx) const {
    const Node& n = nodes_[static_cast<size_t>(idx)];
    switch (n.op) {
    case Op::Num: return n.num;
    case Op::Ref: return ctx.resolve_number(n.ref);
    case Op::Add: return eval_node(n.lhs, ctx) + eval_node(n.rhs, ctx);
    case Op::Sub: return eval_node(n.lhs, ctx) - eval_node(n.rhs, ctx);
    case Op::Mul: return eval_node(n.lhs, ctx) * eval_node(n.rhs, ctx);
    case Op::Div: {
        double denom = eval_node(n.rhs, ctx);
        if (denom == 0.0)
            fail(Errc::InvalidArgument, "division by zero while evaluating '" + text_ + "'");
        return eval_node(n.lhs, ctx) / denom;
    }
    case Op::Neg: return -eval_node(n.lhs, ctx);
    }
    fail(Errc::SolverFailure, "corrupt expression node");
}

double Expr::eval(const AttrContext& ctx) const {
    if (nodes_.empty()) fail(Errc::InvalidArgument, "evaluating empty expression");
    return eval_node(static_cast<int>(nodes_.size()) - 1, ctx);
}

// ---------------------------------------------------------------------------
// value functions

ValueFn ValueFn::constant(double v) {
    ValueFn f;
    f.kind_ = Kind::Constant;
    f.constant_ = v;
    return f;
}

ValueFn ValueFn::expression(const std::string& text) {
    ValueFn f;
    f.kind_ = Kind::Expression;
    f.expr_ = Expr::parse(text);
    return f;
}

ValueFn ValueFn::table(std::vector<TableRow> rows, double fallback) {
    ValueFn f;
    f.kind_ = Kind::Table;
    f.rows_ = std::move(rows);
    f.fallback_ = fallback;
    return f;
}

double ValueFn::eval(const AttrContext& ctx) const {
    switch (kind_) {
    case Kind::Constant: return constant_;
    case Kind::Expression: return expr_.eval(ctx);
    case Kind::Table:
        for (const TableRow& row : rows_) {
            bool match = true;
            for (const MatchClause& clause : row.when) {
                AttrValue actual = ctx.resolve(clause.ref);
                bool any = false;
                for (const AttrValue& candidate : clause.any_of)
                    if (attr_equal(actual, candidate)) {
                        any = true;
                        break;
                    }
                if (!any) {
                    match = false;
                    break;
                }
            }
            if (match) return row.value.eval(ctx);
        }
        return fallback_;
    }
    fail(Errc::SolverFailure, "corrupt value function");
}

} // namespace xmdp
