#pragma once

#include "xmdp/errors.hpp"

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace xmdp {

/// Attribute values are either numeric or enumerated (string) constants.
using AttrValue = std::variant<double, std::string>;

bool attr_equal(const AttrValue& a, const AttrValue& b);
std::string attr_to_string(const AttrValue& v);

/// Resolves attribute references for one grounded (state, action) pair.
///
/// Reference forms:
///   "action.type"       action type name
///   "action.name"       ground action name
///   "action.<attr>"     action attribute
///   "<attr>"            action attribute (bare shorthand)
///   "<var>"             current value of a state variable
///   "<var>.<attr>"      attribute of the variable's current value
class AttrContext {
  public:
    void set_action(std::string type, std::string name) {
        action_type_ = std::move(type);
        action_name_ = std::move(name);
    }
    void set_action_attr(const std::string& attr, AttrValue v) { action_attrs_[attr] = std::move(v); }
    void set_var(const std::string& var, std::string value) { var_values_[var] = std::move(value); }
    void set_var_attr(const std::string& var, const std::string& attr, AttrValue v) {
        var_attrs_[var + "." + attr] = std::move(v);
    }

    std::optional<AttrValue> lookup(std::string_view ref) const;

    /// Like lookup() but throws UndefinedAttribute with a readable message.
    AttrValue resolve(std::string_view ref) const;
    double resolve_number(std::string_view ref) const;

  private:
    std::string action_type_;
    std::string action_name_;
    std::map<std::string, AttrValue, std::less<>> action_attrs_;
    std::map<std::string, std::string, std::less<>> var_values_;
    std::map<std::string, AttrValue, std::less<>> var_attrs_;
};

/// Parsed arithmetic expression over attribute references
/// (numbers, + - * /, unary minus, parentheses).
class Expr {
  public:
    Expr() = default;
    static Expr parse(const std::string& text);

    double eval(const AttrContext& ctx) const;
    const std::string& text() const { return text_; }
    bool empty() const { return nodes_.empty(); }

  private:
    enum class Op { Num, Ref, Add, Sub, Mul, Div, Neg };
    struct Node {
        Op op;
        double num = 0.0;
        std::string ref;
        int lhs = -1, rhs = -1;
    };
    std::vector<Node> nodes_; // root is last node
    std::string text_;

    double eval_node(int idx, const AttrContext& ctx) const;
    friend class ExprParser;
};

/// One clause of a table predicate: the referenced attribute must take one
/// of the listed values.
struct MatchClause {
    std::string ref;
    std::vector<AttrValue> any_of;
};

struct TableRow {
    std::vector<MatchClause> when;
    Expr value; // constant rows are parsed as a literal expression
};

/// A scalar function of a grounded (state, action) pair: a constant, an
/// arithmetic expression, or a first-match lookup table (rows are tried in
/// order; the default applies when none match).
class ValueFn {
  public:
    ValueFn() : kind_(Kind::Constant), constant_(0.0) {}

    static ValueFn constant(double v);
    static ValueFn expression(const std::string& text);
    static ValueFn table(std::vector<TableRow> rows, double fallback);

    double eval(const AttrContext& ctx) const;

    enum class Kind { Constant, Expression, Table };
    Kind kind() const { return kind_; }
    double constant_value() const { return constant_; }
    const Expr& expr() const { return expr_; }
    const std::vector<TableRow>& rows() const { return rows_; }
    double fallback() const { return fallback_; }

  private:
    Kind kind_;
    double constant_ = 0.0;
    Expr expr_;
    std::vector<TableRow> rows_;
    double fallback_ = 0.0;
};

} // namespace xmdp
