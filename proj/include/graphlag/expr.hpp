#pragma once

#include <functional>
#include <map>
#include <memory>
#include <set>
#include <string>
#include <string_view>

#include <Eigen/Core>

#include "graphlag/errors.hpp"

namespace graphlag {

// A scalar variable x(vertex, coordinate index).
struct VarKey {
    std::string vertex;
    int coord = 0;
    friend auto operator<=>(const VarKey&, const VarKey&) = default;
};

using Env = std::map<VarKey, double>;

namespace detail {
struct ExprNode;
}

// Immutable expression tree over +, -, *, /, integer ^, unary -, and
// sin/cos/exp/log. Shared subtrees are reference counted; all operations
// build new trees.
class Expr {
public:
    Expr();  // the constant 0

    static Expr constant(double c);
    static Expr variable(std::string vertex, int coord);
    static Expr variable(const VarKey& k) { return variable(k.vertex, k.coord); }

    double evaluate(const Env& env) const;

    // Exact symbolic derivative with light simplification (0*e, 1*e, e+0,
    // constant folding). Iterable to any order.
    Expr derivative(const VarKey& v) const;

    // Canonical printer; parse(str()) reproduces the tree it prints.
    std::string str() const;

    std::set<VarKey> variables() const;

    bool is_zero() const;                       // structurally the literal 0
    bool is_constant(double* value = nullptr) const;

    friend Expr operator+(const Expr& a, const Expr& b);
    friend Expr operator-(const Expr& a, const Expr& b);
    friend Expr operator*(const Expr& a, const Expr& b);
    friend Expr operator/(const Expr& a, const Expr& b);
    friend Expr operator-(const Expr& a);
    friend Expr pow(const Expr& a, int n);
    friend Expr sin(const Expr& a);
    friend Expr cos(const Expr& a);
    friend Expr exp(const Expr& a);
    friend Expr log(const Expr& a);

    const detail::ExprNode* node() const { return node_.get(); }

private:
    explicit Expr(std::shared_ptr<const detail::ExprNode> n) : node_(std::move(n)) {}
    std::shared_ptr<const detail::ExprNode> node_;
    friend class Parser;
    friend class CompiledExpr;
};

// Grammar:
//   expr   := term (("+"|"-") term)*
//   term   := factor (("*"|"/") factor)*
//   factor := base ("^" integer)?
//   base   := number | var | func "(" expr ")" | "(" expr ")" | "-" factor
//   var    := "x" "(" ident "," integer ")"
//   func   := "sin" | "cos" | "exp" | "log"
// Whitespace insensitive. Throws SyntaxError with a byte offset.
Expr parse(std::string_view text);

// An expression frozen against a flat coordinate vector: every variable is
// resolved to an index once, and eval() is a plain tree walk. Used by the
// model layer for everything called inside numeric loops.
class CompiledExpr {
public:
    CompiledExpr() = default;
    // resolve maps a variable to its slot in the vector handed to eval().
    CompiledExpr(const Expr& e, const std::function<int(const VarKey&)>& resolve);

    double eval(const Eigen::VectorXd& x) const;
    bool is_zero() const;

private:
    struct Op;
    std::shared_ptr<const std::vector<Op>> program_;
};

}  // namespace graphlag
