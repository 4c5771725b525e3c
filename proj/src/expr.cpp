#include "graphlag/expr.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <vector>

namespace graphlag {

namespace detail {

enum class Kind { Const, Var, Add, Sub, Mul, Div, Pow, Neg, Sin, Cos, Exp, Log };

struct ExprNode {
    Kind kind;
    double value = 0.0;  // Const
    VarKey var;          // Var
    int exponent = 0;    // Pow
    std::shared_ptr<const ExprNode> a, b;
};

using NodePtr = std::shared_ptr<const ExprNode>;

double ipow(double base, int n) {
    if (n < 0) {
        if (base == 0.0) throw DomainError("0 raised to a negative power");
        return 1.0 / ipow(base, -n);
    }
    double acc = 1.0;
    for (int i = 0; i < n; ++i) acc *= base;
    return acc;
}

namespace {

NodePtr make_const(double c) {
    auto n = std::make_shared<ExprNode>();
    n->kind = Kind::Const;
    n->value = c;
    return n;
}

NodePtr make_var(VarKey k) {
    auto n = std::make_shared<ExprNode>();
    n->kind = Kind::Var;
    n->var = std::move(k);
    return n;
}

bool is_const(const NodePtr& n, double* v = nullptr) {
    if (n->kind != Kind::Const) return false;
    if (v) *v = n->value;
    return true;
}

bool is_const_val(const NodePtr& n, double v) {
    return n->kind == Kind::Const && n->value == v;
}

NodePtr make_node(Kind k, NodePtr a, NodePtr b = nullptr) {
    auto n = std::make_shared<ExprNode>();
    n->kind = k;
    n->a = std::move(a);
    n->b = std::move(b);
    return n;
}

NodePtr make_pow(NodePtr a, int n) {
    auto node = std::make_shared<ExprNode>();
    node->kind = Kind::Pow;
    node->a = std::move(a);
    node->exponent = n;
    return node;
}

NodePtr neg(NodePtr a);

NodePtr add(NodePtr a, NodePtr b) {
    double ca, cb;
    if (is_const(a, &ca) && is_const(b, &cb)) return make_const(ca + cb);
    if (is_const_val(a, 0.0)) return b;
    if (is_const_val(b, 0.0)) return a;
    return make_node(Kind::Add, std::move(a), std::move(b));
}

NodePtr sub(NodePtr a, NodePtr b) {
    double ca, cb;
    if (a == b) return make_const(0.0);
    if (is_const(a, &ca) && is_const(b, &cb)) return make_const(ca - cb);
    if (is_const_val(b, 0.0)) return a;
    if (is_const_val(a, 0.0)) return neg(std::move(b));
    return make_node(Kind::Sub, std::move(a), std::move(b));
}

NodePtr mul(NodePtr a, NodePtr b) {
    double ca, cb;
    if (is_const(a, &ca) && is_const(b, &cb)) return make_const(ca * cb);
    if (is_const_val(a, 0.0) || is_const_val(b, 0.0)) return make_const(0.0);
    if (is_const_val(a, 1.0)) return b;
    if (is_const_val(b, 1.0)) return a;
    return make_node(Kind::Mul, std::move(a), std::move(b));
}

NodePtr div(NodePtr a, NodePtr b) {
    double ca, cb;
    if (is_const_val(b, 1.0)) return a;
    if (is_const(a, &ca) && is_const(b, &cb) && cb != 0.0) return make_const(ca / cb);
    return make_node(Kind::Div, std::move(a), std::move(b));
}

NodePtr power(NodePtr a, int n) {
    if (n == 0) return make_const(1.0);
    if (n == 1) return a;
    double ca;
    if (is_const(a, &ca) && !(ca == 0.0 && n < 0)) return make_const(ipow(ca, n));
    return make_pow(std::move(a), n);
}

NodePtr neg(NodePtr a) {
    double ca;
    if (is_const(a, &ca)) return make_const(-ca);
    if (a->kind == Kind::Neg) return a->a;
    return make_node(Kind::Neg, std::move(a));
}

NodePtr func(Kind k, NodePtr a) {
    double ca;
    if (is_const(a, &ca)) {
        switch (k) {
            case Kind::Sin: return make_const(std::sin(ca));
            case Kind::Cos: return make_const(std::cos(ca));
            case Kind::Exp: return make_const(std::exp(ca));
            case Kind::Log:
                if (ca > 0.0) return make_const(std::log(ca));
                break;  // fold nothing; evaluation reports the domain error
            default: break;
        }
    }
    return make_node(k, std::move(a));
}

double eval_node(const ExprNode* n, const Env& env) {
    switch (n->kind) {
        case Kind::Const: return n->value;
        case Kind::Var: {
            auto it = env.find(n->var);
            if (it == env.end())
                throw UnboundVariableError("unbound variable x(" + n->var.vertex + "," +
                                           std::to_string(n->var.coord) + ")");
            return it->second;
        }
        case Kind::Add: return eval_node(n->a.get(), env) + eval_node(n->b.get(), env);
        case Kind::Sub: return eval_node(n->a.get(), env) - eval_node(n->b.get(), env);
        case Kind::Mul: return eval_node(n->a.get(), env) * eval_node(n->b.get(), env);
        case Kind::Div: {
            double num = eval_node(n->a.get(), env);
            double den = eval_node(n->b.get(), env);
            if (den == 0.0) throw DomainError("division by zero");
            return num / den;
        }
        case Kind::Pow: return ipow(eval_node(n->a.get(), env), n->exponent);
        case Kind::Neg: return -eval_node(n->a.get(), env);
        case Kind::Sin: return std::sin(eval_node(n->a.get(), env));
        case Kind::Cos: return std::cos(eval_node(n->a.get(), env));
        case Kind::Exp: return std::exp(eval_node(n->a.get(), env));
        case Kind::Log: {
            double v = eval_node(n->a.get(), env);
            if (v <= 0.0) throw DomainError("log of non-positive value");
            return std::log(v);
        }
    }
    throw Error("corrupt expression node");
}

NodePtr diff_node(const NodePtr& n, const VarKey& v) {
    switch (n->kind) {
        case Kind::Const: return make_const(0.0);
        case Kind::Var: return make_const(n->var == v ? 1.0 : 0.0);
        case Kind::Add: return add(diff_node(n->a, v), diff_node(n->b, v));
        case Kind::Sub: return sub(diff_node(n->a, v), diff_node(n->b, v));
        case Kind::Mul:
            return add(mul(diff_node(n->a, v), n->b), mul(n->a, diff_node(n->b, v)));
        case Kind::Div:
            // (a'b - ab') / b^2
            return div(sub(mul(diff_node(n->a, v), n->b), mul(n->a, diff_node(n->b, v))),
                       power(n->b, 2));
        case Kind::Pow:
            return mul(mul(make_const(n->exponent), power(n->a, n->exponent - 1)),
                       diff_node(n->a, v));
        case Kind::Neg: return neg(diff_node(n->a, v));
        case Kind::Sin: return mul(func(Kind::Cos, n->a), diff_node(n->a, v));
        case Kind::Cos: return neg(mul(func(Kind::Sin, n->a), diff_node(n->a, v)));
        case Kind::Exp: return mul(func(Kind::Exp, n->a), diff_node(n->a, v));
        case Kind::Log: return div(diff_node(n->a, v), n->a);
    }
    throw Error("corrupt expression node");
}

void collect_vars(const ExprNode* n, std::set<VarKey>& out) {
    if (!n) return;
    if (n->kind == Kind::Var) out.insert(n->var);
    collect_vars(n->a.get(), out);
    collect_vars(n->b.get(), out);
}

std::string format_number(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    // trim digits while the value still round-trips
    for (int prec = 1; prec < 17; ++prec) {
        char tight[40];
        std::snprintf(tight, sizeof tight, "%.*g", prec, v);
        double back = 0.0;
        std::from_chars(tight, tight + std::char_traits<char>::length(tight), back);
        if (back == v) return tight;
    }
    return buf;
}

// Precedence levels for printing: 1 add/sub, 2 mul/div and unary minus,
// 3 pow, 4 atoms. Negative literals print like a unary minus (level 2).
int print_level(const ExprNode* n) {
    switch (n->kind) {
        case Kind::Add:
        case Kind::Sub: return 1;
        case Kind::Mul:
        case Kind::Div:
        case Kind::Neg: return 2;
        case Kind::Pow: return 3;
        case Kind::Const: return n->value < 0.0 ? 2 : 4;
        default: return 4;
    }
}

void print_node(const ExprNode* n, int min_level, std::string& out) {
    bool parens = print_level(n) < min_level;
    if (parens) out += '(';
    switch (n->kind) {
        case Kind::Const: out += format_number(n->value); break;
        case Kind::Var:
            out += "x(" + n->var.vertex + "," + std::to_string(n->var.coord) + ")";
            break;
        case Kind::Add:
            print_node(n->a.get(), 1, out);
            out += '+';
            print_node(n->b.get(), 2, out);
            break;
        case Kind::Sub:
            print_node(n->a.get(), 1, out);
            out += '-';
            print_node(n->b.get(), 2, out);
            break;
        case Kind::Mul:
            print_node(n->a.get(), 2, out);
            out += '*';
            print_node(n->b.get(), 3, out);
            break;
        case Kind::Div:
            print_node(n->a.get(), 2, out);
            out += '/';
            print_node(n->b.get(), 3, out);
            break;
        case Kind::Pow:
            print_node(n->a.get(), 4, out);
            out += '^' + std::to_string(n->exponent);
            break;
        case Kind::Neg:
            out += '-';
            print_node(n->a.get(), 3, out);
            break;
        case Kind::Sin:
        case Kind::Cos:
        case Kind::Exp:
        case Kind::Log: {
            const char* name = n->kind == Kind::Sin   ? "sin"
                               : n->kind == Kind::Cos ? "cos"
                               : n->kind == Kind::Exp ? "exp"
                                                      : "log";
            out += name;
            out += '(';
            print_node(n->a.get(), 1, out);
            out += ')';
            break;
        }
    }
    if (parens) out += ')';
}

}  // namespace
}  // namespace detail

using detail::ExprNode;
using detail::Kind;

Expr::Expr() : node_(detail::make_const(0.0)) {}

Expr Expr::constant(double c) { return Expr(detail::make_const(c)); }

Expr Expr::variable(std::string vertex, int coord) {
    return Expr(detail::make_var(VarKey{std::move(vertex), coord}));
}

double Expr::evaluate(const Env& env) const { return detail::eval_node(node_.get(), env); }

Expr Expr::derivative(const VarKey& v) const { return Expr(detail::diff_node(node_, v)); }

std::string Expr::str() const {
    std::string out;
    detail::print_node(node_.get(), 1, out);
    return out;
}

std::set<VarKey> Expr::variables() const {
    std::set<VarKey> out;
    detail::collect_vars(node_.get(), out);
    return out;
}

bool Expr::is_zero() const { return node_->kind == Kind::Const && node_->value == 0.0; }

bool Expr::is_constant(double* value) const {
    if (node_->kind != Kind::Const) return false;
    if (value) *value = node_->value;
    return true;
}

Expr operator+(const Expr& a, const Expr& b) { return Expr(detail::add(a.node_, b.node_)); }
Expr operator-(const Expr& a, const Expr& b) { return Expr(detail::sub(a.node_, b.node_)); }
Expr operator*(const Expr& a, const Expr& b) { return Expr(detail::mul(a.node_, b.node_)); }
Expr operator/(const Expr& a, const Expr& b) { return Expr(detail::div(a.node_, b.node_)); }
Expr operator-(const Expr& a) { return Expr(detail::neg(a.node_)); }
Expr pow(const Expr& a, int n) { return Expr(detail::power(a.node_, n)); }
Expr sin(const Expr& a) { return Expr(detail::func(Kind::Sin, a.node_)); }
Expr cos(const Expr& a) { return Expr(detail::func(Kind::Cos, a.node_)); }
Expr exp(const Expr& a) { return Expr(detail::func(Kind::Exp, a.node_)); }
Expr log(const Expr& a) { return Expr(detail::func(Kind::Log, a.node_)); }

// ---------------------------------------------------------------------------
// Parser

class Parser {
public:
    explicit Parser(std::string_view text) : text_(text) {}

    Expr run() {
        auto e = parse_expr();
        skip_ws();
        if (pos_ != text_.size()) fail("unexpected trailing input");
        return Expr(std::move(e));
    }

private:
    using NodePtr = detail::NodePtr;

    [[noreturn]] void fail(const std::string& expected) const {
        throw SyntaxError(pos_, expected);
    }

    void skip_ws() {
        while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_])))
            ++pos_;
    }

    bool eat(char c) {
        skip_ws();
        if (pos_ < text_.size() && text_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    void expect(char c) {
        if (!eat(c)) fail(std::string("expected '") + c + "'");
    }

    char peek() {
        skip_ws();
        return pos_ < text_.size() ? text_[pos_] : '\0';
    }

    NodePtr parse_expr() {
        auto lhs = parse_term();
        for (;;) {
            if (eat('+'))
                lhs = detail::make_node(Kind::Add, std::move(lhs), parse_term());
            else if (eat('-'))
                lhs = detail::make_node(Kind::Sub, std::move(lhs), parse_term());
            else
                return lhs;
        }
    }

    NodePtr parse_term() {
        auto lhs = parse_factor();
        for (;;) {
            if (eat('*'))
                lhs = detail::make_node(Kind::Mul, std::move(lhs), parse_factor());
            else if (eat('/'))
                lhs = detail::make_node(Kind::Div, std::move(lhs), parse_factor());
            else
                return lhs;
        }
    }

    NodePtr parse_factor() {
        auto base = parse_base();
        if (eat('^')) return detail::make_pow(std::move(base), parse_integer());
        return base;
    }

    NodePtr parse_base() {
        char c = peek();
        if (c == '\0') fail("expected expression");
        if (c == '(') {
            ++pos_;
            auto e = parse_expr();
            expect(')');
            return e;
        }
        if (c == '-') {
            ++pos_;
            // unary minus binds looser than ^, so -x^2 reads -(x^2)
            return detail::make_node(Kind::Neg, parse_factor());
        }
        if (std::isdigit(static_cast<unsigned char>(c))) return parse_number();
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') return parse_name();
        fail("expected expression");
    }

    NodePtr parse_number() {
        skip_ws();
        double v = 0.0;
        auto first = text_.data() + pos_;
        auto last = text_.data() + text_.size();
        auto [ptr, ec] = std::from_chars(first, last, v);
        if (ec != std::errc()) fail("expected number");
        pos_ += static_cast<std::size_t>(ptr - first);
        return detail::make_const(v);
    }

    int parse_integer() {
        skip_ws();
        std::size_t start = pos_;
        if (pos_ < text_.size() && (text_[pos_] == '-' || text_[pos_] == '+')) ++pos_;
        if (pos_ >= text_.size() || !std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
            pos_ = start;
            fail("expected integer exponent");
        }
        int v = 0;
        auto [ptr, ec] = std::from_chars(text_.data() + start, text_.data() + text_.size(), v);
        if (ec != std::errc()) fail("integer exponent out of range");
        pos_ = static_cast<std::size_t>(ptr - text_.data());
        return v;
    }

    std::string parse_ident() {
        skip_ws();
        std::size_t start = pos_;
        while (pos_ < text_.size() &&
               (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_'))
            ++pos_;
        if (pos_ == start) fail("expected identifier");
        return std::string(text_.substr(start, pos_ - start));
    }

    NodePtr parse_name() {
        std::string name = parse_ident();
        if (name == "x") {
            expect('(');
            std::string vertex = parse_ident();
            expect(',');
            int coord = parse_integer();
            if (coord < 0) fail("coordinate index must be non-negative");
            expect(')');
            return detail::make_var(VarKey{std::move(vertex), coord});
        }
        Kind k;
        if (name == "sin")
            k = Kind::Sin;
        else if (name == "cos")
            k = Kind::Cos;
        else if (name == "exp")
            k = Kind::Exp;
        else if (name == "log")
            k = Kind::Log;
        else {
            pos_ -= name.size();
            fail("unknown function '" + name + "'");
        }
        expect('(');
        auto arg = parse_expr();
        expect(')');
        return detail::make_node(k, std::move(arg));
    }

    std::string_view text_;
    std::size_t pos_ = 0;
};

Expr parse(std::string_view text) { return Parser(text).run(); }

// ---------------------------------------------------------------------------
// CompiledExpr: postfix program over a flat coordinate vector.

struct CompiledExpr::Op {
    Kind kind;
    double value = 0.0;
    int slot = -1;
    int exponent = 0;
};

CompiledExpr::CompiledExpr(const Expr& e, const std::function<int(const VarKey&)>& resolve) {
    auto program = std::make_shared<std::vector<Op>>();
    // postorder flatten
    std::function<void(const ExprNode*)> emit = [&](const ExprNode* n) {
        if (n->a) emit(n->a.get());
        if (n->b) emit(n->b.get());
        Op op;
        op.kind = n->kind;
        op.value = n->value;
        op.exponent = n->exponent;
        if (n->kind == Kind::Var) {
            op.slot = resolve(n->var);
            if (op.slot < 0)
                throw UnboundVariableError("variable x(" + n->var.vertex + "," +
                                           std::to_string(n->var.coord) +
                                           ") has no coordinate slot");
        }
        program->push_back(op);
    };
    emit(e.node());
    program_ = std::move(program);
}

double CompiledExpr::eval(const Eigen::VectorXd& x) const {
    if (!program_) return 0.0;
    double stack[64];
    double* sp = stack;
    std::vector<double> heap;  // only if the expression is unusually deep
    auto push = [&](double v) { *sp++ = v; };
    if (program_->size() > 60) {
        heap.resize(program_->size() + 4);
        sp = heap.data();
    }
    double* base = sp;
    for (const Op& op : *program_) {
        switch (op.kind) {
            case Kind::Const: push(op.value); break;
            case Kind::Var: push(x[op.slot]); break;
            case Kind::Add: sp[-2] = sp[-2] + sp[-1]; --sp; break;
            case Kind::Sub: sp[-2] = sp[-2] - sp[-1]; --sp; break;
            case Kind::Mul: sp[-2] = sp[-2] * sp[-1]; --sp; break;
            case Kind::Div:
                if (sp[-1] == 0.0) throw DomainError("division by zero");
                sp[-2] = sp[-2] / sp[-1];
                --sp;
                break;
            case Kind::Pow: sp[-1] = detail::ipow(sp[-1], op.exponent); break;
            case Kind::Neg: sp[-1] = -sp[-1]; break;
            case Kind::Sin: sp[-1] = std::sin(sp[-1]); break;
            case Kind::Cos: sp[-1] = std::cos(sp[-1]); break;
            case Kind::Exp: sp[-1] = std::exp(sp[-1]); break;
            case Kind::Log:
                if (sp[-1] <= 0.0) throw DomainError("log of non-positive value");
                sp[-1] = std::log(sp[-1]);
                break;
        }
    }
    return base[0];
}

bool CompiledExpr::is_zero() const {
    return !program_ ||
           (program_->size() == 1 && (*program_)[0].kind == Kind::Const &&
            (*program_)[0].value == 0.0);
}

}  // namespace graphlag
