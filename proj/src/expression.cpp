#include "rdinv/expression.hpp"

#include <cctype>
#include <cmath>
#include <cstdlib>
#include <vector>

#include "rdinv/errors.hpp"

namespace rdinv::expr {

enum class Op { Add, Sub, Mul, Div, Pow, Neg };
enum class Fn { Sin, Cos, Exp, Atan, Sqrt, Abs, Max, Min, SelGe };

class Node {
public:
    enum class Kind { Const, Var, Unary, Binary, Call };
    Kind kind;
    double value = 0.0;  // Const
    char var = 0;        // Var
    Op op = Op::Add;     // Unary/Binary
    Fn fn = Fn::Sin;     // Call
    std::vector<NodePtr> args;
};

namespace {

NodePtr make_const(double v) {
    auto n = std::make_shared<Node>();
    n->kind = Node::Kind::Const;
    n->value = v;
    return n;
}

NodePtr make_var(char c) {
    auto n = std::make_shared<Node>();
    n->kind = Node::Kind::Var;
    n->var = c;
    return n;
}

NodePtr make_unary(Op op, NodePtr a) {
    auto n = std::make_shared<Node>();
    n->kind = Node::Kind::Unary;
    n->op = op;
    n->args = {std::move(a)};
    return n;
}

NodePtr make_binary(Op op, NodePtr a, NodePtr b) {
    auto n = std::make_shared<Node>();
    n->kind = Node::Kind::Binary;
    n->op = op;
    n->args = {std::move(a), std::move(b)};
    return n;
}

NodePtr make_call(Fn fn, std::vector<NodePtr> args) {
    auto n = std::make_shared<Node>();
    n->kind = Node::Kind::Call;
    n->fn = fn;
    n->args = std::move(args);
    return n;
}

class Parser {
public:
    explicit Parser(std::string_view text) : text_(text) {}

    NodePtr run() {
        NodePtr e = expression();
        skip_ws();
        if (pos_ != text_.size()) fail("unexpected trailing input");
        return e;
    }

private:
    std::string_view text_;
    size_t pos_ = 0;

    [[noreturn]] void fail(const std::string& what) const {
        throw ConfigError("expression error at position " + std::to_string(pos_) +
                          ": " + what + " in \"" + std::string(text_) + "\"");
    }

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

    NodePtr expression() {
        NodePtr lhs = term();
        for (;;) {
            if (consume('+')) lhs = make_binary(Op::Add, lhs, term());
            else if (consume('-')) lhs = make_binary(Op::Sub, lhs, term());
            else return lhs;
        }
    }

    NodePtr term() {
        NodePtr lhs = unary();
        for (;;) {
            if (consume('*')) lhs = make_binary(Op::Mul, lhs, unary());
            else if (consume('/')) lhs = make_binary(Op::Div, lhs, unary());
            else return lhs;
        }
    }

    NodePtr unary() {
        if (consume('-')) return make_unary(Op::Neg, unary());
        if (consume('+')) return unary();
        return power();
    }

    NodePtr power() {
        NodePtr base = primary();
        if (consume('^')) return make_binary(Op::Pow, base, unary());  // right-assoc
        return base;
    }

    NodePtr primary() {
        skip_ws();
        if (pos_ >= text_.size()) fail("unexpected end of expression");
        char c = text_[pos_];
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
        if (std::isalpha(static_cast<unsigned char>(c))) return identifier();
        if (consume('(')) {
            NodePtr e = expression();
            if (!consume(')')) fail("expected ')'");
            return e;
        }
        fail(std::string("unexpected character '") + c + "'");
    }

    NodePtr number() {
        const char* begin = text_.data() + pos_;
        char* end = nullptr;
        double v = std::strtod(begin, &end);
        if (end == begin) fail("malformed number");
        pos_ += static_cast<size_t>(end - begin);
        return make_const(v);
    }

    NodePtr identifier() {
        size_t start = pos_;
        while (pos_ < text_.size() && std::isalpha(static_cast<unsigned char>(text_[pos_]))) ++pos_;
        std::string_view name = text_.substr(start, pos_ - start);
        if (name.size() == 1) {
            char v = name[0];
            if (v == 'x' || v == 't' || v == 'u' || v == 'v' || v == 'w') return make_var(v);
        }
        if (name == "pi") return make_const(3.14159265358979323846);
        Fn fn;
        int arity = 1;
        if (name == "sin") fn = Fn::Sin;
        else if (name == "cos") fn = Fn::Cos;
        else if (name == "exp") fn = Fn::Exp;
        else if (name == "atan") fn = Fn::Atan;
        else if (name == "sqrt") fn = Fn::Sqrt;
        else if (name == "abs") fn = Fn::Abs;
        else if (name == "max") { fn = Fn::Max; arity = 2; }
        else if (name == "min") { fn = Fn::Min; arity = 2; }
        else fail("unknown identifier '" + std::string(name) + "'");
        if (!consume('(')) fail("expected '(' after function name");
        std::vector<NodePtr> args;
        args.push_back(expression());
        while (consume(',')) args.push_back(expression());
        if (!consume(')')) fail("expected ')'");
        if (static_cast<int>(args.size()) != arity)
            fail("function '" + std::string(name) + "' takes " + std::to_string(arity) +
                 " argument(s)");
        return make_call(fn, std::move(args));
    }
};

double var_value(char var, const Env& env) {
    switch (var) {
        case 'x': return env.x;
        case 't': return env.t;
        case 'u': return env.u;
        case 'v': return env.v;
        case 'w': return env.w;
        default: return 0.0;
    }
}

}  // namespace

NodePtr parse(std::string_view text) { return Parser(text).run(); }

double eval(const NodePtr& node, const Env& env) {
    switch (node->kind) {
        case Node::Kind::Const: return node->value;
        case Node::Kind::Var: return var_value(node->var, env);
        case Node::Kind::Unary: return -eval(node->args[0], env);
        case Node::Kind::Binary: {
            double a = eval(node->args[0], env);
            double b = eval(node->args[1], env);
            switch (node->op) {
                case Op::Add: return a + b;
                case Op::Sub: return a - b;
                case Op::Mul: return a * b;
                case Op::Div: return a / b;
                case Op::Pow: return std::pow(a, b);
                default: return 0.0;
            }
        }
        case Node::Kind::Call: {
            if (node->fn == Fn::SelGe) {
                double a = eval(node->args[0], env);
                double b = eval(node->args[1], env);
                return a >= b ? eval(node->args[2], env) : eval(node->args[3], env);
            }
            double a = eval(node->args[0], env);
            switch (node->fn) {
                case Fn::Sin: return std::sin(a);
                case Fn::Cos: return std::cos(a);
                case Fn::Exp: return std::exp(a);
                case Fn::Atan: return std::atan(a);
                case Fn::Sqrt: return std::sqrt(a);
                case Fn::Abs: return std::abs(a);
                case Fn::Max: return std::max(a, eval(node->args[1], env));
                case Fn::Min: return std::min(a, eval(node->args[1], env));
                default: return 0.0;
            }
        }
    }
    return 0.0;
}

bool depends_on(const NodePtr& node, char var) {
    switch (node->kind) {
        case Node::Kind::Const: return false;
        case Node::Kind::Var: return node->var == var;
        default:
            for (const auto& a : node->args)
                if (depends_on(a, var)) return true;
            return false;
    }
}

bool is_constant(const NodePtr& node, double* value) {
    for (char v : {'x', 't', 'u', 'v', 'w'})
        if (depends_on(node, v)) return false;
    if (value) *value = eval(node, Env{});
    return true;
}

NodePtr diff(const NodePtr& node, char var) {
    switch (node->kind) {
        case Node::Kind::Const: return make_const(0.0);
        case Node::Kind::Var: return make_const(node->var == var ? 1.0 : 0.0);
        case Node::Kind::Unary: return make_unary(Op::Neg, diff(node->args[0], var));
        case Node::Kind::Binary: {
            const NodePtr& a = node->args[0];
            const NodePtr& b = node->args[1];
            NodePtr da = diff(a, var);
            NodePtr db = diff(b, var);
            switch (node->op) {
                case Op::Add: return make_binary(Op::Add, da, db);
                case Op::Sub: return make_binary(Op::Sub, da, db);
                case Op::Mul:
                    return make_binary(Op::Add, make_binary(Op::Mul, da, b),
                                       make_binary(Op::Mul, a, db));
                case Op::Div:
                    return make_binary(
                        Op::Div,
                        make_binary(Op::Sub, make_binary(Op::Mul, da, b),
                                    make_binary(Op::Mul, a, db)),
                        make_binary(Op::Mul, b, b));
                case Op::Pow: {
                    double exponent;
                    if (is_constant(b, &exponent)) {
                        // d(a^c) = c * a^(c-1) * a'
                        return make_binary(
                            Op::Mul,
                            make_binary(Op::Mul, make_const(exponent),
                                        make_binary(Op::Pow, a, make_const(exponent - 1.0))),
                            da);
                    }
                    // d(a^b) = a^b * (b' * ln a + b * a'/a); general case is not
                    // needed by the presets, fall back to the log form.
                    throw ConfigError("derivative of a^b with non-constant exponent "
                                      "is not supported");
                }
                default: return make_const(0.0);
            }
        }
        case Node::Kind::Call: {
            const NodePtr& a = node->args[0];
            NodePtr da = diff(a, var);
            switch (node->fn) {
                case Fn::Sin: return make_binary(Op::Mul, make_call(Fn::Cos, {a}), da);
                case Fn::Cos:
                    return make_unary(Op::Neg,
                                      make_binary(Op::Mul, make_call(Fn::Sin, {a}), da));
                case Fn::Exp: return make_binary(Op::Mul, make_call(Fn::Exp, {a}), da);
                case Fn::Atan:
                    return make_binary(
                        Op::Div, da,
                        make_binary(Op::Add, make_const(1.0), make_binary(Op::Mul, a, a)));
                case Fn::Sqrt:
                    return make_binary(
                        Op::Div, da,
                        make_binary(Op::Mul, make_const(2.0), make_call(Fn::Sqrt, {a})));
                case Fn::Abs:
                    // branch-wise: a >= 0 ? a' : -a'
                    return make_call(Fn::SelGe,
                                     {a, make_const(0.0), da, make_unary(Op::Neg, da)});
                case Fn::Max: {
                    const NodePtr& b = node->args[1];
                    return make_call(Fn::SelGe, {a, b, da, diff(b, var)});
                }
                case Fn::Min: {
                    const NodePtr& b = node->args[1];
                    return make_call(Fn::SelGe, {a, b, diff(b, var), da});
                }
                case Fn::SelGe:
                    return make_call(Fn::SelGe, {node->args[0], node->args[1],
                                                 diff(node->args[2], var),
                                                 diff(node->args[3], var)});
                default: return make_const(0.0);
            }
        }
    }
    return make_const(0.0);
}

namespace {

std::string op_symbol(Op op) {
    switch (op) {
        case Op::Add: return "+";
        case Op::Sub: return "-";
        case Op::Mul: return "*";
        case Op::Div: return "/";
        case Op::Pow: return "^";
        default: return "-";
    }
}

std::string fn_name(Fn fn) {
    switch (fn) {
        case Fn::Sin: return "sin";
        case Fn::Cos: return "cos";
        case Fn::Exp: return "exp";
        case Fn::Atan: return "atan";
        case Fn::Sqrt: return "sqrt";
        case Fn::Abs: return "abs";
        case Fn::Max: return "max";
        case Fn::Min: return "min";
        case Fn::SelGe: return "selge";
    }
    return "?";
}

}  // namespace

std::string to_string(const NodePtr& node) {
    switch (node->kind) {
        case Node::Kind::Const: {
            char buf[32];
            std::snprintf(buf, sizeof buf, "%g", node->value);
            return buf;
        }
        case Node::Kind::Var: return std::string(1, node->var);
        case Node::Kind::Unary: return "(-" + to_string(node->args[0]) + ")";
        case Node::Kind::Binary:
            return "(" + to_string(node->args[0]) + op_symbol(node->op) +
                   to_string(node->args[1]) + ")";
        case Node::Kind::Call: {
            std::string s = fn_name(node->fn) + "(";
            for (size_t i = 0; i < node->args.size(); ++i) {
                if (i) s += ",";
                s += to_string(node->args[i]);
            }
            return s + ")";
        }
    }
    return "";
}

}  // namespace rdinv::expr
