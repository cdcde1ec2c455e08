#pragma once

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "ccc/errors.hpp"

namespace ccc {

// ============================================================================
// Expression DSL
// ============================================================================
//
// Grammar (whitespace insignificant; '^' binds tighter than unary minus):
//
//   expr   = term { ("+"|"-") term } ;
//   term   = factor { ("*"|"/") factor } ;
//   factor = ["-"] base [ "^" exponent ] ;
//   base   = number | ident | "(" expr ")" | func "(" expr ")" ;
//   func   = "sin"|"cos"|"exp"|"ln"|"sqrt"|"tanh" ;
//
// An exponent is a signed number, or a parenthesized expression that folds
// to a constant (so "(1 - 3*t)^(-1/3)" is accepted); a non-constant exponent
// is a positioned parse error. Exponents are the only place where powers
// occur, which keeps the derivative rule set closed over constant powers.
//
// Parameters are substituted at the token level before parsing, so a parsed
// Expr is closed over the chart coordinates only. Unknown identifiers are
// rejected with the byte offset of the offending token.

enum class FuncId : std::uint8_t { Sin, Cos, Exp, Ln, Sqrt, Tanh };

inline constexpr std::array<std::string_view, 6> kFuncNames = {
    "sin", "cos", "exp", "ln", "sqrt", "tanh"};

namespace detail {

/// Shortest round-trip decimal form of a double (std::to_chars).
inline std::string format_double(double v) {
    std::array<char, 40> buf{};
    auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v);
    return std::string(buf.data(), res.ptr);
}

// ---- checked double-precision math -----------------------------------------
// Evaluation never manufactures NaNs: every domain violation throws.

inline double checked_div(double a, double b) {
    if (b == 0.0) throw DomainError("division by zero");
    return a / b;
}

inline double checked_ln(double x) {
    if (!(x > 0.0))
        throw DomainError("ln of non-positive value (" + format_double(x) + ")");
    return std::log(x);
}

inline double checked_sqrt(double x) {
    if (!(x >= 0.0))
        throw DomainError("sqrt of negative value (" + format_double(x) + ")");
    return std::sqrt(x);
}

inline bool is_integer_value(double e) {
    return std::nearbyint(e) == e && std::abs(e) < 1e15;
}

/// Power with constant exponent. Integer exponents admit any base (except a
/// zero base with a negative exponent); fractional exponents require a
/// positive base.
inline double checked_pow(double base, double expo) {
    if (is_integer_value(expo)) {
        if (base == 0.0 && expo < 0.0)
            throw DomainError("zero raised to negative power");
        return std::pow(base, expo);
    }
    if (!(base > 0.0))
        throw DomainError("non-positive base (" + format_double(base) +
                          ") raised to fractional power " + format_double(expo));
    return std::pow(base, expo);
}

inline double apply_func(FuncId f, double x) {
    switch (f) {
        case FuncId::Sin:  return std::sin(x);
        case FuncId::Cos:  return std::cos(x);
        case FuncId::Exp:  return std::exp(x);
        case FuncId::Ln:   return checked_ln(x);
        case FuncId::Sqrt: return checked_sqrt(x);
        case FuncId::Tanh: return std::tanh(x);
    }
    throw Error("unreachable function id");
}

}  // namespace detail

// ----------------------------------------------------------------------------

enum class ExprKind : std::uint8_t {
    Number,    // literal constant
    Variable,  // chart coordinate, by index
    Add, Sub, Mul, Div,   // binary
    Neg,       // unary minus (factor level)
    Pow,       // base ^ constant-exponent
    Call       // func(arg)
};

struct ExprNode {
    ExprKind kind;
    double number = 0.0;        // Number payload, or Pow exponent
    int var = -1;               // Variable payload
    FuncId func = FuncId::Sin;  // Call payload
    int a = -1, b = -1;         // child node indices (children precede parents)
    std::uint32_t offset = 0;   // byte offset in source, for diagnostics
};

/// Immutable parsed expression over a fixed coordinate list. Nodes are stored
/// in evaluation order (children before parents), so evaluation is a single
/// forward pass — no recursion, no stack limits at run time.
class Expr {
public:
    Expr() = default;

    const std::vector<std::string>& variables() const { return vars_; }
    const std::vector<ExprNode>& nodes() const { return nodes_; }
    int root() const { return root_; }

    bool is_constant() const {
        return root_ >= 0 && nodes_[static_cast<std::size_t>(root_)].kind == ExprKind::Number;
    }

    /// Evaluates over any scalar type with arithmetic and the six functions.
    /// `Scalar` must provide +,-,*,unary -, and free functions
    /// checked-div / apply-func / pow-const via the Ops policy below.
    template <class Scalar, class Ops>
    Scalar eval_with(std::span<const Scalar> values, const Ops& ops) const;

    double eval(std::span<const double> values) const;

    /// Canonical text form; re-parses to a tree with identical evaluation.
    std::string to_string() const;

private:
    friend Expr parse_expression(std::string_view,
                                 std::span<const std::string>,
                                 const std::map<std::string, double>&);

    std::string render(int node, int parent_prec) const;

    std::vector<ExprNode> nodes_;
    int root_ = -1;
    std::vector<std::string> vars_;
};

// ----------------------------------------------------------------------------
// Lexer
// ----------------------------------------------------------------------------

namespace detail {

enum class TokKind : std::uint8_t { Number, Ident, Op, End };

struct Token {
    TokKind kind;
    double number = 0.0;
    std::string_view text;  // identifier or operator text
    std::uint32_t offset = 0;
};

inline bool ident_start(char c) {
    return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '_';
}
inline bool ident_char(char c) {
    return ident_start(c) || (c >= '0' && c <= '9');
}
inline bool digit(char c) { return c >= '0' && c <= '9'; }

inline std::vector<Token> lex(std::string_view src) {
    std::vector<Token> out;
    std::size_t i = 0;
    const std::size_t n = src.size();
    while (i < n) {
        char c = src[i];
        if (c == ' ' || c == '\t' || c == '\n' || c == '\r') { ++i; continue; }
        const auto off = static_cast<std::uint32_t>(i);
        if (digit(c) || (c == '.' && i + 1 < n && digit(src[i + 1]))) {
            std::size_t j = i;
            while (j < n && digit(src[j])) ++j;
            if (j < n && src[j] == '.') {
                ++j;
                while (j < n && digit(src[j])) ++j;
            }
            if (j < n && (src[j] == 'e' || src[j] == 'E')) {
                std::size_t k = j + 1;
                if (k < n && (src[k] == '+' || src[k] == '-')) ++k;
                if (k < n && digit(src[k])) {
                    while (k < n && digit(src[k])) ++k;
                    j = k;
                }
                // else: the 'e' is not part of the number (e.g. "2*exp(x)")
            }
            double value = 0.0;
            auto res = std::from_chars(src.data() + i, src.data() + j, value);
            if (res.ec != std::errc() || res.ptr != src.data() + j)
                throw ParseError("malformed number literal '" +
                                 std::string(src.substr(i, j - i)) + "'", i);
            out.push_back({TokKind::Number, value, src.substr(i, j - i), off});
            i = j;
            continue;
        }
        if (ident_start(c)) {
            std::size_t j = i;
            while (j < n && ident_char(src[j])) ++j;
            out.push_back({TokKind::Ident, 0.0, src.substr(i, j - i), off});
            i = j;
            continue;
        }
        if (c == '+' || c == '-' || c == '*' || c == '/' || c == '^' ||
            c == '(' || c == ')') {
            out.push_back({TokKind::Op, 0.0, src.substr(i, 1), off});
            ++i;
            continue;
        }
        throw ParseError(std::string("unexpected character '") + c + "'", i);
    }
    out.push_back({TokKind::End, 0.0, std::string_view{},
                   static_cast<std::uint32_t>(n)});
    return out;
}

inline std::optional<FuncId> func_id(std::string_view name) {
    for (std::size_t k = 0; k < kFuncNames.size(); ++k)
        if (name == kFuncNames[k]) return static_cast<FuncId>(k);
    return std::nullopt;
}

}  // namespace detail

// ----------------------------------------------------------------------------
// Parser
// ----------------------------------------------------------------------------

namespace detail {

class Parser {
public:
    Parser(std::string_view src, std::span<const std::string> variables)
        : tokens_(lex(src)) {
        for (const auto& v : variables) vars_.push_back(v);
    }

    // Builds the node list; returns the root index.
    int run(std::vector<ExprNode>& nodes) {
        nodes_ = &nodes;
        int root = parse_expr(0);
        const Token& t = peek();
        if (t.kind != TokKind::End)
            throw ParseError("unexpected trailing input '" +
                             std::string(t.text) + "'", t.offset);
        return root;
    }

private:
    static constexpr int kMaxDepth = 512;

    const Token& peek() const { return tokens_[pos_]; }
    const Token& next() { return tokens_[pos_++]; }

    bool accept_op(char c) {
        const Token& t = peek();
        if (t.kind == TokKind::Op && t.text.size() == 1 && t.text[0] == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    void expect_op(char c, const char* what) {
        const Token& t = peek();
        if (!(t.kind == TokKind::Op && t.text.size() == 1 && t.text[0] == c))
            throw ParseError(std::string("expected '") + c + "' " + what, t.offset);
        ++pos_;
    }

    int push(ExprNode n) {
        nodes_->push_back(n);
        return static_cast<int>(nodes_->size()) - 1;
    }

    const ExprNode& node(int i) const { return (*nodes_)[static_cast<std::size_t>(i)]; }

    bool constant_of(int i, double* out) const {
        if (node(i).kind != ExprKind::Number) return false;
        *out = node(i).number;
        return true;
    }

    /// Constant folding: collapse a freshly built node whose children are all
    /// literals, but only when the operation is domain-valid at those values
    /// ("1/0" stays a tree and fails at evaluation time, not parse time).
    int fold(int i) {
        const ExprNode n = node(i);
        double x = 0.0, y = 0.0;
        auto lit = [&](double v) {
            ExprNode c{};
            c.kind = ExprKind::Number;
            c.number = v;
            c.offset = n.offset;
            return push(c);
        };
        try {
            switch (n.kind) {
                case ExprKind::Add:
                    if (constant_of(n.a, &x) && constant_of(n.b, &y)) return lit(x + y);
                    break;
                case ExprKind::Sub:
                    if (constant_of(n.a, &x) && constant_of(n.b, &y)) return lit(x - y);
                    break;
                case ExprKind::Mul:
                    if (constant_of(n.a, &x) && constant_of(n.b, &y)) return lit(x * y);
                    break;
                case ExprKind::Div:
                    if (constant_of(n.a, &x) && constant_of(n.b, &y))
                        return lit(checked_div(x, y));
                    break;
                case ExprKind::Neg:
                    if (constant_of(n.a, &x)) return lit(-x);
                    break;
                case ExprKind::Pow:
                    if (constant_of(n.a, &x)) return lit(checked_pow(x, n.number));
                    break;
                case ExprKind::Call:
                    if (constant_of(n.a, &x)) return lit(apply_func(n.func, x));
                    break;
                default:
                    break;
            }
        } catch (const DomainError&) {
            // not foldable; keep the tree and let evaluation report it
        }
        return i;
    }

    int parse_expr(int depth) {
        check_depth(depth);
        int lhs = parse_term(depth + 1);
        for (;;) {
            const Token& t = peek();
            if (accept_op('+')) {
                int rhs = parse_term(depth + 1);
                lhs = fold(push({ExprKind::Add, 0.0, -1, FuncId::Sin, lhs, rhs, t.offset}));
            } else if (accept_op('-')) {
                int rhs = parse_term(depth + 1);
                lhs = fold(push({ExprKind::Sub, 0.0, -1, FuncId::Sin, lhs, rhs, t.offset}));
            } else {
                return lhs;
            }
        }
    }

    int parse_term(int depth) {
        check_depth(depth);
        int lhs = parse_factor(depth + 1);
        for (;;) {
            const Token& t = peek();
            if (accept_op('*')) {
                int rhs = parse_factor(depth + 1);
                lhs = fold(push({ExprKind::Mul, 0.0, -1, FuncId::Sin, lhs, rhs, t.offset}));
            } else if (accept_op('/')) {
                int rhs = parse_factor(depth + 1);
                lhs = fold(push({ExprKind::Div, 0.0, -1, FuncId::Sin, lhs, rhs, t.offset}));
            } else {
                return lhs;
            }
        }
    }

    // factor = ["-"] base [ "^" exponent ] ; '^' binds tighter than the minus.
    int parse_factor(int depth) {
        check_depth(depth);
        const Token& t = peek();
        bool negate = false;
        std::uint32_t neg_off = t.offset;
        if (accept_op('-')) negate = true;
        int base = parse_base(depth + 1);
        const Token& caret = peek();
        if (accept_op('^')) {
            double expo = parse_exponent(depth + 1);
            base = fold(push({ExprKind::Pow, expo, -1, FuncId::Sin, base, -1, caret.offset}));
        }
        if (negate)
            base = fold(push({ExprKind::Neg, 0.0, -1, FuncId::Sin, base, -1, neg_off}));
        return base;
    }

    // exponent = signed_number | "(" constant-foldable expr ")"
    double parse_exponent(int depth) {
        const Token& t = peek();
        if (t.kind == TokKind::Number) {
            next();
            return t.number;
        }
        if (t.kind == TokKind::Op && t.text == "-") {
            next();
            const Token& num = peek();
            if (num.kind != TokKind::Number)
                throw ParseError("expected number after '-' in exponent", num.offset);
            next();
            return -num.number;
        }
        if (t.kind == TokKind::Op && t.text == "+") {
            next();
            const Token& num = peek();
            if (num.kind != TokKind::Number)
                throw ParseError("expected number after '+' in exponent", num.offset);
            next();
            return num.number;
        }
        if (t.kind == TokKind::Op && t.text == "(") {
            next();
            int sub = parse_expr(depth + 1);
            expect_op(')', "to close exponent");
            double value = 0.0;
            if (!constant_of(sub, &value))
                throw ParseError("non-constant exponent", t.offset);
            return value;
        }
        throw ParseError("expected numeric exponent after '^'", t.offset);
    }

    int parse_base(int depth) {
        check_depth(depth);
        const Token& t = peek();
        if (t.kind == TokKind::Number) {
            next();
            ExprNode n{};
            n.kind = ExprKind::Number;
            n.number = t.number;
            n.offset = t.offset;
            return push(n);
        }
        if (t.kind == TokKind::Ident) {
            next();
            if (auto f = func_id(t.text)) {
                const Token& paren = peek();
                if (!(paren.kind == TokKind::Op && paren.text == "("))
                    throw ParseError("function name '" + std::string(t.text) +
                                     "' used without argument list", t.offset);
                next();
                int arg = parse_expr(depth + 1);
                expect_op(')', "to close function argument");
                return fold(push({ExprKind::Call, 0.0, -1, *f, arg, -1, t.offset}));
            }
            for (std::size_t v = 0; v < vars_.size(); ++v) {
                if (vars_[v] == t.text) {
                    ExprNode n{};
                    n.kind = ExprKind::Variable;
                    n.var = static_cast<int>(v);
                    n.offset = t.offset;
                    return push(n);
                }
            }
            throw ParseError("unknown identifier '" + std::string(t.text) + "'",
                             t.offset);
        }
        if (t.kind == TokKind::Op && t.text == "(") {
            next();
            int sub = parse_expr(depth + 1);
            expect_op(')', "to close parenthesis");
            return sub;
        }
        if (t.kind == TokKind::End)
            throw ParseError("unexpected end of input", t.offset);
        throw ParseError("unexpected token '" + std::string(t.text) + "'",
                         t.offset);
    }

    void check_depth(int depth) const {
        if (depth > kMaxDepth)
            throw ParseError("expression nested too deeply", peek().offset);
    }

    std::vector<Token> tokens_;
    std::size_t pos_ = 0;
    std::vector<std::string> vars_;
    std::vector<ExprNode>* nodes_ = nullptr;
};

/// Drops nodes unreachable from the root (left behind by constant folding)
/// and renumbers children. Keeps evaluation a dense forward pass.
inline void compact(std::vector<ExprNode>& nodes, int& root) {
    if (root < 0) return;
    std::vector<char> live(nodes.size(), 0);
    std::vector<int> stack{root};
    while (!stack.empty()) {
        int i = stack.back();
        stack.pop_back();
        if (live[static_cast<std::size_t>(i)]) continue;
        live[static_cast<std::size_t>(i)] = 1;
        const ExprNode& n = nodes[static_cast<std::size_t>(i)];
        if (n.a >= 0) stack.push_back(n.a);
        if (n.b >= 0) stack.push_back(n.b);
    }
    std::vector<int> remap(nodes.size(), -1);
    std::vector<ExprNode> out;
    out.reserve(nodes.size());
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        if (!live[i]) continue;
        remap[i] = static_cast<int>(out.size());
        ExprNode n = nodes[i];
        if (n.a >= 0) n.a = remap[static_cast<std::size_t>(n.a)];
        if (n.b >= 0) n.b = remap[static_cast<std::size_t>(n.b)];
        out.push_back(n);
    }
    root = remap[static_cast<std::size_t>(root)];
    nodes = std::move(out);
}

}  // namespace detail

/// Parses `src` over the given coordinate names. Parameter identifiers are
/// replaced by their literal values at the token level before parsing, so
/// the resulting Expr mentions coordinates only.
inline Expr parse_expression(std::string_view src,
                             std::span<const std::string> variables,
                             const std::map<std::string, double>& params = {}) {
    // Token-level substitution happens inside the parser's identifier lookup:
    // simplest is to pre-substitute by re-lexing here and treating parameter
    // names as literals.
    Expr e;
    for (const auto& v : variables) e.vars_.push_back(v);

    if (params.empty()) {
        detail::Parser p(src, variables);
        e.root_ = p.run(e.nodes_);
    } else {
        // Rebuild the source with parameters replaced by their literal values;
        // offsets reported in errors refer to the substituted text.
        auto tokens = detail::lex(src);
        std::string substituted;
        substituted.reserve(src.size() + 16 * params.size());
        for (const auto& t : tokens) {
            if (t.kind == detail::TokKind::End) break;
            if (!substituted.empty()) substituted.push_back(' ');
            if (t.kind == detail::TokKind::Ident) {
                auto it = params.find(std::string(t.text));
                if (it != params.end()) {
                    // Parenthesize so negative values stay a single base.
                    substituted += "(" + detail::format_double(it->second) + ")";
                    continue;
                }
            }
            substituted.append(t.text);
        }
        detail::Parser p(substituted, variables);
        e.root_ = p.run(e.nodes_);
    }
    detail::compact(e.nodes_, e.root_);
    return e;
}

inline std::string serialize_expression(const Expr& e) { return e.to_string(); }

// ----------------------------------------------------------------------------
// Evaluation
// ----------------------------------------------------------------------------

namespace detail {

inline int precedence(ExprKind k) {
    switch (k) {
        case ExprKind::Add:
        case ExprKind::Sub: return 1;
        case ExprKind::Mul:
        case ExprKind::Div: return 2;
        case ExprKind::Neg: return 3;
        case ExprKind::Pow: return 4;
        default: return 5;  // atoms and calls never need parentheses
    }
}

/// Double-precision evaluation policy (checked math).
struct DoubleOps {
    static double div(double a, double b) { return checked_div(a, b); }
    static double pow_const(double b, double e) { return checked_pow(b, e); }
    static double call(FuncId f, double x) { return apply_func(f, x); }
};

}  // namespace detail

template <class Scalar, class Ops>
Scalar Expr::eval_with(std::span<const Scalar> values, const Ops& ops) const {
    if (root_ < 0) throw Error("evaluating empty expression");
    if (values.size() != vars_.size())
        throw Error("expression over " + std::to_string(vars_.size()) +
                    " variables evaluated with " + std::to_string(values.size()));
    std::vector<Scalar> out;
    out.reserve(nodes_.size());
    for (std::size_t idx = 0; idx < nodes_.size(); ++idx) {
        const ExprNode& n = nodes_[idx];
        switch (n.kind) {
            case ExprKind::Number:
                out.push_back(ops.constant(n.number));
                break;
            case ExprKind::Variable:
                out.push_back(values[static_cast<std::size_t>(n.var)]);
                break;
            case ExprKind::Add:
                out.push_back(out[static_cast<std::size_t>(n.a)] + out[static_cast<std::size_t>(n.b)]);
                break;
            case ExprKind::Sub:
                out.push_back(out[static_cast<std::size_t>(n.a)] - out[static_cast<std::size_t>(n.b)]);
                break;
            case ExprKind::Mul:
                out.push_back(out[static_cast<std::size_t>(n.a)] * out[static_cast<std::size_t>(n.b)]);
                break;
            case ExprKind::Div:
            case ExprKind::Pow:
            case ExprKind::Call:
            case ExprKind::Neg:
                try {
                    if (n.kind == ExprKind::Div)
                        out.push_back(ops.div(out[static_cast<std::size_t>(n.a)],
                                              out[static_cast<std::size_t>(n.b)]));
                    else if (n.kind == ExprKind::Pow)
                        out.push_back(ops.pow_const(out[static_cast<std::size_t>(n.a)], n.number));
                    else if (n.kind == ExprKind::Call)
                        out.push_back(ops.call(n.func, out[static_cast<std::size_t>(n.a)]));
                    else
                        out.push_back(-out[static_cast<std::size_t>(n.a)]);
                } catch (const DomainError& err) {
                    throw DomainError(std::string(err.what()) +
                                      " in subexpression '" +
                                      render(static_cast<int>(idx), 0) +
                                      "' at offset " + std::to_string(n.offset));
                }
                break;
        }
    }
    return out[static_cast<std::size_t>(root_)];
}

namespace detail {
/// Policy adapter giving eval_with a uniform surface over plain doubles.
struct DoubleOpsBound {
    double constant(double v) const { return v; }
    double div(double a, double b) const { return DoubleOps::div(a, b); }
    double pow_const(double b, double e) const { return DoubleOps::pow_const(b, e); }
    double call(FuncId f, double x) const { return DoubleOps::call(f, x); }
};
}  // namespace detail

inline double Expr::eval(std::span<const double> values) const {
    return eval_with<double>(values, detail::DoubleOpsBound{});
}

inline std::string Expr::render(int node, int parent_prec) const {
    const ExprNode& n = nodes_[static_cast<std::size_t>(node)];
    const int prec = detail::precedence(n.kind);
    std::string s;
    switch (n.kind) {
        case ExprKind::Number:
            s = detail::format_double(n.number);
            if (n.number < 0.0) s = "(" + s + ")";  // keep a single base token
            return s;
        case ExprKind::Variable:
            return vars_[static_cast<std::size_t>(n.var)];
        case ExprKind::Add:
            s = render(n.a, prec) + " + " + render(n.b, prec);
            break;
        case ExprKind::Sub:
            // right side needs parens at equal precedence: a - (b + c)
            s = render(n.a, prec) + " - " + render(n.b, prec + 1);
            break;
        case ExprKind::Mul:
            s = render(n.a, prec) + "*" + render(n.b, prec);
            break;
        case ExprKind::Div:
            s = render(n.a, prec) + "/" + render(n.b, prec + 1);
            break;
        case ExprKind::Neg:
            s = "-" + render(n.a, prec);
            break;
        case ExprKind::Pow: {
            // The grammar allows only an atomic base before '^' without
            // parens, and forbids chained '^'.
            std::string base = render(n.a, 5);
            std::string ex = detail::format_double(n.number);
            if (!ex.empty() && ex[0] == '-')
                ex = "(" + ex + ")";
            s = base + "^" + ex;
            break;
        }
        case ExprKind::Call:
            return std::string(kFuncNames[static_cast<std::size_t>(n.func)]) +
                   "(" + render(n.a, 0) + ")";
    }
    if (prec < parent_prec) s = "(" + s + ")";
    return s;
}

inline std::string Expr::to_string() const {
    if (root_ < 0) return "0";
    return render(root_, 0);
}

}  // namespace ccc
