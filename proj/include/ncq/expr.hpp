#pragma once

/// @file expr.hpp
/// Univariate integrand expressions: parser, printer, and evaluation over
/// doubles and over Jet4.
///
/// Grammar, lowest to highest precedence:
///
///     expr    := term   (('+' | '-') term)*
///     term    := unary  (('*' | '/') unary)*
///     unary   := '-' unary | power
///     power   := primary ('^' unary)?          right associative
///     primary := number | 'x' | 'pi' | 'e' | name '(' expr ')' | '(' expr ')'
///
/// so "-x^2" is -(x^2) and "2^-1" is 2^(-1).  Implicit multiplication is not
/// accepted.

#include "ncq/error.hpp"
#include "ncq/jet.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <memory>
#include <numbers>
#include <string>
#include <string_view>
#include <variant>

namespace ncq {

enum class BinaryOp { Add, Sub, Mul, Div, Pow };

inline constexpr char binary_symbol(BinaryOp op) {
    switch (op) {
    case BinaryOp::Add: return '+';
    case BinaryOp::Sub: return '-';
    case BinaryOp::Mul: return '*';
    case BinaryOp::Div: return '/';
    case BinaryOp::Pow: return '^';
    }
    return '?';
}

struct ExprNode;
using NodePtr = std::shared_ptr<const ExprNode>;

namespace node {
struct Number {
    double value;
};
struct Variable {};
struct Negate {
    NodePtr operand;
};
struct Binary {
    BinaryOp op;
    NodePtr lhs;
    NodePtr rhs;
};
struct Call {
    Function fn;
    NodePtr arg;
};
} // namespace node

struct ExprNode {
    std::variant<node::Number, node::Variable, node::Negate, node::Binary, node::Call> data;
    bool has_variable = false;
};

/// Immutable expression tree; copies share nodes.
class Expr {
public:
    explicit Expr(NodePtr root) : root_(std::move(root)) {}

    const ExprNode& root() const { return *root_; }
    const NodePtr& root_ptr() const { return root_; }

    static Expr number(double v) { return Expr(make(node::Number{v}, false)); }
    static Expr variable() { return Expr(make(node::Variable{}, true)); }
    static Expr negate(const Expr& e) { return Expr(make(node::Negate{e.root_}, e.root_->has_variable)); }
    static Expr binary(BinaryOp op, const Expr& l, const Expr& r) {
        return Expr(make(node::Binary{op, l.root_, r.root_}, l.root_->has_variable || r.root_->has_variable));
    }
    static Expr call(Function fn, const Expr& arg) {
        return Expr(make(node::Call{fn, arg.root_}, arg.root_->has_variable));
    }

private:
    template <class N>
    static NodePtr make(N n, bool has_variable) {
        return std::make_shared<const ExprNode>(ExprNode{std::move(n), has_variable});
    }

    NodePtr root_;
};

// ---------------------------------------------------------------------------
// Parser
// ---------------------------------------------------------------------------

namespace detail {

class Parser {
public:
    explicit Parser(std::string_view text) : text_(text) {}

    Expr parse_all() {
        skip_ws();
        if (pos_ == text_.size()) {
            throw ParseError(ParseErrorKind::EmptyInput, pos_, "expression is empty");
        }
        Expr e = parse_expr();
        skip_ws();
        if (pos_ != text_.size()) {
            if (text_[pos_] == ')') {
                throw ParseError(ParseErrorKind::UnbalancedParenthesis, pos_, "unmatched ')'");
            }
            throw ParseError(ParseErrorKind::TrailingInput, pos_, "unexpected '" + std::string(1, text_[pos_]) + "'");
        }
        return e;
    }

private:
    Expr parse_expr() {
        Expr lhs = parse_term();
        for (;;) {
            skip_ws();
            if (accept('+')) {
                lhs = Expr::binary(BinaryOp::Add, lhs, parse_term());
            } else if (accept('-')) {
                lhs = Expr::binary(BinaryOp::Sub, lhs, parse_term());
            } else {
                return lhs;
            }
        }
    }

    Expr parse_term() {
        Expr lhs = parse_unary();
        for (;;) {
            skip_ws();
            if (accept('*')) {
                lhs = Expr::binary(BinaryOp::Mul, lhs, parse_unary());
            } else if (accept('/')) {
                lhs = Expr::binary(BinaryOp::Div, lhs, parse_unary());
            } else {
                return lhs;
            }
        }
    }

    Expr parse_unary() {
        skip_ws();
        if (accept('-')) {
            return Expr::negate(parse_unary());
        }
        return parse_power();
    }

    Expr parse_power() {
        Expr base = parse_primary();
        skip_ws();
        if (accept('^')) {
            return Expr::binary(BinaryOp::Pow, base, parse_unary());
        }
        return base;
    }

    Expr parse_primary() {
        skip_ws();
        if (pos_ == text_.size()) {
            throw ParseError(ParseErrorKind::UnexpectedToken, pos_, "expected an operand, found end of input");
        }
        const char c = text_[pos_];
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
            return parse_number();
        }
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            return parse_identifier();
        }
        if (c == '(') {
            const std::size_t open = pos_;
            ++pos_;
            Expr inner = parse_expr();
            expect_close(open);
            return inner;
        }
        throw ParseError(ParseErrorKind::UnexpectedToken, pos_, "unexpected '" + std::string(1, c) + "'");
    }

    Expr parse_number() {
        const std::size_t start = pos_;
        auto digits = [&] {
            std::size_t n = 0;
            while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
                ++pos_;
                ++n;
            }
            return n;
        };
        std::size_t mantissa_digits = digits();
        if (pos_ < text_.size() && text_[pos_] == '.') {
            ++pos_;
            mantissa_digits += digits();
        }
        if (mantissa_digits == 0) {
            throw ParseError(ParseErrorKind::UnexpectedToken, start, "malformed number");
        }
        if (pos_ < text_.size() && (text_[pos_] == 'e' || text_[pos_] == 'E')) {
            std::size_t probe = pos_ + 1;
            if (probe < text_.size() && (text_[probe] == '+' || text_[probe] == '-')) {
                ++probe;
            }
            if (probe < text_.size() && std::isdigit(static_cast<unsigned char>(text_[probe]))) {
                pos_ = probe;
                digits();
            }
        }
        double value = 0.0;
        const char* first = text_.data() + start;
        const char* last = text_.data() + pos_;
        const auto [ptr, ec] = std::from_chars(first, last, value);
        if (ec != std::errc() || ptr != last) {
            throw ParseError(ParseErrorKind::UnexpectedToken, start, "malformed number");
        }
        return Expr::number(value);
    }

    Expr parse_identifier() {
        const std::size_t start = pos_;
        while (pos_ < text_.size() &&
               (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_')) {
            ++pos_;
        }
        const std::string_view name = text_.substr(start, pos_ - start);
        skip_ws();
        const bool followed_by_paren = pos_ < text_.size() && text_[pos_] == '(';
        if (followed_by_paren) {
            Function fn{};
            if (!function_from_name(name, fn)) {
                throw ParseError(ParseErrorKind::UnknownFunction, start, "'" + std::string(name) + "'");
            }
            const std::size_t open = pos_;
            ++pos_;
            Expr arg = parse_expr();
            expect_close(open);
            return Expr::call(fn, arg);
        }
        if (name == "x") {
            return Expr::variable();
        }
        if (name == "pi") {
            return Expr::number(std::numbers::pi);
        }
        if (name == "e") {
            return Expr::number(std::numbers::e);
        }
        Function fn{};
        if (function_from_name(name, fn)) {
            throw ParseError(ParseErrorKind::UnexpectedToken, pos_, "expected '(' after " + std::string(name));
        }
        throw ParseError(ParseErrorKind::UnexpectedToken, start, "unknown identifier '" + std::string(name) + "'");
    }

    void expect_close(std::size_t open) {
        skip_ws();
        if (pos_ == text_.size()) {
            throw ParseError(ParseErrorKind::UnbalancedParenthesis, pos_,
                             "'(' at offset " + std::to_string(open) + " is never closed");
        }
        if (text_[pos_] != ')') {
            throw ParseError(ParseErrorKind::UnexpectedToken, pos_,
                             "expected ')' but found '" + std::string(1, text_[pos_]) + "'");
        }
        ++pos_;
    }

    bool accept(char c) {
        if (pos_ < text_.size() && text_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    void skip_ws() {
        while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) {
            ++pos_;
        }
    }

    std::string_view text_;
    std::size_t pos_ = 0;
};

} // namespace detail

inline Expr parse(std::string_view text) { return detail::Parser(text).parse_all(); }

// ---------------------------------------------------------------------------
// Printing and structural comparison
// ---------------------------------------------------------------------------

inline std::string format_number(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

/// Fully parenthesised text that parses back to the same tree.
inline std::string to_string(const ExprNode& n) {
    return std::visit(
        [](const auto& v) -> std::string {
            using N = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<N, node::Number>) {
                return format_number(v.value);
            } else if constexpr (std::is_same_v<N, node::Variable>) {
                return "x";
            } else if constexpr (std::is_same_v<N, node::Negate>) {
                return "(-" + to_string(*v.operand) + ")";
            } else if constexpr (std::is_same_v<N, node::Binary>) {
                return "(" + to_string(*v.lhs) + " " + binary_symbol(v.op) + " " + to_string(*v.rhs) + ")";
            } else {
                return std::string(function_name(v.fn)) + "(" + to_string(*v.arg) + ")";
            }
        },
        n.data);
}

inline std::string to_string(const Expr& e) { return to_string(e.root()); }

inline bool structurally_equal(const ExprNode& a, const ExprNode& b) {
    if (a.data.index() != b.data.index()) {
        return false;
    }
    return std::visit(
        [&b](const auto& va) -> bool {
            using N = std::decay_t<decltype(va)>;
            const auto& vb = std::get<N>(b.data);
            if constexpr (std::is_same_v<N, node::Number>) {
                return va.value == vb.value;
            } else if constexpr (std::is_same_v<N, node::Variable>) {
                return true;
            } else if constexpr (std::is_same_v<N, node::Negate>) {
                return structurally_equal(*va.operand, *vb.operand);
            } else if constexpr (std::is_same_v<N, node::Binary>) {
                return va.op == vb.op && structurally_equal(*va.lhs, *vb.lhs) && structurally_equal(*va.rhs, *vb.rhs);
            } else {
                return va.fn == vb.fn && structurally_equal(*va.arg, *vb.arg);
            }
        },
        a.data);
}

inline bool structurally_equal(const Expr& a, const Expr& b) { return structurally_equal(a.root(), b.root()); }

// ---------------------------------------------------------------------------
// Evaluation
// ---------------------------------------------------------------------------

namespace detail {

template <class S>
S lift(double v) {
    if constexpr (std::is_same_v<S, double>) {
        return v;
    } else {
        return S::constant(v);
    }
}

template <class S>
S divide(const S& num, const S& den) {
    if constexpr (std::is_same_v<S, double>) {
        if (den == 0.0) {
            throw PoleError("division by zero");
        }
        return num / den;
    } else {
        return num / den;
    }
}

template <class S>
S evaluate(const ExprNode& n, const S& x);

template <class S>
S evaluate_power(const node::Binary& b, const S& x) {
    const S base = evaluate(*b.lhs, x);
    if (!b.rhs->has_variable) {
        const double p = evaluate<double>(*b.rhs, 0.0);
        if (std::isfinite(p) && p == std::trunc(p) && std::fabs(p) <= double(kMaxIntegerExponent)) {
            return integer_power(base, static_cast<std::int64_t>(p));
        }
        return real_power(base, lift<S>(p));
    }
    return real_power(base, evaluate(*b.rhs, x));
}

template <class S>
S evaluate(const ExprNode& n, const S& x) {
    return std::visit(
        [&x](const auto& v) -> S {
            using N = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<N, node::Number>) {
                return lift<S>(v.value);
            } else if constexpr (std::is_same_v<N, node::Variable>) {
                return x;
            } else if constexpr (std::is_same_v<N, node::Negate>) {
                return -evaluate(*v.operand, x);
            } else if constexpr (std::is_same_v<N, node::Binary>) {
                switch (v.op) {
                case BinaryOp::Add: return evaluate(*v.lhs, x) + evaluate(*v.rhs, x);
                case BinaryOp::Sub: return evaluate(*v.lhs, x) - evaluate(*v.rhs, x);
                case BinaryOp::Mul: return evaluate(*v.lhs, x) * evaluate(*v.rhs, x);
                case BinaryOp::Div: return divide(evaluate(*v.lhs, x), evaluate(*v.rhs, x));
                case BinaryOp::Pow: return evaluate_power(v, x);
                }
                return x;
            } else {
                const S arg = evaluate(*v.arg, x);
                if constexpr (std::is_same_v<S, double>) {
                    return apply_function(v.fn, arg);
                } else {
                    return jet_univariate(v.fn, arg);
                }
            }
        },
        n.data);
}

} // namespace detail

inline double eval_value(const Expr& e, double x) { return detail::evaluate<double>(e.root(), x); }

inline Jet4 eval_jet4(const Expr& e, double x) { return detail::evaluate<Jet4>(e.root(), jet_seed_variable(x)); }

/// Adapts an Expr to the evaluator interface used by the rules: callable with
/// a double (value) and with a Jet4 (derivatives through the chain rule).
class ExprFunction {
public:
    explicit ExprFunction(Expr e) : expr_(std::move(e)) {}

    double operator()(double x) const { return eval_value(expr_, x); }
    Jet4 operator()(const Jet4& x) const { return detail::evaluate<Jet4>(expr_.root(), x); }

    const Expr& expr() const { return expr_; }

private:
    Expr expr_;
};

} // namespace ncq
