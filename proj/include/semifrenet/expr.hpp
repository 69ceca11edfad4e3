#pragma once

#include <cctype>
#include <cmath>
#include <type_traits>
#include <cstdio>
#include <memory>
#include <string>
#include <string_view>

#include "semifrenet/errors.hpp"
#include "semifrenet/jet.hpp"

namespace semifrenet {

enum class ExprKind { Number, Var, Neg, Add, Sub, Mul, Div, Pow, Call };
enum class Func { Sin, Cos, Sinh, Cosh, Exp, Sqrt };

inline const char* func_name(Func f) {
    switch (f) {
    case Func::Sin: return "sin";
    case Func::Cos: return "cos";
    case Func::Sinh: return "sinh";
    case Func::Cosh: return "cosh";
    case Func::Exp: return "exp";
    default: return "sqrt";
    }
}

struct Expr;
using ExprPtr = std::shared_ptr<const Expr>;

/// AST over the parameter symbol `s`, literals, + - * /, unary minus,
/// integer powers, and {sin, cos, sinh, cosh, exp, sqrt}.
struct Expr {
    ExprKind kind;
    double number = 0.0;  // Number
    int exponent = 0;     // Pow
    Func func = Func::Sin; // Call
    ExprPtr lhs, rhs;

    static ExprPtr make_number(double v) {
        auto e = std::make_shared<Expr>();
        e->kind = ExprKind::Number;
        e->number = v;
        return e;
    }
    static ExprPtr make_var() {
        auto e = std::make_shared<Expr>();
        e->kind = ExprKind::Var;
        return e;
    }
    static ExprPtr make_unary(ExprKind k, ExprPtr x) {
        auto e = std::make_shared<Expr>();
        e->kind = k;
        e->lhs = std::move(x);
        return e;
    }
    static ExprPtr make_binary(ExprKind k, ExprPtr a, ExprPtr b) {
        auto e = std::make_shared<Expr>();
        e->kind = k;
        e->lhs = std::move(a);
        e->rhs = std::move(b);
        return e;
    }
    static ExprPtr make_pow(ExprPtr base, int exponent) {
        auto e = std::make_shared<Expr>();
        e->kind = ExprKind::Pow;
        e->lhs = std::move(base);
        e->exponent = exponent;
        return e;
    }
    static ExprPtr make_call(Func f, ExprPtr arg) {
        auto e = std::make_shared<Expr>();
        e->kind = ExprKind::Call;
        e->func = f;
        e->lhs = std::move(arg);
        return e;
    }
};

namespace detail {

// true when e is a literal under a (possibly empty) chain of unary minuses;
// the signed value lands in v
inline bool literal_chain(const Expr& e, double& v) {
    if (e.kind == ExprKind::Number) {
        v = e.number;
        return true;
    }
    if (e.kind == ExprKind::Neg && literal_chain(*e.lhs, v)) {
        v = -v;
        return true;
    }
    return false;
}

} // namespace detail

inline bool structurally_equal(const Expr& a, const Expr& b) {
    // the parser never yields a negative literal (it yields Neg over a
    // positive one), so compare literals up to sign normalization
    double va = 0.0, vb = 0.0;
    bool la = detail::literal_chain(a, va);
    bool lb = detail::literal_chain(b, vb);
    if (la || lb) return la && lb && va == vb;
    if (a.kind != b.kind) return false;
    switch (a.kind) {
    case ExprKind::Number: return a.number == b.number;
    case ExprKind::Var: return true;
    case ExprKind::Neg:
    case ExprKind::Call:
        return (a.kind != ExprKind::Call || a.func == b.func) &&
               structurally_equal(*a.lhs, *b.lhs);
    case ExprKind::Pow:
        return a.exponent == b.exponent && structurally_equal(*a.lhs, *b.lhs);
    default:
        return structurally_equal(*a.lhs, *b.lhs) &&
               structurally_equal(*a.rhs, *b.rhs);
    }
}

namespace detail {

class Parser {
public:
    explicit Parser(std::string_view text) : text_(text) {}

    ExprPtr parse() {
        if (text_.empty()) throw parse_error("empty expression", 0);
        ExprPtr e = parse_sum();
        skip_ws();
        if (pos_ != text_.size()) throw parse_error("unexpected trailing input", pos_);
        return e;
    }

private:
    std::string_view text_;
    std::size_t pos_ = 0;

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

    char peek() {
        skip_ws();
        return pos_ < text_.size() ? text_[pos_] : '\0';
    }

    ExprPtr parse_sum() {
        ExprPtr e = parse_term();
        for (;;) {
            if (eat('+')) e = Expr::make_binary(ExprKind::Add, e, parse_term());
            else if (eat('-')) e = Expr::make_binary(ExprKind::Sub, e, parse_term());
            else return e;
        }
    }

    ExprPtr parse_term() {
        ExprPtr e = parse_unary();
        for (;;) {
            if (eat('*')) e = Expr::make_binary(ExprKind::Mul, e, parse_unary());
            else if (eat('/')) e = Expr::make_binary(ExprKind::Div, e, parse_unary());
            else return e;
        }
    }

    ExprPtr parse_unary() {
        if (eat('-')) return Expr::make_unary(ExprKind::Neg, parse_unary());
        return parse_power();
    }

    ExprPtr parse_power() {
        ExprPtr base = parse_primary();
        if (eat('^')) {
            skip_ws();
            std::size_t at = pos_;
            bool neg = eat('-');
            skip_ws();
            if (pos_ >= text_.size() || !std::isdigit(static_cast<unsigned char>(text_[pos_])))
                throw parse_error("expected integer exponent", pos_);
            long v = 0;
            while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
                v = v * 10 + (text_[pos_] - '0');
                if (v > 1000) throw parse_error("exponent too large", at);
                ++pos_;
            }
            return Expr::make_pow(base, static_cast<int>(neg ? -v : v));
        }
        return base;
    }

    ExprPtr parse_primary() {
        skip_ws();
        if (pos_ >= text_.size()) throw parse_error("unexpected end of input", pos_);
        char c = text_[pos_];
        if (c == '(') {
            ++pos_;
            ExprPtr e = parse_sum();
            if (!eat(')')) throw parse_error("expected ')'", pos_);
            return e;
        }
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return parse_number();
        if (std::isalpha(static_cast<unsigned char>(c))) return parse_ident();
        throw parse_error(std::string("unexpected character '") + c + "'", pos_);
    }

    ExprPtr parse_number() {
        std::size_t start = pos_;
        while (pos_ < text_.size() &&
               (std::isdigit(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '.'))
            ++pos_;
        // exponent part, e.g. 1.5e-3
        if (pos_ < text_.size() && (text_[pos_] == 'e' || text_[pos_] == 'E')) {
            std::size_t save = pos_;
            ++pos_;
            if (pos_ < text_.size() && (text_[pos_] == '+' || text_[pos_] == '-')) ++pos_;
            if (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
                while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_])))
                    ++pos_;
            } else {
                pos_ = save; // 'e' belonged to something else; not a valid exponent
            }
        }
        std::string tok(text_.substr(start, pos_ - start));
        try {
            std::size_t used = 0;
            double v = std::stod(tok, &used);
            if (used != tok.size()) throw parse_error("malformed number", start);
            return Expr::make_number(v);
        } catch (const std::invalid_argument&) {
            throw parse_error("malformed number", start);
        } catch (const std::out_of_range&) {
            throw parse_error("number out of range", start);
        }
    }

    ExprPtr parse_ident() {
        std::size_t start = pos_;
        while (pos_ < text_.size() && std::isalpha(static_cast<unsigned char>(text_[pos_])))
            ++pos_;
        std::string name(text_.substr(start, pos_ - start));
        if (name == "s") return Expr::make_var();
        Func f;
        if (name == "sin") f = Func::Sin;
        else if (name == "cos") f = Func::Cos;
        else if (name == "sinh") f = Func::Sinh;
        else if (name == "cosh") f = Func::Cosh;
        else if (name == "exp") f = Func::Exp;
        else if (name == "sqrt") f = Func::Sqrt;
        else throw parse_error("unknown identifier '" + name + "'", start);
        if (!eat('(')) throw parse_error("expected '(' after function name", pos_);
        ExprPtr arg = parse_sum();
        if (!eat(')')) throw parse_error("expected ')'", pos_);
        return Expr::make_call(f, arg);
    }
};

} // namespace detail

inline ExprPtr parse_expr(std::string_view text) {
    return detail::Parser(text).parse();
}

/// Fully parenthesized canonical form; re-parsing yields an identical tree.
inline std::string print_expr(const Expr& e) {
    switch (e.kind) {
    case ExprKind::Number: {
        char buf[40];
        std::snprintf(buf, sizeof(buf), "%.17g", e.number);
        // parenthesize negative literals so they survive under '^'
        if (e.number < 0.0) return std::string("(") + buf + ")";
        return buf;
    }
    case ExprKind::Var: return "s";
    case ExprKind::Neg: return "(-" + print_expr(*e.lhs) + ")";
    case ExprKind::Add: return "(" + print_expr(*e.lhs) + " + " + print_expr(*e.rhs) + ")";
    case ExprKind::Sub: return "(" + print_expr(*e.lhs) + " - " + print_expr(*e.rhs) + ")";
    case ExprKind::Mul: return "(" + print_expr(*e.lhs) + " * " + print_expr(*e.rhs) + ")";
    case ExprKind::Div: return "(" + print_expr(*e.lhs) + " / " + print_expr(*e.rhs) + ")";
    case ExprKind::Pow:
        return "(" + print_expr(*e.lhs) + "^" + std::to_string(e.exponent) + ")";
    default:
        return std::string(func_name(e.func)) + "(" + print_expr(*e.lhs) + ")";
    }
}

namespace detail {

template <class T>
T make_scalar(double v) {
    return static_cast<T>(v);
}
template <>
inline Jet<1> make_scalar<Jet<1>>(double v) { return Jet<1>::constant(v); }
template <>
inline Jet<2> make_scalar<Jet<2>>(double v) { return Jet<2>::constant(v); }
template <>
inline Jet<3> make_scalar<Jet<3>>(double v) { return Jet<3>::constant(v); }
template <>
inline Jet<4> make_scalar<Jet<4>>(double v) { return Jet<4>::constant(v); }
template <>
inline Jet<5> make_scalar<Jet<5>>(double v) { return Jet<5>::constant(v); }
template <>
inline Jet<6> make_scalar<Jet<6>>(double v) { return Jet<6>::constant(v); }

// plain-scalar fallbacks so eval<double> and eval<long double> compile
// against the same function names the jet overloads use
template <class T, class = std::enable_if_t<std::is_arithmetic_v<T>>>
T pow(T x, int e) {
    return std::pow(x, static_cast<T>(e));
}
template <class T, class = std::enable_if_t<std::is_arithmetic_v<T>>>
T checked_sqrt(T x) {
    if (x <= T(0)) throw error("sqrt of non-positive value");
    return std::sqrt(x);
}
template <int N>
Jet<N> checked_sqrt(const Jet<N>& x) {
    return semifrenet::sqrt(x);
}
template <class T, class = std::enable_if_t<std::is_arithmetic_v<T>>>
T checked_div(T a, T b) {
    if (b == T(0)) throw error("division by zero");
    return a / b;
}
template <int N>
Jet<N> checked_div(const Jet<N>& a, const Jet<N>& b) {
    return a / b;
}

} // namespace detail

/// Evaluate an expression over any scalar supporting the arithmetic above
/// (double, long double, Jet<N>).
template <class T>
T eval_expr(const Expr& e, const T& s) {
    using std::sin; using std::cos; using std::sinh; using std::cosh; using std::exp;
    switch (e.kind) {
    case ExprKind::Number: return detail::make_scalar<T>(e.number);
    case ExprKind::Var: return s;
    case ExprKind::Neg: return -eval_expr(*e.lhs, s);
    case ExprKind::Add: return eval_expr(*e.lhs, s) + eval_expr(*e.rhs, s);
    case ExprKind::Sub: return eval_expr(*e.lhs, s) - eval_expr(*e.rhs, s);
    case ExprKind::Mul: return eval_expr(*e.lhs, s) * eval_expr(*e.rhs, s);
    case ExprKind::Div:
        return detail::checked_div(eval_expr(*e.lhs, s), eval_expr(*e.rhs, s));
    case ExprKind::Pow: {
        T base = eval_expr(*e.lhs, s);
        using detail::pow;
        using semifrenet::pow;
        return pow(base, e.exponent);
    }
    default: {
        T arg = eval_expr(*e.lhs, s);
        switch (e.func) {
        case Func::Sin: return sin(arg);
        case Func::Cos: return cos(arg);
        case Func::Sinh: return sinh(arg);
        case Func::Cosh: return cosh(arg);
        case Func::Exp: return exp(arg);
        default: return detail::checked_sqrt(arg);
        }
    }
    }
}

/// Value and derivatives through order 4 at s0. Domain errors carry s0.
inline Jet4 eval_jet(const Expr& e, double s0) {
    try {
        return eval_expr(e, Jet4::variable(s0));
    } catch (const error& err) {
        throw eval_domain_error(err.what(), s0);
    }
}

/// Same, at a caller-chosen jet order (the Frenet engine needs order > 4).
template <int N>
Jet<N> eval_jet_n(const Expr& e, double s0) {
    try {
        return eval_expr(e, Jet<N>::variable(s0));
    } catch (const error& err) {
        throw eval_domain_error(err.what(), s0);
    }
}

/// Plain value; domain errors carry s0.
inline double eval_value(const Expr& e, double s0) {
    try {
        return eval_expr(e, s0);
    } catch (const error& err) {
        throw eval_domain_error(err.what(), s0);
    }
}

} // namespace semifrenet
