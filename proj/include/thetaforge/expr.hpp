#pragma once

#include <cctype>
#include <memory>
#include <sstream>
#include <string>
#include <utility>

#include "theta.hpp"

namespace thetaforge {

/// Expression tree over theta functions and their classical specializations,
/// with +, -, *, / and integer/monomial coefficients.  Immutable; nodes are
/// shared freely.
struct ThetaExpr;
using ExprPtr = std::shared_ptr<const ThetaExpr>;

struct ThetaExpr {
    enum class Kind {
        Theta,    // f(a, b)
        Euler,    // f(m), one-argument convention f(-q^k) = (q^k; q^k)_inf
        Phi,      // phi(m) = f(m, m)
        Psi,      // psi(m) = f(m, m^3)
        Chi,      // chi(m) = (-m; m^2)_inf
        G,        // f(-m^2, -m^3) / f(-m, -m^2)
        H,        // f(-m, -m^4) / f(-m, -m^2)
        Monomial, // c * q^e
        Add,
        Sub,
        Mul,
        Div,
        Scale, // integer * expr
    };

    Kind kind;
    MonomialArg a, b; // function arguments
    Int coeff;        // Monomial coefficient / Scale factor
    i64 exp = 0;      // Monomial exponent
    ExprPtr lhs, rhs;

    explicit ThetaExpr(Kind k) : kind(k), coeff(0) {}
};

inline ExprPtr mk_theta(MonomialArg a, MonomialArg b) {
    auto e = std::make_shared<ThetaExpr>(ThetaExpr::Kind::Theta);
    e->a = a;
    e->b = b;
    return e;
}

inline ExprPtr mk_call(ThetaExpr::Kind k, MonomialArg m) {
    auto e = std::make_shared<ThetaExpr>(k);
    e->a = m;
    return e;
}

inline ExprPtr mk_monomial(Int c, i64 e) {
    auto n = std::make_shared<ThetaExpr>(ThetaExpr::Kind::Monomial);
    n->coeff = std::move(c);
    n->exp = e;
    return n;
}

inline ExprPtr mk_binary(ThetaExpr::Kind k, ExprPtr l, ExprPtr r) {
    auto e = std::make_shared<ThetaExpr>(k);
    e->lhs = std::move(l);
    e->rhs = std::move(r);
    return e;
}

inline ExprPtr mk_scale(ExprPtr inner, Int c) {
    auto e = std::make_shared<ThetaExpr>(ThetaExpr::Kind::Scale);
    e->lhs = std::move(inner);
    e->coeff = std::move(c);
    return e;
}

/// Evaluate to an exact truncated series.  Division requires the denominator
/// to be a unit times a power of q.
inline QSeries eval(const ThetaExpr& e, i64 order) {
    using K = ThetaExpr::Kind;
    switch (e.kind) {
    case K::Theta:
        return theta_series(e.a, e.b, order);
    case K::Euler:
        return euler_series(e.a, order);
    case K::Phi:
        return phi_series(e.a, order);
    case K::Psi:
        return psi_series(e.a, order);
    case K::Chi:
        return chi_series(e.a, order);
    case K::G:
        return rr_g_series(e.a, order);
    case K::H:
        return rr_h_series(e.a, order);
    case K::Monomial:
        if (e.exp >= order) return QSeries::zero(order); // truncated away
        return QSeries::monomial(e.coeff, e.exp, order);
    case K::Add:
        return add(eval(*e.lhs, order), eval(*e.rhs, order));
    case K::Sub:
        return sub(eval(*e.lhs, order), eval(*e.rhs, order));
    case K::Mul:
        return mul(eval(*e.lhs, order), eval(*e.rhs, order));
    case K::Div:
        return div(eval(*e.lhs, order), eval(*e.rhs, order));
    case K::Scale:
        return eval(*e.lhs, order).scaled(e.coeff);
    }
    throw error("unreachable expression kind");
}

inline QSeries eval(const ExprPtr& e, i64 order) { return eval(*e, order); }

// ---------------------------------------------------------------------------
// Parser for the expression grammar:
//
//   expr     := term (('+' | '-') term)*
//   term     := factor (('*' | '/') factor)*
//   factor   := INT | monomial | call | '(' expr ')' | INT '*' factor
//   monomial := ['-'] 'q' ['^' INT] | '1' | '-1'
//   call     := NAME '(' monomial (',' monomial)? ')'
//   NAME     in { f, phi, psi, chi, G, H }
//
// Whitespace is insignificant, integer literals unbounded.
// ---------------------------------------------------------------------------

namespace detail {

class Parser {
public:
    explicit Parser(std::string_view text) : text_(text) {}

    ExprPtr parse() {
        ExprPtr e = parse_expr();
        skip_ws();
        if (pos_ != text_.size()) fail("trailing input");
        return e;
    }

private:
    std::string_view text_;
    std::size_t pos_ = 0;

    [[noreturn]] void fail(const std::string& msg) const { throw parse_error(msg, pos_); }

    void skip_ws() {
        while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    }

    char peek() {
        skip_ws();
        return pos_ < text_.size() ? text_[pos_] : '\0';
    }

    bool accept(char c) {
        if (peek() == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    void expect(char c) {
        if (!accept(c)) fail(std::string("expected '") + c + "'");
    }

    Int parse_int() {
        skip_ws();
        std::size_t start = pos_;
        while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
        if (pos_ == start) fail("expected integer");
        return Int(std::string(text_.substr(start, pos_ - start)));
    }

    i64 parse_exponent() {
        Int v = parse_int();
        return static_cast<i64>(v);
    }

    bool at_name() {
        char c = peek();
        return std::isalpha(static_cast<unsigned char>(c)) && c != 'q';
    }

    std::string parse_name() {
        skip_ws();
        std::size_t start = pos_;
        while (pos_ < text_.size() && std::isalpha(static_cast<unsigned char>(text_[pos_]))) ++pos_;
        return std::string(text_.substr(start, pos_ - start));
    }

    // ['-'] 'q' ['^' INT] | '1' | '-1'
    // (the exponent may itself be negative: Laurent monomials like q^-2
    // appear when printed combinations are read back)
    MonomialArg parse_monomial() {
        int sign = accept('-') ? -1 : 1;
        if (peek() == 'q') {
            ++pos_;
            i64 e = 1;
            if (accept('^')) {
                bool neg = accept('-');
                e = parse_exponent();
                if (neg) e = -e;
            }
            return MonomialArg{sign, e};
        }
        if (peek() == '1') {
            ++pos_;
            return MonomialArg{sign, 0};
        }
        fail("expected monomial");
    }

    ExprPtr parse_call() {
        std::size_t at = pos_;
        std::string name = parse_name();
        expect('(');
        MonomialArg first = parse_monomial();
        if (name == "f") {
            if (accept(',')) {
                MonomialArg second = parse_monomial();
                expect(')');
                return mk_theta(first, second);
            }
            expect(')');
            return mk_call(ThetaExpr::Kind::Euler, first);
        }
        using K = ThetaExpr::Kind;
        K kind;
        if (name == "phi")
            kind = K::Phi;
        else if (name == "psi")
            kind = K::Psi;
        else if (name == "chi")
            kind = K::Chi;
        else if (name == "G")
            kind = K::G;
        else if (name == "H")
            kind = K::H;
        else {
            pos_ = at;
            fail("unknown function '" + name + "'");
        }
        if (accept(',')) fail("'" + name + "' takes one argument");
        expect(')');
        return mk_call(kind, first);
    }

    ExprPtr parse_factor() {
        char c = peek();
        if (c == '(') {
            ++pos_;
            ExprPtr e = parse_expr();
            expect(')');
            return e;
        }
        if (at_name()) return parse_call();
        if (c == 'q' || c == '-') {
            // '-' here can only start a monomial: binary minus is consumed by
            // parse_expr, so a leading '-' inside a factor is '-q^k' or '-1'.
            MonomialArg m = parse_monomial();
            return mk_monomial(Int(m.sign), m.exp);
        }
        if (std::isdigit(static_cast<unsigned char>(c))) {
            Int v = parse_int();
            if (accept('*')) return mk_scale(parse_factor(), std::move(v));
            return mk_monomial(std::move(v), 0);
        }
        fail("expected factor");
    }

    ExprPtr parse_term() {
        ExprPtr e = parse_factor();
        for (;;) {
            if (accept('*'))
                e = mk_binary(ThetaExpr::Kind::Mul, e, parse_factor());
            else if (accept('/'))
                e = mk_binary(ThetaExpr::Kind::Div, e, parse_factor());
            else
                return e;
        }
    }

    ExprPtr parse_expr() {
        ExprPtr e = parse_term();
        for (;;) {
            char c = peek();
            if (c == '+') {
                ++pos_;
                e = mk_binary(ThetaExpr::Kind::Add, e, parse_term());
            } else if (c == '-') {
                ++pos_;
                e = mk_binary(ThetaExpr::Kind::Sub, e, parse_term());
            } else {
                return e;
            }
        }
    }
};

} // namespace detail

inline ExprPtr parse(std::string_view text) { return detail::Parser(text).parse(); }

// ---------------------------------------------------------------------------
// Pretty printer.  Output re-parses to an equivalent expression; monomial
// arguments print as -q^k.
// ---------------------------------------------------------------------------

namespace detail {

inline int precedence(ThetaExpr::Kind k) {
    using K = ThetaExpr::Kind;
    switch (k) {
    case K::Add:
    case K::Sub:
        return 1;
    case K::Mul:
    case K::Div:
    case K::Scale:
        return 2;
    default:
        return 3;
    }
}

inline void print_expr(std::ostream& out, const ThetaExpr& e, int parent_prec) {
    using K = ThetaExpr::Kind;
    int prec = precedence(e.kind);
    bool parens = prec < parent_prec;
    if (parens) out << "(";
    switch (e.kind) {
    case K::Theta:
        out << "f(" << e.a.to_string() << "," << e.b.to_string() << ")";
        break;
    case K::Euler:
        out << "f(" << e.a.to_string() << ")";
        break;
    case K::Phi:
        out << "phi(" << e.a.to_string() << ")";
        break;
    case K::Psi:
        out << "psi(" << e.a.to_string() << ")";
        break;
    case K::Chi:
        out << "chi(" << e.a.to_string() << ")";
        break;
    case K::G:
        out << "G(" << e.a.to_string() << ")";
        break;
    case K::H:
        out << "H(" << e.a.to_string() << ")";
        break;
    case K::Monomial: {
        if (e.exp == 0) {
            out << e.coeff.str();
        } else {
            if (e.coeff == -1)
                out << "-";
            else if (e.coeff != 1)
                out << e.coeff.str() << "*";
            out << "q";
            if (e.exp != 1) out << "^" << e.exp;
        }
        break;
    }
    case K::Add:
        print_expr(out, *e.lhs, prec);
        out << " + ";
        print_expr(out, *e.rhs, prec + 1);
        break;
    case K::Sub:
        print_expr(out, *e.lhs, prec);
        out << " - ";
        print_expr(out, *e.rhs, prec + 1);
        break;
    case K::Mul:
        print_expr(out, *e.lhs, prec);
        out << "*";
        print_expr(out, *e.rhs, prec + 1);
        break;
    case K::Div:
        print_expr(out, *e.lhs, prec);
        out << "/";
        print_expr(out, *e.rhs, prec + 1);
        break;
    case K::Scale:
        out << e.coeff.str() << "*";
        print_expr(out, *e.lhs, prec + 1);
        break;
    }
    if (parens) out << ")";
}

} // namespace detail

inline std::string to_string(const ThetaExpr& e) {
    std::ostringstream out;
    detail::print_expr(out, e, 0);
    return out.str();
}

inline std::string to_string(const ExprPtr& e) { return to_string(*e); }

} // namespace thetaforge
