#pragma once

// Polynomial expression language.
//
//   expr    := term { ("+" | "-") term }
//   term    := unary { "*" unary }
//   unary   := ("-" | "+") unary | power
//   power   := primary [ "^" exp ]
//   exp     := INT [ "^" exp ]                 (right associative)
//   primary := NUMBER | IDENT | "(" expr ")"
//   NUMBER  := INT [ "/" INT ]                 (rational literal, nonzero denominator)
//   IDENT   := ("q" | "p") INT                 (1-based, at most n)
//            | "h"                             (only in series expressions)
//
// Whitespace is ignored between tokens. There is no division operator: "/"
// only appears inside a rational literal.

#include <qlift/hseries.hpp>

#include <cctype>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace qlift {

struct Diagnostic {
    std::size_t position;  // 0-based byte offset into the input
    std::string message;
};

struct ParseResult {
    std::optional<Poly> value;
    std::vector<Diagnostic> diagnostics;
    bool ok() const { return value.has_value(); }
};

struct SeriesParseResult {
    std::optional<HSeries> value;
    std::vector<Diagnostic> diagnostics;
    bool ok() const { return value.has_value(); }
};

namespace detail {

constexpr unsigned kMaxExponent = 256;

struct ParseError {
    std::size_t position;
    std::string message;
};

class ExpressionParser {
public:
    // max_hbar < 0 disables the identifier "h".
    ExpressionParser(std::string_view text, std::size_t pairs, int max_hbar)
        : text_(text), pairs_(pairs), max_hbar_(max_hbar) {}

    std::vector<Poly> parse() {
        skip_ws();
        if (at_end()) fail(pos_, "empty expression");
        auto v = expr();
        skip_ws();
        if (!at_end()) {
            if (peek() == ')') fail(pos_, "unbalanced parentheses: unexpected ')'");
            fail(pos_, std::string("unexpected character '") + peek() + "'");
        }
        return v;
    }

private:
    using Value = std::vector<Poly>;

    std::size_t width() const { return max_hbar_ < 0 ? 1 : static_cast<std::size_t>(max_hbar_) + 1; }

    Value constant(const Rational& c) const {
        Value v(width(), Poly(pairs_));
        v[0] = Poly::constant(pairs_, c);
        return v;
    }

    static Value add(Value a, const Value& b, bool subtract) {
        for (std::size_t k = 0; k < a.size(); ++k) {
            if (subtract)
                a[k] -= b[k];
            else
                a[k] += b[k];
        }
        return a;
    }

    Value mul(const Value& a, const Value& b) const {
        Value r(width(), Poly(pairs_));
        for (std::size_t i = 0; i < a.size(); ++i) {
            if (a[i].is_zero()) continue;
            for (std::size_t j = 0; i + j < r.size(); ++j)
                if (!b[j].is_zero()) r[i + j] += a[i] * b[j];
        }
        return r;
    }

    Value expr() {
        Value v = term();
        for (;;) {
            skip_ws();
            if (at_end() || (peek() != '+' && peek() != '-')) return v;
            const bool subtract = get() == '-';
            v = add(std::move(v), term(), subtract);
        }
    }

    Value term() {
        Value v = unary();
        for (;;) {
            skip_ws();
            if (at_end() || peek() != '*') return v;
            get();
            v = mul(v, unary());
        }
    }

    Value unary() {
        skip_ws();
        if (!at_end() && (peek() == '-' || peek() == '+')) {
            const bool negate = get() == '-';
            Value v = unary();
            if (negate)
                for (auto& c : v) c *= Rational(-1);
            return v;
        }
        return power();
    }

    Value power() {
        Value base = primary();
        skip_ws();
        if (at_end() || peek() != '^') return base;
        get();
        const unsigned k = exponent();
        Value r = constant(Rational(1));
        for (unsigned i = 0; i < k; ++i) r = mul(r, base);
        return r;
    }

    unsigned exponent() {
        skip_ws();
        const std::size_t start = pos_;
        if (at_end() || !std::isdigit(static_cast<unsigned char>(peek())))
            fail(start, "exponent must be a nonnegative integer literal");
        Integer base = digits();
        skip_ws();
        Integer k = base;
        if (!at_end() && peek() == '^') {
            get();
            const unsigned inner = exponent();
            if (inner > kMaxExponent) fail(start, "exponent too large");
            mpz_pow_ui(k.get_mpz_t(), base.get_mpz_t(), inner);
        }
        if (k > kMaxExponent) fail(start, "exponent too large");
        return static_cast<unsigned>(k.get_ui());
    }

    Value primary() {
        skip_ws();
        if (at_end()) fail(pos_, "unexpected end of input");
        const char c = peek();
        if (c == '(') {
            const std::size_t open = pos_;
            get();
            Value v = expr();
            skip_ws();
            if (at_end() || peek() != ')') fail(open, "unbalanced parentheses: '(' is never closed");
            get();
            return v;
        }
        if (std::isdigit(static_cast<unsigned char>(c))) return constant(literal());
        if (std::isalpha(static_cast<unsigned char>(c))) return identifier();
        if (c == ')') fail(pos_, "unbalanced parentheses: unexpected ')'");
        fail(pos_, std::string("unexpected character '") + c + "'");
    }

    Rational literal() {
        const std::size_t start = pos_;
        Integer num = digits();
        Integer den = 1;
        if (!at_end() && peek() == '/') {
            get();
            if (at_end() || !std::isdigit(static_cast<unsigned char>(peek())))
                fail(start, "malformed literal: expected digits after '/'");
            den = digits();
            if (den == 0) fail(start, "malformed literal: zero denominator");
        }
        if (!at_end() && (std::isalpha(static_cast<unsigned char>(peek())) || peek() == '.'))
            fail(start, "malformed literal");
        Rational r(num, den);
        r.canonicalize();
        return r;
    }

    Value identifier() {
        const std::size_t start = pos_;
        std::string name;
        while (!at_end() && std::isalpha(static_cast<unsigned char>(peek()))) name += get();
        std::string index;
        while (!at_end() && std::isdigit(static_cast<unsigned char>(peek()))) index += get();
        while (!at_end() && (std::isalnum(static_cast<unsigned char>(peek())) || peek() == '_')) name += get();

        if (name == "h" && index.empty() && max_hbar_ >= 0) {
            Value v(width(), Poly(pairs_));
            if (v.size() > 1) v[1] = Poly::constant(pairs_, Rational(1));
            return v;
        }
        if ((name != "q" && name != "p") || index.empty()) fail(start, "unknown identifier '" + name + index + "'");
        if (index.size() > 6 || index[0] == '0' || std::stoul(index) > pairs_)
            fail(start, "index out of range 1.." + std::to_string(pairs_) + " in '" + name + index + "'");
        const std::size_t i = std::stoul(index) - 1;
        Value v(width(), Poly(pairs_));
        v[0] = Poly::variable(pairs_, name == "q" ? Var::q(i) : Var::p(i));
        return v;
    }

    Integer digits() {
        std::string s;
        while (!at_end() && std::isdigit(static_cast<unsigned char>(peek()))) s += get();
        return Integer(s);
    }

    void skip_ws() {
        while (!at_end() && std::isspace(static_cast<unsigned char>(peek()))) ++pos_;
    }
    bool at_end() const { return pos_ >= text_.size(); }
    char peek() const { return text_[pos_]; }
    char get() { return text_[pos_++]; }

    [[noreturn]] static void fail(std::size_t at, std::string message) { throw ParseError{at, std::move(message)}; }

    std::string_view text_;
    std::size_t pos_ = 0;
    std::size_t pairs_;
    int max_hbar_;
};

}  // namespace detail

/// Parses a polynomial in q1..qn, p1..pn into canonical form.
inline ParseResult parse_poly(std::string_view text, std::size_t pairs) {
    if (pairs == 0) return {std::nullopt, {{0, "number of pairs must be positive"}}};
    try {
        auto v = detail::ExpressionParser(text, pairs, -1).parse();
        return {std::move(v.front()), {}};
    } catch (const detail::ParseError& e) {
        return {std::nullopt, {{e.position, e.message}}};
    }
}

/// Like parse_poly but also accepts "h" for hbar; powers beyond `order` are dropped.
inline SeriesParseResult parse_hseries(std::string_view text, std::size_t pairs, std::size_t order) {
    if (pairs == 0) return {std::nullopt, {{0, "number of pairs must be positive"}}};
    try {
        auto v = detail::ExpressionParser(text, pairs, static_cast<int>(order)).parse();
        return {HSeries(std::move(v)), {}};
    } catch (const detail::ParseError& e) {
        return {std::nullopt, {{e.position, e.message}}};
    }
}

/// Throwing convenience wrapper, mostly for tests and fixtures.
inline Poly poly(std::string_view text, std::size_t pairs) {
    auto r = parse_poly(text, pairs);
    if (!r.ok()) {
        const auto& d = r.diagnostics.front();
        throw std::invalid_argument("parse error at " + std::to_string(d.position) + ": " + d.message);
    }
    return *r.value;
}

inline HSeries hseries(std::string_view text, std::size_t pairs, std::size_t order) {
    auto r = parse_hseries(text, pairs, order);
    if (!r.ok()) {
        const auto& d = r.diagnostics.front();
        throw std::invalid_argument("parse error at " + std::to_string(d.position) + ": " + d.message);
    }
    return *r.value;
}

}  // namespace qlift
