#pragma once

// Number-concept language. A concept is a boolean expression over one free
// integer variable `x`. Grammar (see docs/number_dsl.ebnf):
//
//   expr  := or
//   or    := and ("or" and)*
//   and   := not ("and" not)*
//   not   := "not" not | cmp
//   cmp   := arith [cmpop arith]           cmpop: < <= = == != >= >
//   arith := term (("+" | "-") term)*
//   term  := unary (("*" | "mod" | "%") unary)*
//   unary := "-" unary | power
//   power := atom ["^" unary]
//   atom  := INT | "x" | "true" | "false" | "(" expr ")" | pred "(" args ")"
//
// Evaluation is total: arithmetic saturates at +-10^9, `a mod 0` is 0,
// negative exponents give 0, prime(n) is false for n <= 1 and power(b, n)
// holds iff n = b^k for some integer k >= 0 (so power(2, 1) is true).

#include <algorithm>
#include <bitset>
#include <cmath>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "induct/dsl/lexer.hpp"

namespace induct::dsl {

enum class NumOp : std::uint8_t {
    // integer-valued
    literal,
    var_x,
    add,
    sub,
    mul,
    mod,
    pow,
    neg,
    // boolean-valued
    bool_true,
    bool_false,
    lt,
    le,
    eq,
    ne,
    ge,
    gt,
    even,
    odd,
    prime,
    square,
    cube,
    power,
    multiple,
    between,
    ends_in,
    contains_digit,
    in_set,
    logical_and,
    logical_or,
    logical_not,
};

struct NumberExpr {
    NumOp op = NumOp::bool_false;
    std::int64_t value = 0;          // literal
    std::vector<std::int64_t> set;   // in_set members, as written
    std::vector<NumberExpr> args;

    bool operator==(const NumberExpr&) const = default;
};

namespace number_detail {

struct PredicateInfo {
    std::string_view name;
    NumOp op;
    int arity;  // integer arguments; in_set takes a set literal then one integer
};

inline constexpr PredicateInfo kPredicates[] = {
    {"even", NumOp::even, 1},
    {"odd", NumOp::odd, 1},
    {"prime", NumOp::prime, 1},
    {"square", NumOp::square, 1},
    {"cube", NumOp::cube, 1},
    {"power", NumOp::power, 2},
    {"multiple", NumOp::multiple, 2},
    {"between", NumOp::between, 3},
    {"ends_in", NumOp::ends_in, 2},
    {"contains_digit", NumOp::contains_digit, 2},
    {"in_set", NumOp::in_set, 1},
};

inline const PredicateInfo* find_predicate(std::string_view name) {
    for (const auto& p : kPredicates)
        if (p.name == name) return &p;
    return nullptr;
}

inline const PredicateInfo* find_predicate(NumOp op) {
    for (const auto& p : kPredicates)
        if (p.op == op) return &p;
    return nullptr;
}

inline bool is_reserved(std::string_view w) {
    return w == "x" || w == "true" || w == "false" || w == "and" || w == "or" || w == "not" ||
           w == "mod" || find_predicate(w) != nullptr;
}

}  // namespace number_detail

inline bool is_boolean(NumOp op) { return op >= NumOp::bool_true; }

namespace number_detail {

class Parser {
public:
    explicit Parser(std::string_view src) : ts_(src) {}

    NumberExpr parse_concept() {
        const std::size_t start = ts_.peek().pos;
        NumberExpr e = parse_or();
        if (!ts_.at(TokenKind::end)) ts_.fail("expected end of expression");
        if (!is_boolean(e.op)) throw SyntaxError("concept must be a boolean expression", start);
        return e;
    }

private:
    using E = NumberExpr;

    static E node(NumOp op, std::vector<E> args) {
        E e;
        e.op = op;
        e.args = std::move(args);
        return e;
    }

    static void need_bool(const E& e, std::size_t pos, std::string_view ctx) {
        if (!is_boolean(e.op)) throw SyntaxError("operand of '" + std::string(ctx) + "' must be boolean", pos);
    }
    static void need_int(const E& e, std::size_t pos, std::string_view ctx) {
        if (is_boolean(e.op)) throw SyntaxError("operand of '" + std::string(ctx) + "' must be an integer", pos);
    }

    E parse_or() {
        std::size_t pos = ts_.peek().pos;
        E lhs = parse_and();
        while (ts_.at_word("or")) {
            need_bool(lhs, pos, "or");
            ts_.next();
            pos = ts_.peek().pos;
            E rhs = parse_and();
            need_bool(rhs, pos, "or");
            lhs = node(NumOp::logical_or, {std::move(lhs), std::move(rhs)});
        }
        return lhs;
    }

    E parse_and() {
        std::size_t pos = ts_.peek().pos;
        E lhs = parse_not();
        while (ts_.at_word("and")) {
            need_bool(lhs, pos, "and");
            ts_.next();
            pos = ts_.peek().pos;
            E rhs = parse_not();
            need_bool(rhs, pos, "and");
            lhs = node(NumOp::logical_and, {std::move(lhs), std::move(rhs)});
        }
        return lhs;
    }

    E parse_not() {
        if (ts_.accept_word("not")) {
            const std::size_t pos = ts_.peek().pos;
            E inner = parse_not();
            need_bool(inner, pos, "not");
            return node(NumOp::logical_not, {std::move(inner)});
        }
        return parse_cmp();
    }

    E parse_cmp() {
        const std::size_t pos = ts_.peek().pos;
        E lhs = parse_arith();
        NumOp op;
        switch (ts_.peek().kind) {
            case TokenKind::less: op = NumOp::lt; break;
            case TokenKind::less_equal: op = NumOp::le; break;
            case TokenKind::equal: op = NumOp::eq; break;
            case TokenKind::not_equal: op = NumOp::ne; break;
            case TokenKind::greater_equal: op = NumOp::ge; break;
            case TokenKind::greater: op = NumOp::gt; break;
            default: return lhs;
        }
        const std::string sym = ts_.next().text;
        need_int(lhs, pos, sym);
        const std::size_t rpos = ts_.peek().pos;
        E rhs = parse_arith();
        need_int(rhs, rpos, sym);
        switch (ts_.peek().kind) {
            case TokenKind::less:
            case TokenKind::less_equal:
            case TokenKind::equal:
            case TokenKind::not_equal:
            case TokenKind::greater_equal:
            case TokenKind::greater:
                ts_.fail("comparisons do not chain; add parentheses");
            default: break;
        }
        return node(op, {std::move(lhs), std::move(rhs)});
    }

    E parse_arith() {
        std::size_t pos = ts_.peek().pos;
        E lhs = parse_term();
        while (ts_.at(TokenKind::plus) || ts_.at(TokenKind::minus)) {
            const bool plus = ts_.next().kind == TokenKind::plus;
            need_int(lhs, pos, plus ? "+" : "-");
            pos = ts_.peek().pos;
            E rhs = parse_term();
            need_int(rhs, pos, plus ? "+" : "-");
            lhs = node(plus ? NumOp::add : NumOp::sub, {std::move(lhs), std::move(rhs)});
        }
        return lhs;
    }

    E parse_term() {
        std::size_t pos = ts_.peek().pos;
        E lhs = parse_unary();
        while (ts_.at(TokenKind::star) || ts_.at(TokenKind::percent) || ts_.at_word("mod")) {
            const bool mul = ts_.next().kind == TokenKind::star;
            need_int(lhs, pos, mul ? "*" : "mod");
            pos = ts_.peek().pos;
            E rhs = parse_unary();
            need_int(rhs, pos, mul ? "*" : "mod");
            lhs = node(mul ? NumOp::mul : NumOp::mod, {std::move(lhs), std::move(rhs)});
        }
        return lhs;
    }

    E parse_unary() {
        if (ts_.accept(TokenKind::minus)) {
            const std::size_t pos = ts_.peek().pos;
            E inner = parse_unary();
            need_int(inner, pos, "-");
            return node(NumOp::neg, {std::move(inner)});
        }
        return parse_power();
    }

    E parse_power() {
        const std::size_t pos = ts_.peek().pos;
        E base = parse_atom();
        if (ts_.accept(TokenKind::caret)) {
            need_int(base, pos, "^");
            const std::size_t epos = ts_.peek().pos;
            E exp = parse_unary();
            need_int(exp, epos, "^");
            return node(NumOp::pow, {std::move(base), std::move(exp)});
        }
        return base;
    }

    E parse_int_arg(std::string_view ctx) {
        const std::size_t pos = ts_.peek().pos;
        E e = parse_or();
        need_int(e, pos, ctx);
        return e;
    }

    E parse_atom() {
        const Token& t = ts_.peek();
        if (t.kind == TokenKind::integer) {
            E e;
            e.op = NumOp::literal;
            e.value = ts_.next().value;
            return e;
        }
        if (ts_.accept(TokenKind::lparen)) {
            E inner = parse_or();
            ts_.expect(TokenKind::rparen, "')'");
            return inner;
        }
        if (t.kind != TokenKind::identifier) ts_.fail("expected an expression");
        const std::string word = t.text;
        const std::size_t pos = t.pos;
        ts_.next();
        if (word == "x") return node(NumOp::var_x, {});
        if (word == "true") return node(NumOp::bool_true, {});
        if (word == "false") return node(NumOp::bool_false, {});
        const PredicateInfo* p = find_predicate(word);
        if (!p) throw SyntaxError("unknown identifier '" + word + "'", pos);
        ts_.expect(TokenKind::lparen, "'(' after " + word);
        E e;
        e.op = p->op;
        if (p->op == NumOp::in_set) {
            e.set = parse_set_literal();
            ts_.expect(TokenKind::comma, "','");
        }
        for (int i = 0; i < p->arity; ++i) {
            if (i > 0) ts_.expect(TokenKind::comma, "','");
            e.args.push_back(parse_int_arg(word));
        }
        ts_.expect(TokenKind::rparen, "')' closing " + word);
        return e;
    }

    std::vector<std::int64_t> parse_set_literal() {
        ts_.expect(TokenKind::lbrace, "'{' opening a set literal");
        std::vector<std::int64_t> out;
        if (ts_.accept(TokenKind::rbrace)) return out;
        do {
            const bool negative = ts_.accept(TokenKind::minus);
            const Token& t = ts_.expect(TokenKind::integer, "integer in set literal");
            out.push_back(negative ? -t.value : t.value);
        } while (ts_.accept(TokenKind::comma));
        ts_.expect(TokenKind::rbrace, "'}' closing a set literal");
        return out;
    }

    TokenStream ts_;
};

inline bool is_prime(std::int64_t n) {
    if (n < 2) return false;
    if (n < 4) return true;
    if (n % 2 == 0) return false;
    for (std::int64_t d = 3; d * d <= n; d += 2)
        if (n % d == 0) return false;
    return true;
}

inline bool is_square(std::int64_t n) {
    if (n < 0) return false;
    auto r = static_cast<std::int64_t>(std::sqrt(static_cast<double>(n)));
    while (r * r > n) --r;
    while ((r + 1) * (r + 1) <= n) ++r;
    return r * r == n;
}

inline bool is_cube(std::int64_t n) {
    const auto r = static_cast<std::int64_t>(std::llround(std::cbrt(static_cast<double>(n))));
    for (std::int64_t c = r - 1; c <= r + 1; ++c)
        if (c * c * c == n) return true;
    return false;
}

inline bool is_power_of(std::int64_t base, std::int64_t n) {
    if (n == 1) return true;  // base^0
    if (base == 0) return n == 0;
    if (base == 1) return false;
    if (base == -1) return n == -1;
    std::int64_t p = base;
    while (p >= -kIntLimit && p <= kIntLimit) {
        if (p == n) return true;
        p *= base;
    }
    return false;
}

inline std::string abs_digits(std::int64_t n) { return std::to_string(n < 0 ? -n : n); }

inline std::int64_t int_pow(std::int64_t base, std::int64_t exp) {
    if (exp < 0) return 0;
    if (base == 0) return exp == 0 ? 1 : 0;
    if (base == 1) return 1;
    if (base == -1) return exp % 2 == 0 ? 1 : -1;
    std::int64_t r = 1;
    for (std::int64_t i = 0; i < exp; ++i) {
        r *= base;
        if (r >= kIntLimit || r <= -kIntLimit) {
            const bool negative = base < 0 && exp % 2 == 1;
            return negative ? -kIntLimit : kIntLimit;
        }
    }
    return r;
}

}  // namespace number_detail

inline NumberExpr parse_number_concept(std::string_view src) {
    return number_detail::Parser(src).parse_concept();
}

inline std::int64_t eval_number_int(const NumberExpr& e, std::int64_t x);

/// Boolean value of `e` at `x`. Total for every integer x.
inline bool eval_number(const NumberExpr& e, std::int64_t x) {
    using namespace number_detail;
    const auto arg = [&](std::size_t i) { return eval_number_int(e.args[i], x); };
    switch (e.op) {
        case NumOp::bool_true: return true;
        case NumOp::bool_false: return false;
        case NumOp::lt: return arg(0) < arg(1);
        case NumOp::le: return arg(0) <= arg(1);
        case NumOp::eq: return arg(0) == arg(1);
        case NumOp::ne: return arg(0) != arg(1);
        case NumOp::ge: return arg(0) >= arg(1);
        case NumOp::gt: return arg(0) > arg(1);
        case NumOp::even: return arg(0) % 2 == 0;
        case NumOp::odd: return arg(0) % 2 != 0;
        case NumOp::prime: return is_prime(arg(0));
        case NumOp::square: return is_square(arg(0));
        case NumOp::cube: return is_cube(arg(0));
        case NumOp::power: return is_power_of(arg(0), arg(1));
        case NumOp::multiple: {
            const std::int64_t k = arg(0), n = arg(1);
            return k == 0 ? n == 0 : n % k == 0;
        }
        case NumOp::between: {
            const std::int64_t n = arg(2);
            return arg(0) <= n && n <= arg(1);
        }
        case NumOp::ends_in: {
            const std::int64_t d = arg(0);
            if (d < 0) return false;
            const std::string s = abs_digits(arg(1)), suffix = std::to_string(d);
            return s.size() >= suffix.size() && s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
        }
        case NumOp::contains_digit: {
            const std::int64_t d = arg(0);
            if (d < 0 || d > 9) return false;
            return abs_digits(arg(1)).find(static_cast<char>('0' + d)) != std::string::npos;
        }
        case NumOp::in_set: {
            const std::int64_t n = arg(0);
            return std::find(e.set.begin(), e.set.end(), n) != e.set.end();
        }
        case NumOp::logical_and: return eval_number(e.args[0], x) && eval_number(e.args[1], x);
        case NumOp::logical_or: return eval_number(e.args[0], x) || eval_number(e.args[1], x);
        case NumOp::logical_not: return !eval_number(e.args[0], x);
        default: return eval_number_int(e, x) != 0;
    }
}

inline std::int64_t eval_number_int(const NumberExpr& e, std::int64_t x) {
    const auto arg = [&](std::size_t i) { return eval_number_int(e.args[i], x); };
    switch (e.op) {
        case NumOp::literal: return e.value;
        case NumOp::var_x: return saturate(x);
        case NumOp::add: return saturate(arg(0) + arg(1));
        case NumOp::sub: return saturate(arg(0) - arg(1));
        case NumOp::mul: return saturate(arg(0) * arg(1));
        case NumOp::mod: {
            const std::int64_t a = arg(0), b = arg(1);
            if (b == 0) return 0;
            std::int64_t r = a % b;
            if (r < 0) r += b < 0 ? -b : b;
            return r;
        }
        case NumOp::pow: return number_detail::int_pow(arg(0), arg(1));
        case NumOp::neg: return saturate(-arg(0));
        default: return eval_number(e, x) ? 1 : 0;
    }
}

/// Members of a number concept within 1..100.
class NumberExtension {
public:
    static constexpr int kMin = 1;
    static constexpr int kMax = 100;
    static constexpr int kDomainSize = kMax - kMin + 1;

    NumberExtension() = default;

    static NumberExtension of(const NumberExpr& e) {
        NumberExtension ext;
        for (int x = kMin; x <= kMax; ++x)
            if (eval_number(e, x)) ext.insert(x);
        return ext;
    }

    void insert(int x) {
        if (x < kMin || x > kMax || bits_.test(static_cast<std::size_t>(x))) return;
        bits_.set(static_cast<std::size_t>(x));
        ++size_;
    }
    bool contains(std::int64_t x) const {
        return x >= kMin && x <= kMax && bits_.test(static_cast<std::size_t>(x));
    }
    int size() const { return size_; }
    bool empty() const { return size_ == 0; }

    std::vector<int> members() const {
        std::vector<int> out;
        out.reserve(static_cast<std::size_t>(size_));
        for (int x = kMin; x <= kMax; ++x)
            if (contains(x)) out.push_back(x);
        return out;
    }

    bool operator==(const NumberExtension& o) const { return bits_ == o.bits_; }

private:
    std::bitset<kMax + 1> bits_;
    int size_ = 0;
};

inline NumberExtension number_extension(const NumberExpr& e) { return NumberExtension::of(e); }

namespace number_detail {

inline int precedence(const NumberExpr& e) {
    switch (e.op) {
        case NumOp::logical_or: return 1;
        case NumOp::logical_and: return 2;
        case NumOp::logical_not: return 3;
        case NumOp::lt:
        case NumOp::le:
        case NumOp::eq:
        case NumOp::ne:
        case NumOp::ge:
        case NumOp::gt: return 4;
        case NumOp::add:
        case NumOp::sub: return 5;
        case NumOp::mul:
        case NumOp::mod: return 6;
        case NumOp::neg: return 7;
        case NumOp::pow: return 8;
        default: return 9;
    }
}

inline std::string_view infix_symbol(NumOp op) {
    switch (op) {
        case NumOp::logical_or: return " or ";
        case NumOp::logical_and: return " and ";
        case NumOp::lt: return " < ";
        case NumOp::le: return " <= ";
        case NumOp::eq: return " == ";
        case NumOp::ne: return " != ";
        case NumOp::ge: return " >= ";
        case NumOp::gt: return " > ";
        case NumOp::add: return " + ";
        case NumOp::sub: return " - ";
        case NumOp::mul: return " * ";
        case NumOp::mod: return " mod ";
        default: return " ? ";
    }
}

inline void format_into(const NumberExpr& e, std::string& out);

inline void format_child(const NumberExpr& child, bool parens, std::string& out) {
    if (parens) out += '(';
    format_into(child, out);
    if (parens) out += ')';
}

inline void format_into(const NumberExpr& e, std::string& out) {
    const int p = precedence(e);
    switch (e.op) {
        case NumOp::literal: out += std::to_string(e.value); return;
        case NumOp::var_x: out += 'x'; return;
        case NumOp::bool_true: out += "true"; return;
        case NumOp::bool_false: out += "false"; return;
        case NumOp::logical_not:
            out += "not ";
            format_child(e.args[0], precedence(e.args[0]) < p, out);
            return;
        case NumOp::neg:
            out += '-';
            format_child(e.args[0], precedence(e.args[0]) < p, out);
            return;
        case NumOp::pow:
            format_child(e.args[0], precedence(e.args[0]) < 9, out);
            out += '^';
            format_child(e.args[1], precedence(e.args[1]) < 7, out);
            return;
        case NumOp::lt:
        case NumOp::le:
        case NumOp::eq:
        case NumOp::ne:
        case NumOp::ge:
        case NumOp::gt:
            format_child(e.args[0], precedence(e.args[0]) <= p, out);
            out += infix_symbol(e.op);
            format_child(e.args[1], precedence(e.args[1]) <= p, out);
            return;
        case NumOp::logical_or:
        case NumOp::logical_and:
        case NumOp::add:
        case NumOp::sub:
        case NumOp::mul:
        case NumOp::mod:
            format_child(e.args[0], precedence(e.args[0]) < p, out);
            out += infix_symbol(e.op);
            format_child(e.args[1], precedence(e.args[1]) <= p, out);
            return;
        default: break;
    }
    const PredicateInfo* info = find_predicate(e.op);
    out += info ? info->name : "?";
    out += '(';
    bool first = true;
    if (e.op == NumOp::in_set) {
        out += '{';
        for (std::size_t i = 0; i < e.set.size(); ++i) {
            if (i) out += ", ";
            out += std::to_string(e.set[i]);
        }
        out += '}';
        first = false;
    }
    for (const auto& a : e.args) {
        if (!first) out += ", ";
        first = false;
        format_into(a, out);
    }
    out += ')';
}

}  // namespace number_detail

/// Canonical source text with minimal parentheses; re-parses to an equal AST.
inline std::string format_number(const NumberExpr& e) {
    std::string out;
    number_detail::format_into(e, out);
    return out;
}

}  // namespace induct::dsl
