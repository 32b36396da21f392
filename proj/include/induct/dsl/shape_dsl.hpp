#pragma once

// Shape-concept language. A concept is a boolean expression evaluated for a
// test object `this` inside a batch. Grammar (see docs/shape_dsl.ebnf):
//
//   expr   := or
//   or     := and ("or" and)*
//   and    := not ("and" not)*
//   not    := "not" not | cmp
//   cmp    := sum [cmpop sum]                 cmpop: == = != < <= > >=
//   sum    := atom (("+" | "-") atom)*
//   atom   := INT | "true" | "false" | "(" expr ")"
//           | triangle | rectangle | circle | green | yellow | blue
//           | ("this" | objvar) "." ("shape" | "color" | "size")
//           | valvar
//           | ("forall" | "exists" | "count") "(" IDENT "in" domain "," expr ")"
//   domain := "others" | "all" | "colors" | "shapes" | "sizes"
//
// `others` is the batch with one occurrence of the test object removed and
// `all` is the whole batch. Variables bound over colors/shapes/sizes are
// values usable directly (`o.color == c`); variables bound over objects are
// only usable through an attribute accessor. `count` yields an integer.

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "induct/dsl/lexer.hpp"
#include "induct/shapes.hpp"

namespace induct::dsl {

enum class ShapeOp : std::uint8_t {
    // value-valued
    int_literal,
    shape_const,
    color_const,
    attr,       // var.attr, var == "this" for the test object
    value_var,  // variable bound over colors / shapes / sizes
    count,
    add,
    sub,
    // boolean-valued
    bool_true,
    bool_false,
    eq,
    ne,
    lt,
    le,
    gt,
    ge,
    logical_and,
    logical_or,
    logical_not,
    forall,
    exists,
};

enum class Attribute : std::uint8_t { shape, color, size };
enum class BindDomain : std::uint8_t { others, all, colors, shapes, sizes };

struct ShapeExpr {
    ShapeOp op = ShapeOp::bool_false;
    std::int64_t value = 0;  // int literal, or the enum ordinal of a shape/color constant
    Attribute attr = Attribute::shape;
    BindDomain domain = BindDomain::others;
    std::string var;  // accessor subject, value variable, or bound variable name
    std::vector<ShapeExpr> args;

    bool operator==(const ShapeExpr&) const = default;
};

inline bool is_boolean(ShapeOp op) { return op >= ShapeOp::bool_true; }

inline std::string_view to_string(Attribute a) {
    switch (a) {
        case Attribute::shape: return "shape";
        case Attribute::color: return "color";
        case Attribute::size: return "size";
    }
    return "?";
}

inline std::string_view to_string(BindDomain d) {
    switch (d) {
        case BindDomain::others: return "others";
        case BindDomain::all: return "all";
        case BindDomain::colors: return "colors";
        case BindDomain::shapes: return "shapes";
        case BindDomain::sizes: return "sizes";
    }
    return "?";
}

namespace shape_detail {

enum class Type : std::uint8_t { boolean, integer, shape, color, object };

inline std::string_view type_name(Type t) {
    switch (t) {
        case Type::boolean: return "boolean";
        case Type::integer: return "integer";
        case Type::shape: return "shape";
        case Type::color: return "color";
        case Type::object: return "object";
    }
    return "?";
}

inline Type domain_type(BindDomain d) {
    switch (d) {
        case BindDomain::others:
        case BindDomain::all: return Type::object;
        case BindDomain::colors: return Type::color;
        case BindDomain::shapes: return Type::shape;
        case BindDomain::sizes: return Type::integer;
    }
    return Type::object;
}

inline bool is_keyword(std::string_view w) {
    static constexpr std::string_view kWords[] = {
        "this",   "and",    "or",     "not",    "true",      "false",  "forall", "exists",
        "count",  "in",     "others", "all",    "colors",    "shapes", "sizes",  "triangle",
        "rectangle", "circle", "green", "yellow", "blue", "shape", "color", "size"};
    for (auto k : kWords)
        if (k == w) return true;
    return false;
}

struct Typed {
    ShapeExpr expr;
    Type type;
};

class Parser {
public:
    explicit Parser(std::string_view src) : ts_(src) {}

    ShapeExpr parse_concept() {
        const std::size_t start = ts_.peek().pos;
        Typed t = parse_or();
        if (!ts_.at(TokenKind::end)) ts_.fail("expected end of expression");
        if (t.type != Type::boolean) throw SyntaxError("concept must be a boolean expression", start);
        return std::move(t.expr);
    }

private:
    struct Binding {
        std::string name;
        Type type;
    };

    static ShapeExpr node(ShapeOp op, std::vector<ShapeExpr> args) {
        ShapeExpr e;
        e.op = op;
        e.args = std::move(args);
        return e;
    }

    static void need(const Typed& t, Type want, std::size_t pos, std::string_view ctx) {
        if (t.type != want)
            throw SyntaxError("operand of '" + std::string(ctx) + "' must be " + std::string(type_name(want)) +
                                  ", found " + std::string(type_name(t.type)),
                              pos);
    }

    Typed parse_or() {
        std::size_t pos = ts_.peek().pos;
        Typed lhs = parse_and();
        while (ts_.at_word("or")) {
            need(lhs, Type::boolean, pos, "or");
            ts_.next();
            pos = ts_.peek().pos;
            Typed rhs = parse_and();
            need(rhs, Type::boolean, pos, "or");
            lhs = {node(ShapeOp::logical_or, {std::move(lhs.expr), std::move(rhs.expr)}), Type::boolean};
        }
        return lhs;
    }

    Typed parse_and() {
        std::size_t pos = ts_.peek().pos;
        Typed lhs = parse_not();
        while (ts_.at_word("and")) {
            need(lhs, Type::boolean, pos, "and");
            ts_.next();
            pos = ts_.peek().pos;
            Typed rhs = parse_not();
            need(rhs, Type::boolean, pos, "and");
            lhs = {node(ShapeOp::logical_and, {std::move(lhs.expr), std::move(rhs.expr)}), Type::boolean};
        }
        return lhs;
    }

    Typed parse_not() {
        if (ts_.accept_word("not")) {
            const std::size_t pos = ts_.peek().pos;
            Typed inner = parse_not();
            need(inner, Type::boolean, pos, "not");
            return {node(ShapeOp::logical_not, {std::move(inner.expr)}), Type::boolean};
        }
        return parse_cmp();
    }

    static bool is_cmp(TokenKind k) {
        return k == TokenKind::equal || k == TokenKind::not_equal || k == TokenKind::less ||
               k == TokenKind::less_equal || k == TokenKind::greater || k == TokenKind::greater_equal;
    }

    Typed parse_cmp() {
        const std::size_t pos = ts_.peek().pos;
        Typed lhs = parse_sum();
        if (!is_cmp(ts_.peek().kind)) return lhs;
        const Token& tok = ts_.next();
        const TokenKind kind = tok.kind;
        const std::string sym = tok.text;
        const std::size_t rpos = ts_.peek().pos;
        Typed rhs = parse_sum();
        if (is_cmp(ts_.peek().kind)) ts_.fail("comparisons do not chain; add parentheses");
        ShapeOp op;
        switch (kind) {
            case TokenKind::equal: op = ShapeOp::eq; break;
            case TokenKind::not_equal: op = ShapeOp::ne; break;
            case TokenKind::less: op = ShapeOp::lt; break;
            case TokenKind::less_equal: op = ShapeOp::le; break;
            case TokenKind::greater: op = ShapeOp::gt; break;
            default: op = ShapeOp::ge; break;
        }
        if (op == ShapeOp::eq || op == ShapeOp::ne) {
            if (lhs.type == Type::boolean || lhs.type == Type::object)
                throw SyntaxError("cannot compare values of type " + std::string(type_name(lhs.type)) + " with '" +
                                      sym + "'",
                                  pos);
            need(rhs, lhs.type, rpos, sym);
        } else {
            need(lhs, Type::integer, pos, sym);
            need(rhs, Type::integer, rpos, sym);
        }
        return {node(op, {std::move(lhs.expr), std::move(rhs.expr)}), Type::boolean};
    }

    Typed parse_sum() {
        std::size_t pos = ts_.peek().pos;
        Typed lhs = parse_atom();
        while (ts_.at(TokenKind::plus) || ts_.at(TokenKind::minus)) {
            const bool plus = ts_.next().kind == TokenKind::plus;
            need(lhs, Type::integer, pos, plus ? "+" : "-");
            pos = ts_.peek().pos;
            Typed rhs = parse_atom();
            need(rhs, Type::integer, pos, plus ? "+" : "-");
            lhs = {node(plus ? ShapeOp::add : ShapeOp::sub, {std::move(lhs.expr), std::move(rhs.expr)}),
                   Type::integer};
        }
        return lhs;
    }

    const Binding* lookup(std::string_view name) const {
        for (auto it = scope_.rbegin(); it != scope_.rend(); ++it)
            if (it->name == name) return &*it;
        return nullptr;
    }

    Typed parse_binder(ShapeOp op, std::string_view word) {
        ts_.expect(TokenKind::lparen, "'(' after " + std::string(word));
        const Token& name_tok = ts_.expect(TokenKind::identifier, "a variable name");
        const std::string name = name_tok.text;
        if (is_keyword(name)) throw SyntaxError("'" + name + "' is reserved and cannot be bound", name_tok.pos);
        if (lookup(name)) throw SyntaxError("variable '" + name + "' is already bound", name_tok.pos);
        ts_.expect_word("in");
        const Token& dom_tok = ts_.expect(TokenKind::identifier, "a domain (others, all, colors, shapes, sizes)");
        BindDomain dom;
        if (dom_tok.text == "others") dom = BindDomain::others;
        else if (dom_tok.text == "all") dom = BindDomain::all;
        else if (dom_tok.text == "colors") dom = BindDomain::colors;
        else if (dom_tok.text == "shapes") dom = BindDomain::shapes;
        else if (dom_tok.text == "sizes") dom = BindDomain::sizes;
        else throw SyntaxError("unknown domain '" + dom_tok.text + "'", dom_tok.pos);
        ts_.expect(TokenKind::comma, "','");
        scope_.push_back(Binding{name, domain_type(dom)});
        const std::size_t body_pos = ts_.peek().pos;
        Typed body = parse_or();
        scope_.pop_back();
        need(body, Type::boolean, body_pos, word);
        ts_.expect(TokenKind::rparen, "')' closing " + std::string(word));
        ShapeExpr e = node(op, {std::move(body.expr)});
        e.var = name;
        e.domain = dom;
        return {std::move(e), op == ShapeOp::count ? Type::integer : Type::boolean};
    }

    Typed parse_atom() {
        const Token& t = ts_.peek();
        if (t.kind == TokenKind::integer) {
            ShapeExpr e;
            e.op = ShapeOp::int_literal;
            e.value = ts_.next().value;
            return {std::move(e), Type::integer};
        }
        if (ts_.accept(TokenKind::lparen)) {
            Typed inner = parse_or();
            ts_.expect(TokenKind::rparen, "')'");
            return inner;
        }
        if (t.kind != TokenKind::identifier) ts_.fail("expected an expression");
        const std::string word = t.text;
        const std::size_t pos = t.pos;
        ts_.next();
        if (word == "true") return {node(ShapeOp::bool_true, {}), Type::boolean};
        if (word == "false") return {node(ShapeOp::bool_false, {}), Type::boolean};
        if (word == "forall") return parse_binder(ShapeOp::forall, word);
        if (word == "exists") return parse_binder(ShapeOp::exists, word);
        if (word == "count") return parse_binder(ShapeOp::count, word);
        if (auto s = shape_from_string(word)) {
            ShapeExpr e;
            e.op = ShapeOp::shape_const;
            e.value = static_cast<std::int64_t>(*s);
            return {std::move(e), Type::shape};
        }
        if (auto c = color_from_string(word)) {
            ShapeExpr e;
            e.op = ShapeOp::color_const;
            e.value = static_cast<std::int64_t>(*c);
            return {std::move(e), Type::color};
        }
        Type subject;
        if (word == "this") {
            subject = Type::object;
        } else if (const Binding* b = lookup(word)) {
            subject = b->type;
        } else {
            throw SyntaxError("unknown identifier '" + word + "'", pos);
        }
        if (subject != Type::object) {
            ShapeExpr e;
            e.op = ShapeOp::value_var;
            e.var = word;
            return {std::move(e), subject};
        }
        ts_.expect(TokenKind::dot, "'.' after object '" + word + "'");
        const Token& a = ts_.expect(TokenKind::identifier, "an attribute (shape, color, size)");
        ShapeExpr e;
        e.op = ShapeOp::attr;
        e.var = word;
        Type type;
        if (a.text == "shape") {
            e.attr = Attribute::shape;
            type = Type::shape;
        } else if (a.text == "color") {
            e.attr = Attribute::color;
            type = Type::color;
        } else if (a.text == "size") {
            e.attr = Attribute::size;
            type = Type::integer;
        } else {
            throw SyntaxError("unknown attribute '" + a.text + "'", a.pos);
        }
        return {std::move(e), type};
    }

    TokenStream ts_;
    std::vector<Binding> scope_;
};

struct Frame {
    const std::string* name;
    bool is_object;
    ShapeObject object;
    std::int64_t value;
};

class Evaluator {
public:
    Evaluator(const ShapeObject& test, std::span<const ShapeObject> batch) : test_(test), batch_(batch) {
        skip_ = batch_.size();
        for (std::size_t i = 0; i < batch_.size(); ++i)
            if (batch_[i] == test_) {
                skip_ = i;
                break;
            }
    }

    bool eval_bool(const ShapeExpr& e) {
        switch (e.op) {
            case ShapeOp::bool_true: return true;
            case ShapeOp::bool_false: return false;
            case ShapeOp::eq: return value(e.args[0]) == value(e.args[1]);
            case ShapeOp::ne: return value(e.args[0]) != value(e.args[1]);
            case ShapeOp::lt: return value(e.args[0]) < value(e.args[1]);
            case ShapeOp::le: return value(e.args[0]) <= value(e.args[1]);
            case ShapeOp::gt: return value(e.args[0]) > value(e.args[1]);
            case ShapeOp::ge: return value(e.args[0]) >= value(e.args[1]);
            case ShapeOp::logical_and: return eval_bool(e.args[0]) && eval_bool(e.args[1]);
            case ShapeOp::logical_or: return eval_bool(e.args[0]) || eval_bool(e.args[1]);
            case ShapeOp::logical_not: return !eval_bool(e.args[0]);
            case ShapeOp::forall:
            case ShapeOp::exists: return quantify(e);
            default: return value(e) != 0;
        }
    }

private:
    std::int64_t value(const ShapeExpr& e) {
        switch (e.op) {
            case ShapeOp::int_literal:
            case ShapeOp::shape_const:
            case ShapeOp::color_const: return e.value;
            case ShapeOp::attr: {
                const ShapeObject& o = e.var == "this" ? test_ : find(e.var).object;
                switch (e.attr) {
                    case Attribute::shape: return static_cast<std::int64_t>(o.shape);
                    case Attribute::color: return static_cast<std::int64_t>(o.color);
                    case Attribute::size: return o.size;
                }
                return 0;
            }
            case ShapeOp::value_var: return find(e.var).value;
            case ShapeOp::count: return count(e);
            case ShapeOp::add: return saturate(value(e.args[0]) + value(e.args[1]));
            case ShapeOp::sub: return saturate(value(e.args[0]) - value(e.args[1]));
            default: return eval_bool(e) ? 1 : 0;
        }
    }

    const Frame& find(const std::string& name) const {
        for (auto it = frames_.rbegin(); it != frames_.rend(); ++it)
            if (*it->name == name) return *it;
        // Unreachable for parsed programs: the parser rejects unbound names.
        static const Frame kEmpty{nullptr, false, {}, 0};
        return kEmpty;
    }

    template <typename F>
    void for_each_binding(const ShapeExpr& e, F&& f) {
        Frame frame{&e.var, false, {}, 0};
        auto run = [&](Frame fr) {
            frames_.push_back(fr);
            const bool stop = f();
            frames_.pop_back();
            return stop;
        };
        switch (e.domain) {
            case BindDomain::others:
            case BindDomain::all:
                frame.is_object = true;
                for (std::size_t i = 0; i < batch_.size(); ++i) {
                    if (e.domain == BindDomain::others && i == skip_) continue;
                    frame.object = batch_[i];
                    if (run(frame)) return;
                }
                return;
            case BindDomain::colors:
                for (Color c : kAllColors) {
                    frame.value = static_cast<std::int64_t>(c);
                    if (run(frame)) return;
                }
                return;
            case BindDomain::shapes:
                for (Shape s : kAllShapes) {
                    frame.value = static_cast<std::int64_t>(s);
                    if (run(frame)) return;
                }
                return;
            case BindDomain::sizes:
                for (int z : kAllSizes) {
                    frame.value = z;
                    if (run(frame)) return;
                }
                return;
        }
    }

    // Short-circuits: forall stops at the first false body, exists at the first true.
    bool quantify(const ShapeExpr& e) {
        const bool is_forall = e.op == ShapeOp::forall;
        bool result = is_forall;
        for_each_binding(e, [&] {
            if (eval_bool(e.args[0]) != is_forall) {
                result = !is_forall;
                return true;
            }
            return false;
        });
        return result;
    }

    std::int64_t count(const ShapeExpr& e) {
        std::int64_t n = 0;
        for_each_binding(e, [&] {
            if (eval_bool(e.args[0])) ++n;
            return false;
        });
        return n;
    }

    const ShapeObject& test_;
    std::span<const ShapeObject> batch_;
    std::size_t skip_ = 0;
    std::vector<Frame> frames_;
};

}  // namespace shape_detail

inline ShapeExpr parse_shape_concept(std::string_view src) {
    return shape_detail::Parser(src).parse_concept();
}

/// Binds this = test, others = batch minus one occurrence of test, all = batch.
/// If `test` does not occur in `batch`, `others` is the whole batch.
inline bool eval_shape(const ShapeExpr& e, const ShapeObject& test, std::span<const ShapeObject> batch) {
    return shape_detail::Evaluator(test, batch).eval_bool(e);
}

namespace shape_detail {

inline int precedence(const ShapeExpr& e) {
    switch (e.op) {
        case ShapeOp::logical_or: return 1;
        case ShapeOp::logical_and: return 2;
        case ShapeOp::logical_not: return 3;
        case ShapeOp::eq:
        case ShapeOp::ne:
        case ShapeOp::lt:
        case ShapeOp::le:
        case ShapeOp::gt:
        case ShapeOp::ge: return 4;
        case ShapeOp::add:
        case ShapeOp::sub: return 5;
        default: return 9;
    }
}

inline std::string_view infix_symbol(ShapeOp op) {
    switch (op) {
        case ShapeOp::logical_or: return " or ";
        case ShapeOp::logical_and: return " and ";
        case ShapeOp::eq: return " == ";
        case ShapeOp::ne: return " != ";
        case ShapeOp::lt: return " < ";
        case ShapeOp::le: return " <= ";
        case ShapeOp::gt: return " > ";
        case ShapeOp::ge: return " >= ";
        case ShapeOp::add: return " + ";
        case ShapeOp::sub: return " - ";
        default: return " ? ";
    }
}

inline void format_into(const ShapeExpr& e, std::string& out) {
    const int p = precedence(e);
    auto child = [&](const ShapeExpr& c, bool parens) {
        if (parens) out += '(';
        format_into(c, out);
        if (parens) out += ')';
    };
    switch (e.op) {
        case ShapeOp::int_literal: out += std::to_string(e.value); return;
        case ShapeOp::shape_const: out += to_string(static_cast<Shape>(e.value)); return;
        case ShapeOp::color_const: out += to_string(static_cast<Color>(e.value)); return;
        case ShapeOp::attr:
            out += e.var;
            out += '.';
            out += to_string(e.attr);
            return;
        case ShapeOp::value_var: out += e.var; return;
        case ShapeOp::bool_true: out += "true"; return;
        case ShapeOp::bool_false: out += "false"; return;
        case ShapeOp::count:
        case ShapeOp::forall:
        case ShapeOp::exists:
            out += e.op == ShapeOp::count ? "count(" : e.op == ShapeOp::forall ? "forall(" : "exists(";
            out += e.var;
            out += " in ";
            out += to_string(e.domain);
            out += ", ";
            format_into(e.args[0], out);
            out += ')';
            return;
        case ShapeOp::logical_not:
            out += "not ";
            child(e.args[0], precedence(e.args[0]) < p);
            return;
        case ShapeOp::eq:
        case ShapeOp::ne:
        case ShapeOp::lt:
        case ShapeOp::le:
        case ShapeOp::gt:
        case ShapeOp::ge:
            child(e.args[0], precedence(e.args[0]) <= p);
            out += infix_symbol(e.op);
            child(e.args[1], precedence(e.args[1]) <= p);
            return;
        default:
            child(e.args[0], precedence(e.args[0]) < p);
            out += infix_symbol(e.op);
            child(e.args[1], precedence(e.args[1]) <= p);
            return;
    }
}

}  // namespace shape_detail

inline std::string format_shape(const ShapeExpr& e) {
    std::string out;
    shape_detail::format_into(e, out);
    return out;
}

}  // namespace induct::dsl
