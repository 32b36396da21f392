#pragma once

#include <cctype>
#include <cstdint>
#include <limits>
#include <string>
#include <string_view>
#include <vector>

#include "induct/errors.hpp"

namespace induct::dsl {

enum class TokenKind {
    integer,
    identifier,
    lparen,
    rparen,
    lbrace,
    rbrace,
    comma,
    dot,
    plus,
    minus,
    star,
    caret,
    percent,
    less,
    less_equal,
    greater,
    greater_equal,
    equal,
    not_equal,
    end,
};

struct Token {
    TokenKind kind = TokenKind::end;
    std::string text;
    std::int64_t value = 0;
    std::size_t pos = 0;
};

/// Integer literals larger than this are rejected at lex time; evaluation
/// saturates at the same bound.
inline constexpr std::int64_t kIntLimit = 1'000'000'000;

inline std::vector<Token> tokenize(std::string_view src) {
    std::vector<Token> out;
    std::size_t i = 0;
    auto push = [&](TokenKind k, std::size_t len) {
        out.push_back(Token{k, std::string(src.substr(i, len)), 0, i});
        i += len;
    };
    while (i < src.size()) {
        const char c = src[i];
        if (std::isspace(static_cast<unsigned char>(c))) {
            ++i;
            continue;
        }
        if (std::isdigit(static_cast<unsigned char>(c))) {
            const std::size_t start = i;
            std::int64_t v = 0;
            while (i < src.size() && std::isdigit(static_cast<unsigned char>(src[i]))) {
                v = v * 10 + (src[i] - '0');
                if (v > kIntLimit) throw SyntaxError("integer literal too large", start);
                ++i;
            }
            out.push_back(Token{TokenKind::integer, std::string(src.substr(start, i - start)), v, start});
            continue;
        }
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            const std::size_t start = i;
            while (i < src.size() &&
                   (std::isalnum(static_cast<unsigned char>(src[i])) || src[i] == '_'))
                ++i;
            out.push_back(Token{TokenKind::identifier, std::string(src.substr(start, i - start)), 0, start});
            continue;
        }
        const char n = i + 1 < src.size() ? src[i + 1] : '\0';
        switch (c) {
            case '(': push(TokenKind::lparen, 1); break;
            case ')': push(TokenKind::rparen, 1); break;
            case '{': push(TokenKind::lbrace, 1); break;
            case '}': push(TokenKind::rbrace, 1); break;
            case ',': push(TokenKind::comma, 1); break;
            case '.': push(TokenKind::dot, 1); break;
            case '+': push(TokenKind::plus, 1); break;
            case '-': push(TokenKind::minus, 1); break;
            case '*': push(TokenKind::star, 1); break;
            case '^': push(TokenKind::caret, 1); break;
            case '%': push(TokenKind::percent, 1); break;
            case '<':
                if (n == '=') push(TokenKind::less_equal, 2);
                else push(TokenKind::less, 1);
                break;
            case '>':
                if (n == '=') push(TokenKind::greater_equal, 2);
                else push(TokenKind::greater, 1);
                break;
            case '=':
                if (n == '=') push(TokenKind::equal, 2);
                else push(TokenKind::equal, 1);
                break;
            case '!':
                if (n == '=') {
                    push(TokenKind::not_equal, 2);
                    break;
                }
                throw SyntaxError("unexpected character '!'", i);
            default:
                throw SyntaxError(std::string("unexpected character '") + c + "'", i);
        }
    }
    out.push_back(Token{TokenKind::end, "", 0, src.size()});
    return out;
}

/// Cursor over a token vector with the small helpers both parsers share.
class TokenStream {
public:
    explicit TokenStream(std::string_view src) : tokens_(tokenize(src)) {}

    const Token& peek(std::size_t ahead = 0) const {
        const std::size_t j = idx_ + ahead;
        return j < tokens_.size() ? tokens_[j] : tokens_.back();
    }
    const Token& next() {
        const Token& t = tokens_[idx_];
        if (idx_ + 1 < tokens_.size()) ++idx_;
        return t;
    }
    bool at(TokenKind k) const { return peek().kind == k; }
    bool at_word(std::string_view w) const {
        return peek().kind == TokenKind::identifier && peek().text == w;
    }
    bool accept(TokenKind k) {
        if (!at(k)) return false;
        next();
        return true;
    }
    bool accept_word(std::string_view w) {
        if (!at_word(w)) return false;
        next();
        return true;
    }
    const Token& expect(TokenKind k, std::string_view what) {
        if (!at(k)) fail(std::string("expected ") + std::string(what));
        return next();
    }
    void expect_word(std::string_view w) {
        if (!accept_word(w)) fail("expected '" + std::string(w) + "'");
    }
    [[noreturn]] void fail(const std::string& msg) const {
        const Token& t = peek();
        const std::string got = t.kind == TokenKind::end ? "end of input" : "'" + t.text + "'";
        throw SyntaxError(msg + ", got " + got, t.pos);
    }

private:
    std::vector<Token> tokens_;
    std::size_t idx_ = 0;
};

inline std::int64_t saturate(std::int64_t v) {
    if (v > kIntLimit) return kIntLimit;
    if (v < -kIntLimit) return -kIntLimit;
    return v;
}

}  // namespace induct::dsl
