#include "logiscan/lexer.hpp"

#include "logiscan/errors.hpp"

#include <array>
#include <cctype>

namespace logiscan {

namespace {

constexpr std::array<std::string_view, 4> kPunct4{">>>="};
constexpr std::array<std::string_view, 4> kPunct3{">>>", "<<=", ">>=", "..."};
constexpr std::array<std::string_view, 22> kPunct2{"==", "!=", "<=", ">=", "&&", "||", "++", "--",
                                                   "+=", "-=", "*=", "/=", "%=", "|=", "&=", "^=",
                                                   "=>", "->", ":=", "**", "<<", ">>"};
constexpr std::string_view kPunct1 = "{}()[];,.?:=+-*/%!~&|^<>@#";

bool ident_start(char c)
{
    return std::isalpha(static_cast<unsigned char>(c)) != 0 || c == '_' || c == '$';
}

bool ident_char(char c)
{
    return std::isalnum(static_cast<unsigned char>(c)) != 0 || c == '_' || c == '$';
}

[[noreturn]] void fail(const SourceFile& file, std::size_t offset, const std::string& message)
{
    const auto pos = file.locate(offset);
    throw SyntaxError(file.path(), pos.line, pos.column, message);
}

} // namespace

std::vector<Token> tokenize(const SourceFile& file)
{
    const std::string_view src = file.text();
    const std::size_t n = src.size();
    std::vector<Token> out;
    out.reserve(n / 4 + 1);

    std::size_t i = 0;
    auto emit = [&](TokenKind kind, std::size_t begin, std::size_t end) {
        out.push_back(Token{kind, src.substr(begin, end - begin), begin, end});
    };

    while (i < n) {
        const char c = src[i];
        if (c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v') {
            ++i;
            continue;
        }
        if (c == '/' && i + 1 < n && src[i + 1] == '/') {
            while (i < n && src[i] != '\n') {
                ++i;
            }
            continue;
        }
        if (c == '/' && i + 1 < n && src[i + 1] == '*') {
            const auto close = src.find("*/", i + 2);
            if (close == std::string_view::npos) {
                fail(file, i, "unterminated block comment");
            }
            i = close + 2;
            continue;
        }
        const std::size_t begin = i;
        if (c == '"' || c == '\'') {
            ++i;
            while (i < n && src[i] != c) {
                if (src[i] == '\n') {
                    fail(file, begin, "unterminated string literal");
                }
                i += (src[i] == '\\') ? 2 : 1;
            }
            if (i >= n) {
                fail(file, begin, "unterminated string literal");
            }
            ++i;
            emit(TokenKind::String, begin, i);
            continue;
        }
        if (ident_start(c)) {
            while (i < n && ident_char(src[i])) {
                ++i;
            }
            // hex"..." and unicode"..." literals
            const auto word = src.substr(begin, i - begin);
            if ((word == "hex" || word == "unicode") && i < n && (src[i] == '"' || src[i] == '\'')) {
                const char q = src[i++];
                while (i < n && src[i] != q) {
                    if (src[i] == '\n') {
                        fail(file, begin, "unterminated string literal");
                    }
                    i += (src[i] == '\\') ? 2 : 1;
                }
                if (i >= n) {
                    fail(file, begin, "unterminated string literal");
                }
                ++i;
                emit(TokenKind::String, begin, i);
                continue;
            }
            emit(TokenKind::Identifier, begin, i);
            continue;
        }
        if (std::isdigit(static_cast<unsigned char>(c)) != 0 ||
            (c == '.' && i + 1 < n && std::isdigit(static_cast<unsigned char>(src[i + 1])) != 0)) {
            if (c == '0' && i + 1 < n && (src[i + 1] == 'x' || src[i + 1] == 'X')) {
                i += 2;
                while (i < n && (std::isxdigit(static_cast<unsigned char>(src[i])) != 0 || src[i] == '_')) {
                    ++i;
                }
            } else {
                bool seen_dot = false;
                while (i < n) {
                    const char d = src[i];
                    if (std::isdigit(static_cast<unsigned char>(d)) != 0 || d == '_') {
                        ++i;
                    } else if (d == '.' && !seen_dot && i + 1 < n &&
                               std::isdigit(static_cast<unsigned char>(src[i + 1])) != 0) {
                        seen_dot = true;
                        ++i;
                    } else if ((d == 'e' || d == 'E') && i + 1 < n &&
                               (std::isdigit(static_cast<unsigned char>(src[i + 1])) != 0 || src[i + 1] == '-')) {
                        i += 2;
                    } else {
                        break;
                    }
                }
            }
            emit(TokenKind::Number, begin, i);
            continue;
        }
        auto try_punct = [&](auto const& table, std::size_t len) {
            if (i + len > n) {
                return false;
            }
            const auto candidate = src.substr(i, len);
            for (const auto p : table) {
                if (p == candidate) {
                    emit(TokenKind::Punct, i, i + len);
                    i += len;
                    return true;
                }
            }
            return false;
        };
        if (try_punct(kPunct4, 4) || try_punct(kPunct3, 3) || try_punct(kPunct2, 2)) {
            continue;
        }
        if (kPunct1.find(c) != std::string_view::npos) {
            emit(TokenKind::Punct, i, i + 1);
            ++i;
            continue;
        }
        fail(file, i, "unexpected character");
    }
    out.push_back(Token{TokenKind::End, src.substr(n, 0), n, n});
    return out;
}

} // namespace logiscan
