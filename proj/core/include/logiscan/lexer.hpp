#pragma once

#include "logiscan/source.hpp"

#include <cstddef>
#include <string_view>
#include <vector>

namespace logiscan {

enum class TokenKind { Identifier, Number, String, Punct, End };

struct Token {
    TokenKind kind = TokenKind::End;
    std::string_view text;
    std::size_t begin = 0;
    std::size_t end = 0;

    bool is(std::string_view s) const noexcept { return text == s && kind != TokenKind::String; }
    bool is_identifier() const noexcept { return kind == TokenKind::Identifier; }
};

/// Tokenizes Solidity source. Comments are skipped. Throws SyntaxError for
/// unterminated strings or block comments and for bytes outside the
/// language's character set. The result always ends with an End token.
std::vector<Token> tokenize(const SourceFile& file);

} // namespace logiscan
