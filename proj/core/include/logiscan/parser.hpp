#pragma once

#include "logiscan/ast.hpp"

#include <memory>
#include <string_view>
#include <vector>

namespace logiscan {

/// Parses one Solidity file. Supported constructs become typed AST nodes;
/// assembly, try/catch and anything else outside the subset become opaque
/// statements carrying their raw text. Throws SyntaxError for unbalanced
/// brackets, unterminated strings/comments and malformed contract headers.
SourceUnit parse_source(std::shared_ptr<const SourceFile> file);

/// All functions across all contracts in declaration order, followed by
/// file-level functions.
std::vector<FunctionRecord> enumerate_functions(const SourceUnit& unit);

/// Parses a standalone expression (used to interpret recognized names).
/// Returns nullopt if `text` is not a single well-formed expression.
std::optional<Expression> parse_expression_text(std::string_view text);

} // namespace logiscan
