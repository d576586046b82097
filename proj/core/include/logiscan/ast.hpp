#pragma once

#include "logiscan/source.hpp"

#include <cstddef>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace logiscan {

enum class ExprKind { Identifier, MemberAccess, Index, Call, Binary, Unary, Literal, Tuple, Conditional };

/// Expression node. Roles of the fields depend on `kind`:
///  - Identifier: `name`
///  - MemberAccess: `callee` is the base, `name` the member
///  - Index: `callee` is the base, `args` the index (two for a slice)
///  - Call: `callee` is the called expression, `args` the arguments
///  - Binary / Unary: `op`, operands in `args`
///  - Conditional: `args` = {condition, when-true, when-false}
struct Expression {
    ExprKind kind = ExprKind::Literal;
    std::string op;
    std::string name;
    std::shared_ptr<const Expression> callee;
    std::vector<Expression> args;
    Span span;
    std::string raw;

    /// Identifier name, or the member name for member access. Empty otherwise.
    std::string_view terminal_name() const noexcept;
};

enum class StmtKind {
    If,
    Require,
    Assert,
    Revert,
    Expression,
    Assignment,
    LocalDecl,
    Return,
    For,
    While,
    Block,
    Emit,
    Opaque
};

std::string_view to_string(StmtKind kind) noexcept;
std::string_view to_string(ExprKind kind) noexcept;

struct VarDecl {
    std::string type;
    std::string name;
    std::string visibility;
    Span span;
};

/// Statement node. `condition` is set for if/while/for/require/assert.
/// `exprs` holds the remaining expressions in source order (expression
/// statement body, assignment, declaration initializer, return value, emitted
/// call, revert arguments, for-loop post expression). `children` are nested
/// statements in source order; for `if` the then-branch comes first.
struct Statement {
    StmtKind kind = StmtKind::Opaque;
    std::optional<Expression> condition;
    std::vector<Expression> exprs;
    std::vector<Statement> children;
    std::vector<VarDecl> declared;
    Span span;
    std::size_t seq = 0;
    std::string raw;

    /// The statement's own text: the header for compound statements, the
    /// whole text for simple ones.
    std::string_view own_text() const noexcept;
    /// Byte offset where the statement's own text ends.
    std::size_t own_end = 0;
};

enum class Visibility { Public, External, Internal, Private };
std::string_view to_string(Visibility v) noexcept;

enum class FunctionKind { Function, Constructor, Fallback, Receive };

enum class ContractKind { Contract, Interface, Library, Abstract };
std::string_view to_string(ContractKind k) noexcept;

struct Param {
    std::string type;
    std::string name;
};

struct FunctionRecord {
    std::string name;
    FunctionKind kind = FunctionKind::Function;
    std::vector<Param> params;
    std::vector<std::string> returns;
    Visibility visibility = Visibility::Public;
    std::string mutability;
    std::vector<std::string> modifiers;
    bool has_body = false;
    std::vector<Statement> body;
    Span span;
    Span body_span;
    std::string contract;
    ContractKind contract_kind = ContractKind::Contract;
    std::vector<std::string> contract_bases;
    std::string file;
    std::string text;
    std::string body_text;
    /// body_text with comments blanked out.
    std::string body_plain;

    /// `name`, or constructor/fallback/receive for unnamed kinds.
    std::string display_name() const;
    /// `file:Contract.name(type,type)`; unique within a project.
    std::string id() const;
    /// `Contract.name`
    std::string qualified_name() const;
    std::size_t arity() const noexcept { return params.size(); }
};

struct ModifierDef {
    std::string name;
    std::vector<Param> params;
    std::vector<Statement> body;
    Span span;
};

struct ContractDef {
    std::string name;
    ContractKind kind = ContractKind::Contract;
    std::vector<std::string> bases;
    std::vector<FunctionRecord> functions;
    std::vector<ModifierDef> modifiers;
    std::vector<VarDecl> state_vars;
    Span span;
};

struct SourceUnit {
    std::shared_ptr<const SourceFile> file;
    std::vector<std::string> pragmas;
    std::vector<std::string> imports;
    std::vector<ContractDef> contracts;
    /// File-level functions (no owning contract).
    std::vector<FunctionRecord> free_functions;
};

/// Visits `stmts` and all nested statements in pre-order.
template <typename F>
void for_each_statement(const std::vector<Statement>& stmts, F&& fn)
{
    for (const auto& s : stmts) {
        fn(s);
        for_each_statement(s.children, fn);
    }
}

/// Visits `e` and all sub-expressions in pre-order.
template <typename F>
void for_each_expression(const Expression& e, F&& fn)
{
    fn(e);
    if (e.callee) {
        for_each_expression(*e.callee, fn);
    }
    for (const auto& a : e.args) {
        for_each_expression(a, fn);
    }
}

/// Visits every expression directly owned by `s` (not its children). For
/// require/assert the condition is the first call argument and is reached
/// through `exprs`.
template <typename F>
void for_each_own_expression(const Statement& s, F&& fn)
{
    if (s.condition && s.kind != StmtKind::Require && s.kind != StmtKind::Assert) {
        for_each_expression(*s.condition, fn);
    }
    for (const auto& e : s.exprs) {
        for_each_expression(e, fn);
    }
}

} // namespace logiscan
