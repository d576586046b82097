#include "logiscan/parser.hpp"

#include "logiscan/errors.hpp"
#include "logiscan/lexer.hpp"

#include <array>
#include <algorithm>
#include <string>
#include <unordered_set>

namespace logiscan {

namespace {

/// Internal backtracking signal; never escapes the parser.
struct ParseFailure {};

const std::unordered_set<std::string_view> kNonTypeWords{
    "if",     "else",   "for",    "while",    "do",      "return", "emit",  "break",
    "continue", "throw", "assembly", "try",   "catch",   "unchecked", "new", "delete",
    "true",   "false",  "revert", "returns", "_",
};

const std::unordered_set<std::string_view> kLocations{"memory", "storage", "calldata"};

const std::unordered_set<std::string_view> kAssignOps{
    "=", "+=", "-=", "*=", "/=", "%=", "|=", "&=", "^=", "<<=", ">>=", ">>>="};

const std::unordered_set<std::string_view> kEtherUnits{
    "wei", "gwei", "szabo", "finney", "ether", "seconds", "minutes", "hours", "days", "weeks", "years"};

int binary_precedence(const Token& t)
{
    if (t.kind != TokenKind::Punct) {
        return -1;
    }
    const auto s = t.text;
    if (s == "||") return 1;
    if (s == "&&") return 2;
    if (s == "==" || s == "!=") return 3;
    if (s == "<" || s == ">" || s == "<=" || s == ">=") return 4;
    if (s == "|") return 5;
    if (s == "^") return 6;
    if (s == "&") return 7;
    if (s == "<<" || s == ">>" || s == ">>>") return 8;
    if (s == "+" || s == "-") return 9;
    if (s == "*" || s == "/" || s == "%") return 10;
    if (s == "**") return 11;
    return -1;
}

bool is_open(const Token& t)
{
    return t.kind == TokenKind::Punct && (t.text == "(" || t.text == "[" || t.text == "{");
}

bool is_close(const Token& t)
{
    return t.kind == TokenKind::Punct && (t.text == ")" || t.text == "]" || t.text == "}");
}

char closer_for(std::string_view open)
{
    return open == "(" ? ')' : open == "[" ? ']' : '}';
}

/// Concatenates token texts, inserting a space only between adjacent words.
std::string join_tokens(const std::vector<Token>& tokens, std::size_t begin, std::size_t end)
{
    std::string out;
    bool prev_word = false;
    for (std::size_t i = begin; i < end; ++i) {
        const bool word = tokens[i].kind == TokenKind::Identifier || tokens[i].kind == TokenKind::Number;
        if (word && prev_word) {
            out.push_back(' ');
        }
        out.append(tokens[i].text);
        prev_word = word;
    }
    return out;
}

class Parser {
public:
    Parser(std::shared_ptr<const SourceFile> file, std::vector<Token> tokens)
        : file_(std::move(file)), toks_(std::move(tokens)), match_(toks_.size(), 0)
    {
        match_brackets();
    }

    SourceUnit parse_unit();
    Expression parse_expression();
    bool at_end() const { return peek().kind == TokenKind::End; }

private:
    // token access
    const Token& peek(std::size_t k = 0) const
    {
        const std::size_t i = std::min(pos_ + k, toks_.size() - 1);
        return toks_[i];
    }
    const Token& advance()
    {
        const Token& t = toks_[pos_];
        if (t.kind != TokenKind::End) {
            prev_end_ = t.end;
            ++pos_;
        }
        return t;
    }
    bool accept(std::string_view s)
    {
        if (peek().is(s)) {
            advance();
            return true;
        }
        return false;
    }
    const Token& expect(std::string_view s)
    {
        if (!peek().is(s)) {
            throw ParseFailure{};
        }
        return advance();
    }
    const Token& expect_identifier()
    {
        if (!peek().is_identifier()) {
            throw ParseFailure{};
        }
        return advance();
    }
    /// Moves past the bracket group opening at the current token.
    void skip_group()
    {
        const std::size_t close = match_[pos_];
        pos_ = close;
        advance();
    }

    [[noreturn]] void syntax_error(const Token& at, const std::string& message) const
    {
        const auto lc = file_->locate(at.begin);
        throw SyntaxError(file_->path(), lc.line, lc.column, message);
    }

    void match_brackets();

    // top level
    void parse_pragma(SourceUnit& unit);
    void parse_import(SourceUnit& unit);
    ContractDef parse_contract();
    void parse_member(ContractDef& contract);
    void skip_item(std::size_t limit);

    FunctionRecord parse_function(FunctionKind kind, ContractKind ckind);
    ModifierDef parse_modifier();
    VarDecl parse_state_var();
    std::vector<Param> parse_param_list();
    std::vector<Statement> parse_block_contents(std::size_t close);

    // statements
    Statement parse_statement(std::size_t limit);
    Statement parse_statement_inner();
    Statement parse_simple_statement();
    Statement make_opaque(std::size_t begin_tok, std::size_t limit);
    Statement finish(Statement s, std::size_t begin) const;

    // lookahead
    std::optional<std::size_t> skip_type(std::size_t p) const;
    bool is_declaration(std::size_t p) const;
    bool is_tuple_declaration(std::size_t p) const;

    // expressions
    Expression parse_assignment();
    Expression parse_conditional();
    Expression parse_binary(int min_prec);
    Expression parse_unary();
    Expression parse_postfix();
    Expression parse_primary();
    Expression make(ExprKind kind, std::size_t begin) const;

    std::shared_ptr<const SourceFile> file_;
    std::vector<Token> toks_;
    std::vector<std::size_t> match_;
    std::size_t pos_ = 0;
    std::size_t prev_end_ = 0;
};

void Parser::match_brackets()
{
    std::vector<std::size_t> stack;
    for (std::size_t i = 0; i < toks_.size(); ++i) {
        const Token& t = toks_[i];
        if (is_open(t)) {
            stack.push_back(i);
        } else if (is_close(t)) {
            if (stack.empty() || closer_for(toks_[stack.back()].text) != t.text[0]) {
                syntax_error(t, "unbalanced '" + std::string(t.text) + "'");
            }
            match_[stack.back()] = i;
            match_[i] = stack.back();
            stack.pop_back();
        }
    }
    if (!stack.empty()) {
        const Token& t = toks_[stack.back()];
        syntax_error(t, "unclosed '" + std::string(t.text) + "'");
    }
}

SourceUnit Parser::parse_unit()
{
    SourceUnit unit;
    unit.file = file_;
    std::unordered_set<std::string> names;
    while (!at_end()) {
        const Token& t = peek();
        if (t.is("pragma")) {
            parse_pragma(unit);
        } else if (t.is("import")) {
            parse_import(unit);
        } else if (t.is("contract") || t.is("interface") || t.is("library") ||
                   (t.is("abstract") && peek(1).is("contract"))) {
            const Token& at = peek(t.is("abstract") ? 1 : 0);
            auto c = parse_contract();
            if (!names.insert(c.name).second) {
                syntax_error(at, "duplicate contract '" + c.name + "'");
            }
            unit.contracts.push_back(std::move(c));
        } else if (t.is("function") && peek(1).is_identifier()) {
            const std::size_t start = pos_;
            try {
                unit.free_functions.push_back(parse_function(FunctionKind::Function, ContractKind::Contract));
            } catch (const ParseFailure&) {
                pos_ = start;
                skip_item(toks_.size() - 1);
            }
        } else {
            skip_item(toks_.size() - 1);
        }
    }
    return unit;
}

void Parser::parse_pragma(SourceUnit& unit)
{
    const Token& kw = advance();
    const std::size_t begin = peek().begin;
    while (!at_end() && !peek().is(";")) {
        advance();
    }
    if (at_end()) {
        syntax_error(kw, "pragma without ';'");
    }
    std::string text(file_->slice(begin, prev_end_));
    unit.pragmas.push_back(std::move(text));
    advance();
}

void Parser::parse_import(SourceUnit& unit)
{
    const Token& kw = advance();
    std::string path;
    while (!at_end() && !peek().is(";")) {
        const Token& t = advance();
        if (t.kind == TokenKind::String && path.empty()) {
            path = std::string(t.text.substr(1, t.text.size() - 2));
        }
    }
    if (at_end()) {
        syntax_error(kw, "import without ';'");
    }
    advance();
    unit.imports.push_back(std::move(path));
}

void Parser::skip_item(std::size_t limit)
{
    const std::size_t start = pos_;
    while (pos_ < limit && !at_end()) {
        const Token& t = peek();
        if (t.is(";")) {
            advance();
            break;
        }
        if (t.is("{")) {
            skip_group();
            break;
        }
        if (is_open(t)) {
            skip_group();
            continue;
        }
        if (is_close(t)) {
            break;
        }
        advance();
    }
    if (pos_ == start && pos_ < limit && !at_end()) {
        advance();
    }
}

ContractDef Parser::parse_contract()
{
    ContractDef c;
    const Token& first = peek();
    const std::size_t begin = first.begin;
    if (accept("abstract")) {
        c.kind = ContractKind::Abstract;
        advance();
    } else {
        const Token& kw = advance();
        c.kind = kw.is("interface") ? ContractKind::Interface
               : kw.is("library")   ? ContractKind::Library
                                    : ContractKind::Contract;
    }
    if (!peek().is_identifier()) {
        syntax_error(peek(), "expected contract name");
    }
    c.name = std::string(advance().text);
    if (accept("is")) {
        for (;;) {
            if (!peek().is_identifier()) {
                syntax_error(peek(), "expected base contract name");
            }
            std::string base(advance().text);
            while (peek().is(".") && peek(1).is_identifier()) {
                advance();
                base += ".";
                base += advance().text;
            }
            c.bases.push_back(std::move(base));
            if (peek().is("(")) {
                skip_group();
            }
            if (!accept(",")) {
                break;
            }
        }
    }
    if (!peek().is("{")) {
        syntax_error(peek(), "expected '{' after contract header");
    }
    const std::size_t close = match_[pos_];
    advance();
    while (pos_ < close) {
        const std::size_t start = pos_;
        try {
            parse_member(c);
        } catch (const ParseFailure&) {
            pos_ = start;
            skip_item(close);
        }
    }
    pos_ = close;
    advance();
    c.span = file_->span(begin, prev_end_);
    for (auto& fn : c.functions) {
        fn.contract = c.name;
        fn.contract_kind = c.kind;
        fn.contract_bases = c.bases;
    }
    return c;
}

void Parser::parse_member(ContractDef& contract)
{
    const Token& t = peek();
    if (t.is("function")) {
        contract.functions.push_back(parse_function(FunctionKind::Function, contract.kind));
    } else if (t.is("constructor") && peek(1).is("(")) {
        contract.functions.push_back(parse_function(FunctionKind::Constructor, contract.kind));
    } else if (t.is("fallback") && peek(1).is("(")) {
        contract.functions.push_back(parse_function(FunctionKind::Fallback, contract.kind));
    } else if (t.is("receive") && peek(1).is("(")) {
        contract.functions.push_back(parse_function(FunctionKind::Receive, contract.kind));
    } else if (t.is("modifier") && peek(1).is_identifier()) {
        contract.modifiers.push_back(parse_modifier());
    } else if (t.is("event") || t.is("using") || t.is("struct") || t.is("enum")) {
        skip_item(match_.size());
    } else if ((t.is("error") || t.is("type")) && peek(1).is_identifier() &&
               (peek(2).is("(") || peek(2).is("is"))) {
        skip_item(match_.size());
    } else {
        contract.state_vars.push_back(parse_state_var());
    }
}

std::vector<Param> Parser::parse_param_list()
{
    if (!peek().is("(")) {
        throw ParseFailure{};
    }
    const std::size_t close = match_[pos_];
    advance();
    std::vector<Param> params;
    std::size_t seg_begin = pos_;
    auto flush = [&](std::size_t seg_end) {
        if (seg_end == seg_begin) {
            return;
        }
        std::vector<Token> kept;
        for (std::size_t i = seg_begin; i < seg_end; ++i) {
            const Token& t = toks_[i];
            if (t.is_identifier() && (kLocations.contains(t.text) || t.text == "indexed")) {
                continue;
            }
            kept.push_back(t);
        }
        Param p;
        std::size_t type_end = kept.size();
        if (kept.size() >= 2 && kept.back().is_identifier()) {
            const bool address_payable = kept.back().text == "payable" && kept[kept.size() - 2].is("address");
            if (!address_payable) {
                p.name = std::string(kept.back().text);
                type_end = kept.size() - 1;
            }
        }
        p.type = join_tokens(kept, 0, type_end);
        params.push_back(std::move(p));
    };
    while (pos_ < close) {
        if (is_open(peek())) {
            skip_group();
            continue;
        }
        if (peek().is(",")) {
            flush(pos_);
            advance();
            seg_begin = pos_;
            continue;
        }
        advance();
    }
    flush(pos_);
    advance();
    return params;
}

FunctionRecord Parser::parse_function(FunctionKind kind, ContractKind ckind)
{
    FunctionRecord fn;
    const std::size_t begin = peek().begin;
    const bool keyword_function = peek().is("function");
    advance();
    if (kind == FunctionKind::Function) {
        if (peek().is_identifier()) {
            fn.name = std::string(advance().text);
        } else {
            kind = FunctionKind::Fallback;
        }
    }
    (void)keyword_function;
    fn.kind = kind;
    fn.params = parse_param_list();

    bool visibility_set = false;
    while (!at_end() && !peek().is("{") && !peek().is(";")) {
        const Token& t = peek();
        if (t.is("public") || t.is("external") || t.is("internal") || t.is("private")) {
            fn.visibility = t.is("public")     ? Visibility::Public
                          : t.is("external")   ? Visibility::External
                          : t.is("internal")   ? Visibility::Internal
                                               : Visibility::Private;
            visibility_set = true;
            advance();
        } else if (t.is("pure") || t.is("view") || t.is("payable") || t.is("constant")) {
            fn.mutability = std::string(t.text);
            advance();
        } else if (t.is("virtual")) {
            advance();
        } else if (t.is("override")) {
            advance();
            if (peek().is("(")) {
                skip_group();
            }
        } else if (t.is("returns")) {
            advance();
            for (auto& p : parse_param_list()) {
                fn.returns.push_back(std::move(p.type));
            }
        } else if (t.is_identifier()) {
            std::string name(advance().text);
            while (peek().is(".") && peek(1).is_identifier()) {
                advance();
                name += ".";
                name += advance().text;
            }
            if (peek().is("(")) {
                skip_group();
            }
            fn.modifiers.push_back(std::move(name));
        } else if (is_open(t)) {
            skip_group();
        } else if (is_close(t)) {
            throw ParseFailure{};
        } else {
            advance();
        }
    }
    if (at_end()) {
        throw ParseFailure{};
    }
    if (!visibility_set) {
        if (ckind == ContractKind::Interface || kind == FunctionKind::Fallback || kind == FunctionKind::Receive) {
            fn.visibility = Visibility::External;
        } else {
            fn.visibility = Visibility::Public;
        }
    }
    if (peek().is("{")) {
        const std::size_t open_begin = peek().begin;
        const std::size_t close = match_[pos_];
        advance();
        fn.body = parse_block_contents(close);
        fn.has_body = true;
        fn.body_span = file_->span(open_begin, prev_end_);
    } else {
        advance();
    }
    fn.span = file_->span(begin, prev_end_);
    fn.file = file_->path();
    fn.text = std::string(file_->slice(fn.span.begin, fn.span.end));
    if (fn.has_body) {
        fn.body_text = std::string(file_->slice(fn.body_span.begin, fn.body_span.end));
        fn.body_plain = strip_comments(fn.body_text);
    }
    std::size_t seq = 0;
    auto number = [&seq](auto& self, std::vector<Statement>& stmts) -> void {
        for (auto& s : stmts) {
            s.seq = seq++;
            self(self, s.children);
        }
    };
    number(number, fn.body);
    return fn;
}

ModifierDef Parser::parse_modifier()
{
    ModifierDef m;
    const std::size_t begin = peek().begin;
    advance();
    m.name = std::string(expect_identifier().text);
    if (peek().is("(")) {
        m.params = parse_param_list();
    }
    while (!at_end() && !peek().is("{") && !peek().is(";")) {
        if (is_open(peek())) {
            skip_group();
        } else if (is_close(peek())) {
            throw ParseFailure{};
        } else {
            advance();
        }
    }
    if (peek().is("{")) {
        const std::size_t close = match_[pos_];
        advance();
        m.body = parse_block_contents(close);
    } else {
        expect(";");
    }
    m.span = file_->span(begin, prev_end_);
    return m;
}

VarDecl Parser::parse_state_var()
{
    const std::size_t begin = peek().begin;
    const std::size_t type_begin = pos_;
    const auto after = skip_type(pos_);
    if (!after) {
        throw ParseFailure{};
    }
    VarDecl v;
    v.type = join_tokens(toks_, type_begin, *after);
    pos_ = *after;
    while (peek().is_identifier() &&
           (peek().is("public") || peek().is("private") || peek().is("internal") || peek().is("constant") ||
            peek().is("immutable") || peek().is("override") || peek().is("transient"))) {
        if (peek().is("public") || peek().is("private") || peek().is("internal")) {
            v.visibility = std::string(peek().text);
        }
        advance();
        if (toks_[pos_ - 1].is("override") && peek().is("(")) {
            skip_group();
        }
    }
    v.name = std::string(expect_identifier().text);
    if (accept("=")) {
        (void)parse_expression();
    }
    expect(";");
    v.span = file_->span(begin, prev_end_);
    return v;
}

std::vector<Statement> Parser::parse_block_contents(std::size_t close)
{
    std::vector<Statement> out;
    while (pos_ < close) {
        const std::size_t before = pos_;
        out.push_back(parse_statement(close));
        if (pos_ == before) {
            advance();
        }
    }
    pos_ = close;
    advance();
    return out;
}

std::optional<std::size_t> Parser::skip_type(std::size_t p) const
{
    const Token& t = toks_[p];
    if (!t.is_identifier() || kNonTypeWords.contains(t.text)) {
        return std::nullopt;
    }
    if (t.is("mapping")) {
        if (!toks_[p + 1].is("(")) {
            return std::nullopt;
        }
        p = match_[p + 1] + 1;
    } else if (t.is("function")) {
        if (!toks_[p + 1].is("(")) {
            return std::nullopt;
        }
        p = match_[p + 1] + 1;
        while (toks_[p].is("internal") || toks_[p].is("external") || toks_[p].is("pure") ||
               toks_[p].is("view") || toks_[p].is("payable")) {
            ++p;
        }
        if (toks_[p].is("returns") && toks_[p + 1].is("(")) {
            p = match_[p + 1] + 1;
        }
    } else {
        ++p;
        while (toks_[p].is(".") && toks_[p + 1].is_identifier()) {
            p += 2;
        }
        if (t.is("address") && toks_[p].is("payable")) {
            ++p;
        }
    }
    while (toks_[p].is("[")) {
        p = match_[p] + 1;
    }
    return p;
}

bool Parser::is_declaration(std::size_t p) const
{
    const auto after = skip_type(p);
    if (!after) {
        return false;
    }
    std::size_t q = *after;
    if (toks_[q].is_identifier() && kLocations.contains(toks_[q].text)) {
        ++q;
    }
    if (!toks_[q].is_identifier() || kNonTypeWords.contains(toks_[q].text)) {
        return false;
    }
    ++q;
    return toks_[q].is("=") || toks_[q].is(";");
}

bool Parser::is_tuple_declaration(std::size_t p) const
{
    if (!toks_[p].is("(")) {
        return false;
    }
    const std::size_t close = match_[p];
    bool typed = false;
    std::size_t q = p + 1;
    while (q < close) {
        if (toks_[q].is(",")) {
            ++q;
            continue;
        }
        const auto after = skip_type(q);
        if (!after) {
            return false;
        }
        q = *after;
        if (toks_[q].is_identifier() && kLocations.contains(toks_[q].text)) {
            ++q;
        }
        if (!toks_[q].is_identifier()) {
            return false;
        }
        ++q;
        typed = true;
        if (!(toks_[q].is(",") || q == close)) {
            return false;
        }
    }
    return typed && toks_[close + 1].is("=");
}

Statement Parser::finish(Statement s, std::size_t begin) const
{
    s.span = file_->span(begin, prev_end_);
    s.raw = std::string(file_->slice(begin, prev_end_));
    if (s.own_end == 0) {
        s.own_end = prev_end_;
    }
    return s;
}

Statement Parser::make_opaque(std::size_t begin_tok, std::size_t limit)
{
    pos_ = begin_tok;
    const std::size_t begin = peek().begin;
    while (pos_ < limit && !at_end()) {
        const Token& t = peek();
        if (t.is(";")) {
            advance();
            break;
        }
        if (t.is("{")) {
            skip_group();
            if (!peek().is("else") && !peek().is("catch")) {
                break;
            }
            continue;
        }
        if (is_open(t)) {
            skip_group();
            continue;
        }
        if (is_close(t)) {
            break;
        }
        advance();
    }
    if (pos_ == begin_tok && !is_close(peek())) {
        advance();
    }
    Statement s;
    s.kind = StmtKind::Opaque;
    return finish(std::move(s), begin);
}

Statement Parser::parse_statement(std::size_t limit)
{
    const std::size_t start = pos_;
    try {
        Statement s = parse_statement_inner();
        if (pos_ > limit) {
            throw ParseFailure{};
        }
        return s;
    } catch (const ParseFailure&) {
        return make_opaque(start, limit);
    }
}

Statement Parser::parse_statement_inner()
{
    const Token& t = peek();
    const std::size_t begin = t.begin;
    Statement s;

    if (t.is("{") || (t.is("unchecked") && peek(1).is("{"))) {
        if (t.is("unchecked")) {
            advance();
        }
        s.kind = StmtKind::Block;
        s.own_end = peek().end;
        const std::size_t close = match_[pos_];
        advance();
        s.children = parse_block_contents(close);
        return finish(std::move(s), begin);
    }
    if (t.is("if")) {
        advance();
        expect("(");
        s.condition = parse_expression();
        expect(")");
        s.kind = StmtKind::If;
        s.own_end = prev_end_;
        s.children.push_back(parse_statement(match_.size()));
        if (accept("else")) {
            s.children.push_back(parse_statement(match_.size()));
        }
        return finish(std::move(s), begin);
    }
    if (t.is("for")) {
        advance();
        const std::size_t header_close = peek().is("(") ? match_[pos_] : 0;
        expect("(");
        if (!accept(";")) {
            s.children.push_back(parse_simple_statement());
        }
        if (!peek().is(";")) {
            s.condition = parse_expression();
        }
        expect(";");
        if (pos_ != header_close) {
            s.exprs.push_back(parse_expression());
        }
        expect(")");
        s.kind = StmtKind::For;
        s.own_end = prev_end_;
        s.children.push_back(parse_statement(match_.size()));
        return finish(std::move(s), begin);
    }
    if (t.is("while")) {
        advance();
        expect("(");
        s.condition = parse_expression();
        expect(")");
        s.kind = StmtKind::While;
        s.own_end = prev_end_;
        s.children.push_back(parse_statement(match_.size()));
        return finish(std::move(s), begin);
    }
    if (t.is("do")) {
        advance();
        s.kind = StmtKind::While;
        s.own_end = prev_end_;
        s.children.push_back(parse_statement(match_.size()));
        expect("while");
        expect("(");
        s.condition = parse_expression();
        expect(")");
        expect(";");
        return finish(std::move(s), begin);
    }
    if (t.is("return")) {
        advance();
        s.kind = StmtKind::Return;
        if (!peek().is(";")) {
            s.exprs.push_back(parse_expression());
        }
        expect(";");
        return finish(std::move(s), begin);
    }
    if (t.is("emit")) {
        advance();
        s.kind = StmtKind::Emit;
        s.exprs.push_back(parse_expression());
        expect(";");
        return finish(std::move(s), begin);
    }
    if (t.is("revert") && peek(1).is_identifier()) {
        advance();
        s.kind = StmtKind::Revert;
        s.exprs.push_back(parse_expression());
        expect(";");
        return finish(std::move(s), begin);
    }
    if (t.is("break") || t.is("continue") || t.is("throw") || (t.is("_") && peek(1).is(";"))) {
        advance();
        expect(";");
        s.kind = StmtKind::Opaque;
        return finish(std::move(s), begin);
    }
    if (t.is("assembly")) {
        advance();
        if (peek().kind == TokenKind::String) {
            advance();
        }
        if (peek().is("(")) {
            skip_group();
        }
        if (!peek().is("{")) {
            throw ParseFailure{};
        }
        skip_group();
        s.kind = StmtKind::Opaque;
        return finish(std::move(s), begin);
    }
    if (t.is("try")) {
        advance();
        while (!at_end() && !peek().is("{")) {
            if (is_open(peek())) {
                skip_group();
            } else if (is_close(peek())) {
                throw ParseFailure{};
            } else {
                advance();
            }
        }
        if (at_end()) {
            throw ParseFailure{};
        }
        skip_group();
        while (peek().is("catch")) {
            advance();
            while (!at_end() && !peek().is("{")) {
                if (is_open(peek())) {
                    skip_group();
                } else if (is_close(peek())) {
                    throw ParseFailure{};
                } else {
                    advance();
                }
            }
            if (at_end()) {
                throw ParseFailure{};
            }
            skip_group();
        }
        s.kind = StmtKind::Opaque;
        return finish(std::move(s), begin);
    }
    return parse_simple_statement();
}

Statement Parser::parse_simple_statement()
{
    const std::size_t begin = peek().begin;
    Statement s;
    if (is_tuple_declaration(pos_)) {
        s.kind = StmtKind::LocalDecl;
        const std::size_t close = match_[pos_];
        advance();
        while (pos_ < close) {
            if (accept(",")) {
                continue;
            }
            const std::size_t decl_begin = peek().begin;
            const std::size_t type_begin = pos_;
            const std::size_t type_end = *skip_type(pos_);
            VarDecl v;
            v.type = join_tokens(toks_, type_begin, type_end);
            pos_ = type_end;
            if (peek().is_identifier() && kLocations.contains(peek().text)) {
                advance();
            }
            v.name = std::string(expect_identifier().text);
            v.span = file_->span(decl_begin, prev_end_);
            s.declared.push_back(std::move(v));
        }
        advance();
        expect("=");
        s.exprs.push_back(parse_expression());
        expect(";");
        return finish(std::move(s), begin);
    }
    if (is_declaration(pos_)) {
        s.kind = StmtKind::LocalDecl;
        const std::size_t type_begin = pos_;
        const std::size_t type_end = *skip_type(pos_);
        VarDecl v;
        v.type = join_tokens(toks_, type_begin, type_end);
        pos_ = type_end;
        if (peek().is_identifier() && kLocations.contains(peek().text)) {
            advance();
        }
        v.name = std::string(expect_identifier().text);
        v.span = file_->span(begin, prev_end_);
        s.declared.push_back(std::move(v));
        if (accept("=")) {
            s.exprs.push_back(parse_expression());
        }
        expect(";");
        return finish(std::move(s), begin);
    }

    Expression e = parse_expression();
    expect(";");
    s.kind = StmtKind::Expression;
    if (e.kind == ExprKind::Binary && kAssignOps.contains(e.op)) {
        s.kind = StmtKind::Assignment;
    } else if (e.kind == ExprKind::Call && e.callee && e.callee->kind == ExprKind::Identifier) {
        const auto& callee = e.callee->name;
        if (callee == "require" || callee == "assert") {
            s.kind = callee == "require" ? StmtKind::Require : StmtKind::Assert;
            if (!e.args.empty()) {
                s.condition = e.args.front();
            }
        } else if (callee == "revert") {
            s.kind = StmtKind::Revert;
        }
    }
    s.exprs.push_back(std::move(e));
    return finish(std::move(s), begin);
}

Expression Parser::make(ExprKind kind, std::size_t begin) const
{
    Expression e;
    e.kind = kind;
    e.span = file_->span(begin, prev_end_);
    e.raw = std::string(file_->slice(begin, prev_end_));
    return e;
}

Expression Parser::parse_expression()
{
    return parse_assignment();
}

Expression Parser::parse_assignment()
{
    const std::size_t begin = peek().begin;
    Expression lhs = parse_conditional();
    if (peek().kind == TokenKind::Punct && kAssignOps.contains(peek().text)) {
        std::string op(advance().text);
        Expression rhs = parse_assignment();
        Expression e = make(ExprKind::Binary, begin);
        e.op = std::move(op);
        e.args.push_back(std::move(lhs));
        e.args.push_back(std::move(rhs));
        return e;
    }
    return lhs;
}

Expression Parser::parse_conditional()
{
    const std::size_t begin = peek().begin;
    Expression cond = parse_binary(1);
    if (accept("?")) {
        Expression a = parse_assignment();
        expect(":");
        Expression b = parse_assignment();
        Expression e = make(ExprKind::Conditional, begin);
        e.op = "?:";
        e.args.push_back(std::move(cond));
        e.args.push_back(std::move(a));
        e.args.push_back(std::move(b));
        return e;
    }
    return cond;
}

Expression Parser::parse_binary(int min_prec)
{
    const std::size_t begin = peek().begin;
    Expression left = parse_unary();
    for (;;) {
        const int prec = binary_precedence(peek());
        if (prec < 0 || prec < min_prec) {
            break;
        }
        std::string op(advance().text);
        Expression right = op == "**" ? parse_binary(prec) : parse_binary(prec + 1);
        Expression e = make(ExprKind::Binary, begin);
        e.op = std::move(op);
        e.args.push_back(std::move(left));
        e.args.push_back(std::move(right));
        left = std::move(e);
    }
    return left;
}

Expression Parser::parse_unary()
{
    const Token& t = peek();
    if (t.kind == TokenKind::Punct &&
        (t.text == "!" || t.text == "~" || t.text == "-" || t.text == "+" || t.text == "++" || t.text == "--")) {
        const std::size_t begin = t.begin;
        std::string op(advance().text);
        Expression operand = parse_unary();
        Expression e = make(ExprKind::Unary, begin);
        e.op = std::move(op);
        e.args.push_back(std::move(operand));
        return e;
    }
    if (t.is("delete")) {
        const std::size_t begin = t.begin;
        advance();
        Expression operand = parse_unary();
        Expression e = make(ExprKind::Unary, begin);
        e.op = "delete";
        e.args.push_back(std::move(operand));
        return e;
    }
    return parse_postfix();
}

Expression Parser::parse_postfix()
{
    const std::size_t begin = peek().begin;
    Expression e = parse_primary();
    for (;;) {
        if (peek().is(".")) {
            advance();
            const Token& member = peek();
            if (!member.is_identifier()) {
                throw ParseFailure{};
            }
            advance();
            Expression m = make(ExprKind::MemberAccess, begin);
            m.name = std::string(member.text);
            m.callee = std::make_shared<const Expression>(std::move(e));
            e = std::move(m);
        } else if (peek().is("[")) {
            advance();
            Expression idx = make(ExprKind::Index, begin);
            if (!peek().is("]")) {
                if (!peek().is(":")) {
                    idx.args.push_back(parse_expression());
                }
                if (accept(":") && !peek().is("]")) {
                    idx.args.push_back(parse_expression());
                }
            }
            expect("]");
            Expression done = make(ExprKind::Index, begin);
            done.args = std::move(idx.args);
            done.callee = std::make_shared<const Expression>(std::move(e));
            e = std::move(done);
        } else if (peek().is("{") && peek(1).is_identifier() && peek(2).is(":")) {
            // call options: f{value: v, gas: g}(...)
            skip_group();
            e.span = file_->span(begin, prev_end_);
            e.raw = std::string(file_->slice(begin, prev_end_));
        } else if (peek().is("(")) {
            advance();
            std::vector<Expression> args;
            if (peek().is("{")) {
                advance();
                while (!peek().is("}")) {
                    expect_identifier();
                    expect(":");
                    args.push_back(parse_expression());
                    if (!accept(",")) {
                        break;
                    }
                }
                expect("}");
            } else {
                while (!peek().is(")")) {
                    args.push_back(parse_expression());
                    if (!accept(",")) {
                        break;
                    }
                }
            }
            expect(")");
            Expression call = make(ExprKind::Call, begin);
            call.args = std::move(args);
            call.callee = std::make_shared<const Expression>(std::move(e));
            e = std::move(call);
        } else if (peek().is("++") || peek().is("--")) {
            std::string op(advance().text);
            Expression u = make(ExprKind::Unary, begin);
            u.op = op;
            u.name = "postfix";
            u.args.push_back(std::move(e));
            e = std::move(u);
        } else {
            break;
        }
    }
    return e;
}

Expression Parser::parse_primary()
{
    const Token& t = peek();
    const std::size_t begin = t.begin;
    if (t.is("(") || t.is("[")) {
        const bool array = t.is("[");
        const std::string_view close = array ? "]" : ")";
        advance();
        std::vector<Expression> items;
        while (!peek().is(close)) {
            if (accept(",")) {
                continue;
            }
            items.push_back(parse_expression());
            if (!peek().is(close)) {
                expect(",");
            }
        }
        advance();
        Expression e = make(ExprKind::Tuple, begin);
        e.op = array ? "[]" : "()";
        e.args = std::move(items);
        return e;
    }
    if (t.kind == TokenKind::Number) {
        advance();
        if (peek().is_identifier() && kEtherUnits.contains(peek().text)) {
            advance();
        }
        return make(ExprKind::Literal, begin);
    }
    if (t.kind == TokenKind::String) {
        advance();
        while (peek().kind == TokenKind::String) {
            advance();
        }
        return make(ExprKind::Literal, begin);
    }
    if (t.is_identifier()) {
        if (t.is("true") || t.is("false")) {
            advance();
            return make(ExprKind::Literal, begin);
        }
        if (t.is("new")) {
            advance();
            const std::size_t type_begin = pos_;
            const auto after = skip_type(pos_);
            if (!after) {
                throw ParseFailure{};
            }
            const std::size_t type_offset = peek().begin;
            pos_ = *after;
            prev_end_ = toks_[pos_ - 1].end;
            Expression type_expr = make(ExprKind::Identifier, type_offset);
            type_expr.name = join_tokens(toks_, type_begin, *after);
            Expression e = make(ExprKind::Unary, begin);
            e.op = "new";
            e.args.push_back(std::move(type_expr));
            return e;
        }
        if (kNonTypeWords.contains(t.text) && !t.is("revert") && !t.is("_")) {
            throw ParseFailure{};
        }
        advance();
        Expression e = make(ExprKind::Identifier, begin);
        e.name = std::string(t.text);
        if (t.is("address") && peek().is("payable")) {
            advance();
            e = make(ExprKind::Identifier, begin);
            e.name = "address payable";
        }
        return e;
    }
    throw ParseFailure{};
}

} // namespace

std::string_view Expression::terminal_name() const noexcept
{
    if (kind == ExprKind::Identifier || kind == ExprKind::MemberAccess) {
        return name;
    }
    return {};
}

std::string_view Statement::own_text() const noexcept
{
    const std::size_t len = own_end > span.begin ? own_end - span.begin : raw.size();
    return std::string_view(raw).substr(0, std::min(len, raw.size()));
}

std::string_view to_string(StmtKind kind) noexcept
{
    switch (kind) {
    case StmtKind::If: return "if";
    case StmtKind::Require: return "require";
    case StmtKind::Assert: return "assert";
    case StmtKind::Revert: return "revert";
    case StmtKind::Expression: return "expression";
    case StmtKind::Assignment: return "assignment";
    case StmtKind::LocalDecl: return "local-decl";
    case StmtKind::Return: return "return";
    case StmtKind::For: return "for";
    case StmtKind::While: return "while";
    case StmtKind::Block: return "block";
    case StmtKind::Emit: return "emit";
    case StmtKind::Opaque: return "opaque";
    }
    return "opaque";
}

std::string_view to_string(ExprKind kind) noexcept
{
    switch (kind) {
    case ExprKind::Identifier: return "identifier";
    case ExprKind::MemberAccess: return "member-access";
    case ExprKind::Index: return "index";
    case ExprKind::Call: return "call";
    case ExprKind::Binary: return "binary";
    case ExprKind::Unary: return "unary";
    case ExprKind::Literal: return "literal";
    case ExprKind::Tuple: return "tuple";
    case ExprKind::Conditional: return "conditional";
    }
    return "literal";
}

std::string_view to_string(Visibility v) noexcept
{
    switch (v) {
    case Visibility::Public: return "public";
    case Visibility::External: return "external";
    case Visibility::Internal: return "internal";
    case Visibility::Private: return "private";
    }
    return "public";
}

std::string_view to_string(ContractKind k) noexcept
{
    switch (k) {
    case ContractKind::Contract: return "contract";
    case ContractKind::Interface: return "interface";
    case ContractKind::Library: return "library";
    case ContractKind::Abstract: return "abstract";
    }
    return "contract";
}

std::string FunctionRecord::display_name() const
{
    switch (kind) {
    case FunctionKind::Constructor: return "constructor";
    case FunctionKind::Fallback: return "fallback";
    case FunctionKind::Receive: return "receive";
    case FunctionKind::Function: break;
    }
    return name;
}

std::string FunctionRecord::qualified_name() const
{
    return contract + "." + display_name();
}

std::string FunctionRecord::id() const
{
    std::string out = file + ":" + qualified_name() + "(";
    for (std::size_t i = 0; i < params.size(); ++i) {
        if (i > 0) {
            out += ",";
        }
        out += params[i].type;
    }
    out += ")";
    return out;
}

SourceUnit parse_source(std::shared_ptr<const SourceFile> file)
{
    auto tokens = tokenize(*file);
    Parser parser(file, std::move(tokens));
    return parser.parse_unit();
}

std::vector<FunctionRecord> enumerate_functions(const SourceUnit& unit)
{
    std::vector<FunctionRecord> out;
    for (const auto& c : unit.contracts) {
        out.insert(out.end(), c.functions.begin(), c.functions.end());
    }
    out.insert(out.end(), unit.free_functions.begin(), unit.free_functions.end());
    return out;
}

std::optional<Expression> parse_expression_text(std::string_view text)
{
    auto file = std::make_shared<const SourceFile>("<expr>", std::string(text));
    try {
        Parser parser(file, tokenize(*file));
        if (parser.at_end()) {
            return std::nullopt;
        }
        Expression e = parser.parse_expression();
        if (!parser.at_end()) {
            return std::nullopt;
        }
        return e;
    } catch (const SyntaxError&) {
        return std::nullopt;
    } catch (const ParseFailure&) {
        return std::nullopt;
    }
}

} // namespace logiscan
