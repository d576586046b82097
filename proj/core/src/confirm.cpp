#include "logiscan/confirm.hpp"

#include "logiscan/parser.hpp"

#include <algorithm>
#include <cctype>
#include <deque>
#include <set>
#include <unordered_set>

namespace logiscan {

namespace {

const std::unordered_set<std::string_view> kAssignOps{"=",  "+=", "-=", "*=", "/=",  "%=",
                                                      "|=", "&=", "^=", "<<=", ">>=", ">>>="};
const std::unordered_set<std::string_view> kComparisonOps{"==", "!=", "<", ">", "<=", ">="};
const std::unordered_set<std::string_view> kGlobalObjects{"msg", "block", "tx"};
const std::unordered_set<std::string_view> kIgnoredNames{"this", "super", "true", "false", "require", "assert",
                                                         "revert"};

std::string trim(std::string_view s)
{
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string_view::npos) {
        return {};
    }
    return std::string(s.substr(b, s.find_last_not_of(" \t\r\n") - b + 1));
}

std::string collapse_ws(std::string_view s)
{
    std::string out;
    bool pending = false;
    for (const char c : s) {
        if (std::isspace(static_cast<unsigned char>(c))) {
            pending = !out.empty();
        } else {
            if (pending) {
                out += ' ';
                pending = false;
            }
            out += c;
        }
    }
    return out;
}

/// Descriptor text without surrounding blanks and a trailing semicolon.
std::string clean_descriptor(std::string_view d)
{
    auto s = trim(d);
    while (!s.empty() && s.back() == ';') {
        s.pop_back();
        s = trim(s);
    }
    return collapse_ws(s);
}

bool is_global_member(const Expression& e)
{
    return e.kind == ExprKind::MemberAccess && e.callee && e.callee->kind == ExprKind::Identifier &&
           kGlobalObjects.contains(e.callee->name);
}

std::string principal_of(const Expression& e)
{
    switch (e.kind) {
    case ExprKind::Identifier: return e.name;
    case ExprKind::MemberAccess:
        if (is_global_member(e)) {
            return e.callee->name + "." + e.name;
        }
        return e.callee ? principal_of(*e.callee) : e.name;
    case ExprKind::Index: return e.callee ? principal_of(*e.callee) : trim(e.raw);
    case ExprKind::Call:
        if (e.callee) {
            const auto t = e.callee->terminal_name();
            return t.empty() ? principal_of(*e.callee) : std::string(t);
        }
        return trim(e.raw);
    case ExprKind::Tuple:
        if (e.op == "()" && e.args.size() == 1) {
            return principal_of(e.args.front());
        }
        return trim(e.raw);
    case ExprKind::Binary:
        if (kAssignOps.contains(e.op) && !e.args.empty()) {
            return principal_of(e.args.front());
        }
        return trim(e.raw);
    default: return trim(e.raw);
    }
}

void collect_principals(const Expression& e, std::vector<std::string>& out)
{
    auto push = [&](std::string name) {
        if (!name.empty() && !kIgnoredNames.contains(name) &&
            std::find(out.begin(), out.end(), name) == out.end()) {
            out.push_back(std::move(name));
        }
    };
    switch (e.kind) {
    case ExprKind::Identifier: push(e.name); return;
    case ExprKind::MemberAccess:
        if (is_global_member(e)) {
            push(e.callee->name + "." + e.name);
        } else if (e.callee) {
            collect_principals(*e.callee, out);
        }
        return;
    case ExprKind::Call:
        if (e.callee) {
            const Expression& c = *e.callee;
            if (c.kind == ExprKind::Identifier) {
                push(c.name);
            } else if (c.kind == ExprKind::MemberAccess && !is_global_member(c)) {
                push(c.name);
                if (c.callee) {
                    collect_principals(*c.callee, out);
                }
            } else {
                collect_principals(c, out);
            }
        }
        break;
    case ExprKind::Index:
        if (e.callee) {
            collect_principals(*e.callee, out);
        }
        break;
    case ExprKind::Literal: return;
    default: break;
    }
    for (const auto& a : e.args) {
        collect_principals(a, out);
    }
}

std::vector<std::string> assigned_principals(const Expression& lhs)
{
    std::vector<std::string> out;
    if (lhs.kind == ExprKind::Tuple) {
        for (const auto& a : lhs.args) {
            if (!a.raw.empty()) {
                auto p = principal_of(a);
                if (!p.empty()) {
                    out.push_back(std::move(p));
                }
            }
        }
    } else {
        out.push_back(principal_of(lhs));
    }
    return out;
}

/// Span used when citing a statement: the condition for compound
/// statements, the statement itself otherwise.
Span citation_span(const Statement& s)
{
    if (!s.children.empty() && s.condition) {
        return s.condition->span;
    }
    return s.span;
}

std::set<std::string> locals_of(const FunctionRecord& fn)
{
    std::set<std::string> out;
    for (const auto& p : fn.params) {
        if (!p.name.empty()) {
            out.insert(p.name);
        }
    }
    for_each_statement(fn.body, [&](const Statement& s) {
        for (const auto& d : s.declared) {
            out.insert(d.name);
        }
    });
    return out;
}

bool is_condition_statement(const Statement& s)
{
    return (s.kind == StmtKind::If || s.kind == StmtKind::Require || s.kind == StmtKind::Assert) && s.condition;
}

/// True if `name` is compared in `cond` or is tested on its own.
bool compares(const Expression& cond, const std::string& name)
{
    if (cond.kind == ExprKind::Binary && kComparisonOps.contains(cond.op)) {
        for (const auto& side : cond.args) {
            std::vector<std::string> ps;
            collect_principals(side, ps);
            if (std::find(ps.begin(), ps.end(), name) != ps.end()) {
                return true;
            }
        }
        return false;
    }
    if (cond.kind == ExprKind::Binary && (cond.op == "&&" || cond.op == "||")) {
        return std::any_of(cond.args.begin(), cond.args.end(), [&](const auto& a) { return compares(a, name); });
    }
    if (cond.kind == ExprKind::Unary && cond.op == "!" && !cond.args.empty()) {
        return compares(cond.args.front(), name);
    }
    if (cond.kind == ExprKind::Tuple && cond.op == "()" && cond.args.size() == 1) {
        return compares(cond.args.front(), name);
    }
    if (cond.kind == ExprKind::Identifier || cond.kind == ExprKind::MemberAccess || cond.kind == ExprKind::Index ||
        cond.kind == ExprKind::Call) {
        return principal_of(cond) == name;
    }
    return false;
}

CheckVerdict reject(CheckVerdict v, std::string reason)
{
    v.confirmed = false;
    v.reason = std::move(reason);
    v.evidence.clear();
    return v;
}

std::vector<Evidence> path_evidence(const DefUseGraph& g, const std::vector<std::size_t>& path, const std::string& note)
{
    std::vector<Evidence> out;
    for (const auto e : path) {
        const auto& edge = g.edges()[e];
        out.push_back({edge.file, edge.span,
                       note + ": " + g.nodes()[edge.from].name + " -> " + g.nodes()[edge.to].name});
    }
    return out;
}

} // namespace

std::string principal_name(std::string_view descriptor)
{
    const auto text = clean_descriptor(descriptor);
    const auto expr = parse_expression_text(text);
    if (!expr) {
        return text;
    }
    return principal_of(*expr);
}

std::vector<std::string> principals_in(const Expression& e)
{
    std::vector<std::string> out;
    collect_principals(e, out);
    return out;
}

std::size_t DefUseGraph::add_node(const std::string& scope, const std::string& name, const std::string& file, Span occurrence)
{
    const auto key = std::make_pair(scope, name);
    if (const auto it = index_.find(key); it != index_.end()) {
        return it->second;
    }
    const auto id = nodes_.size();
    nodes_.push_back({scope, name, file, occurrence});
    out_.emplace_back();
    index_.emplace(key, id);
    return id;
}

void DefUseGraph::add_edge(std::size_t from, std::size_t to, const std::string& file, Span span)
{
    if (from == to) {
        return;
    }
    for (const auto e : out_[from]) {
        if (edges_[e].to == to) {
            return;
        }
    }
    out_[from].push_back(edges_.size());
    edges_.push_back({from, to, file, span});
}

std::optional<std::size_t> DefUseGraph::find(const std::string& scope, const std::string& name) const
{
    const auto it = index_.find({scope, name});
    if (it == index_.end()) {
        return std::nullopt;
    }
    return it->second;
}

std::vector<std::size_t> DefUseGraph::nodes_named(std::string_view name) const
{
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < nodes_.size(); ++i) {
        if (nodes_[i].name == name) {
            out.push_back(i);
        }
    }
    return out;
}

std::optional<std::vector<std::size_t>> DefUseGraph::path(const std::vector<std::size_t>& sources,
                                                          const std::vector<std::size_t>& targets) const
{
    const std::set<std::size_t> goal(targets.begin(), targets.end());
    std::vector<std::optional<std::size_t>> via(nodes_.size());
    std::vector<bool> seen(nodes_.size(), false);
    std::deque<std::size_t> queue;
    for (const auto s : sources) {
        if (goal.contains(s)) {
            return std::vector<std::size_t>{};
        }
        if (!seen[s]) {
            seen[s] = true;
            queue.push_back(s);
        }
    }
    while (!queue.empty()) {
        const auto cur = queue.front();
        queue.pop_front();
        for (const auto e : out_[cur]) {
            const auto next = edges_[e].to;
            if (seen[next]) {
                continue;
            }
            seen[next] = true;
            via[next] = e;
            if (goal.contains(next)) {
                std::vector<std::size_t> path;
                for (auto n = next; via[n]; n = edges_[*via[n]].from) {
                    path.push_back(*via[n]);
                }
                std::reverse(path.begin(), path.end());
                return path;
            }
            queue.push_back(next);
        }
    }
    return std::nullopt;
}

std::string scope_of(const FunctionRecord& fn, const std::string& name)
{
    return locals_of(fn).contains(name) ? fn.id() : std::string();
}

DefUseGraph build_def_use(const CodeContext& context,
                          const std::vector<FunctionRecord>& functions,
                          const CallGraph& graph)
{
    DefUseGraph g;
    const auto members = context.members();
    const std::set<FunctionIndex> member_set(members.begin(), members.end());

    for (const auto idx : members) {
        const auto& fn = functions[idx];
        const auto locals = locals_of(fn);
        const auto fid = fn.id();
        auto node = [&](const std::string& name, Span occurrence) {
            return g.add_node(locals.contains(name) ? fid : std::string(), name, fn.file, occurrence);
        };
        for (const auto& p : fn.params) {
            if (!p.name.empty()) {
                node(p.name, fn.span);
            }
        }
        for_each_statement(fn.body, [&](const Statement& s) {
            for (const auto& d : s.declared) {
                node(d.name, d.span);
            }
            for_each_own_expression(s, [&](const Expression& e) {
                if (e.kind == ExprKind::Identifier && !kIgnoredNames.contains(e.name)) {
                    node(e.name, e.span);
                } else if (is_global_member(e)) {
                    node(e.callee->name + "." + e.name, e.span);
                }
            });

            if (s.kind == StmtKind::LocalDecl && !s.exprs.empty()) {
                for (const auto& src : principals_in(s.exprs.front())) {
                    const auto from = node(src, s.span);
                    for (const auto& d : s.declared) {
                        g.add_edge(from, node(d.name, d.span), fn.file, s.span);
                    }
                }
            }
            for_each_own_expression(s, [&](const Expression& e) {
                if (e.kind == ExprKind::Binary && kAssignOps.contains(e.op) && e.args.size() == 2) {
                    const auto targets = assigned_principals(e.args[0]);
                    for (const auto& src : principals_in(e.args[1])) {
                        const auto from = node(src, e.args[1].span);
                        for (const auto& t : targets) {
                            g.add_edge(from, node(t, e.args[0].span), fn.file, e.span);
                        }
                    }
                    return;
                }
                if (e.kind != ExprKind::Call || !e.callee) {
                    return;
                }
                const auto callee_name = e.callee->terminal_name();
                for (const auto& edge : graph.edges) {
                    if (edge.caller != idx || edge.seq != s.seq || !member_set.contains(edge.callee)) {
                        continue;
                    }
                    const auto& target = functions[edge.callee];
                    if (target.name != callee_name || target.arity() != e.args.size()) {
                        continue;
                    }
                    const auto tid = target.id();
                    for (std::size_t i = 0; i < e.args.size(); ++i) {
                        const auto& pname = target.params[i].name;
                        if (pname.empty()) {
                            continue;
                        }
                        const auto to = g.add_node(tid, pname, target.file, target.span);
                        for (const auto& src : principals_in(e.args[i])) {
                            g.add_edge(node(src, e.args[i].span), to, fn.file, e.span);
                        }
                    }
                    break;
                }
            });
        });
    }
    return g;
}

CheckVerdict check_dataflow(const std::string& a, const std::string& b, const DefUseGraph& graph, Expectation expectation)
{
    CheckVerdict v;
    v.kind = CheckKind::DF;
    const auto pa = principal_name(a);
    const auto pb = principal_name(b);
    v.names = {pa, pb};
    const auto na = graph.nodes_named(pa);
    const auto nb = graph.nodes_named(pb);
    if (na.empty() || nb.empty()) {
        return reject(v, "unknown name '" + (na.empty() ? pa : pb) + "'");
    }
    auto found = graph.path(na, nb);
    if (!found) {
        found = graph.path(nb, na);
    }
    if (expectation == Expectation::Absent) {
        if (found) {
            return reject(v, "dependency between '" + pa + "' and '" + pb + "' exists");
        }
        const auto& x = graph.nodes()[na.front()];
        const auto& y = graph.nodes()[nb.front()];
        v.evidence = {{x.file, x.occurrence, "occurrence of " + pa}, {y.file, y.occurrence, "occurrence of " + pb}};
        v.confirmed = true;
        return v;
    }
    if (!found) {
        return reject(v, "no dependency between '" + pa + "' and '" + pb + "'");
    }
    if (found->empty()) {
        const auto& n = graph.nodes()[na.front()];
        v.evidence = {{n.file, n.occurrence, "occurrence of " + pa}};
    } else {
        v.evidence = path_evidence(graph, *found, "data flow");
    }
    v.confirmed = true;
    return v;
}

CheckVerdict check_value_comparison(const std::vector<std::string>& names,
                                    const CodeContext& context,
                                    const std::vector<FunctionRecord>& functions,
                                    Expectation expectation)
{
    CheckVerdict v;
    v.kind = CheckKind::VC;
    for (const auto& n : names) {
        v.names.push_back(principal_name(n));
    }
    if (v.names.empty()) {
        return reject(v, "no names to compare");
    }
    std::optional<Evidence> comparison;
    std::map<std::string, Evidence> occurrences;
    for (const auto idx : context.members()) {
        const auto& fn = functions[idx];
        for_each_statement(fn.body, [&](const Statement& s) {
            std::vector<std::string> seen;
            for (const auto& e : s.exprs) {
                collect_principals(e, seen);
            }
            for (const auto& d : s.declared) {
                seen.push_back(d.name);
            }
            if (s.condition) {
                collect_principals(*s.condition, seen);
            }
            for (const auto& n : v.names) {
                if (!occurrences.contains(n) && std::find(seen.begin(), seen.end(), n) != seen.end()) {
                    occurrences.emplace(n, Evidence{fn.file, citation_span(s), "occurrence of " + n});
                }
            }
            if (comparison || !is_condition_statement(s)) {
                return;
            }
            const auto& cond = *s.condition;
            bool hit = false;
            if (v.names.size() == 1) {
                hit = compares(cond, v.names.front());
            } else {
                const auto ps = principals_in(cond);
                hit = std::all_of(v.names.begin(), v.names.end(),
                                  [&](const auto& n) { return std::find(ps.begin(), ps.end(), n) != ps.end(); });
            }
            if (hit) {
                comparison = Evidence{fn.file, cond.span, std::string(to_string(s.kind)) + " condition"};
            }
        });
    }
    if (expectation == Expectation::Absent) {
        if (comparison) {
            return reject(v, "compared in a condition");
        }
        for (const auto& n : v.names) {
            const auto it = occurrences.find(n);
            if (it == occurrences.end()) {
                return reject(v, "unknown name '" + n + "'");
            }
            v.evidence.push_back(it->second);
        }
        v.confirmed = true;
        return v;
    }
    if (!comparison) {
        return reject(v, "not compared in any if/require/assert condition");
    }
    v.evidence.push_back(*comparison);
    v.confirmed = true;
    return v;
}

std::vector<OrderedStatement> ordered_statements(const CodeContext& context,
                                                 const std::vector<FunctionRecord>& functions,
                                                 const CallGraph& graph)
{
    std::vector<OrderedStatement> out;
    const auto& focus = functions[context.focus];
    for_each_statement(focus.body, [&](const Statement& s) {
        out.push_back({s.seq, 0, &s, &focus});
        std::vector<FunctionIndex> inlined;
        for (const auto& e : graph.edges) {
            if (e.caller != context.focus || e.seq != s.seq || e.callee == context.focus) {
                continue;
            }
            if (std::find(inlined.begin(), inlined.end(), e.callee) != inlined.end()) {
                continue;
            }
            inlined.push_back(e.callee);
            const auto& callee = functions[e.callee];
            for_each_statement(callee.body, [&](const Statement& inner) {
                out.push_back({s.seq, inner.seq + 1, &inner, &callee});
            });
        }
    });
    std::stable_sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
        return std::tie(a.outer, a.inner) < std::tie(b.outer, b.inner);
    });
    return out;
}

std::optional<OrderedStatement> resolve_statement(std::string_view descriptor,
                                                  const std::vector<OrderedStatement>& statements)
{
    const auto text = clean_descriptor(descriptor);
    if (text.empty()) {
        return std::nullopt;
    }
    std::string call_name;
    if (const auto expr = parse_expression_text(text); expr && expr->kind == ExprKind::Call && expr->callee) {
        call_name = std::string(expr->callee->terminal_name());
    }
    for (const auto& os : statements) {
        const auto& s = *os.statement;
        if (collapse_ws(s.own_text()).find(text) != std::string::npos) {
            return os;
        }
        if (call_name.empty()) {
            continue;
        }
        bool hit = false;
        for_each_own_expression(s, [&](const Expression& e) {
            if (!hit && e.kind == ExprKind::Call && e.callee && e.callee->terminal_name() == call_name) {
                hit = true;
            }
        });
        if (hit) {
            return os;
        }
    }
    return std::nullopt;
}

std::optional<Ordering> statement_order(std::string_view first,
                                        std::string_view second,
                                        const std::vector<OrderedStatement>& statements)
{
    const auto a = resolve_statement(first, statements);
    const auto b = resolve_statement(second, statements);
    if (!a || !b) {
        return std::nullopt;
    }
    const auto ka = std::tie(a->outer, a->inner);
    const auto kb = std::tie(b->outer, b->inner);
    if (ka < kb) {
        return Ordering::Before;
    }
    if (kb < ka) {
        return Ordering::After;
    }
    return Ordering::Same;
}

CheckVerdict check_order(const std::string& first,
                         const std::string& second,
                         Expectation expectation,
                         const CodeContext& context,
                         const std::vector<FunctionRecord>& functions,
                         const CallGraph& graph)
{
    CheckVerdict v;
    v.kind = CheckKind::OC;
    v.names = {clean_descriptor(first), clean_descriptor(second)};
    const auto stmts = ordered_statements(context, functions, graph);
    const auto a = resolve_statement(first, stmts);
    const auto b = resolve_statement(second, stmts);
    if (!a || !b) {
        return reject(v, "unknown statement '" + (a ? v.names[1] : v.names[0]) + "'");
    }
    const auto order = statement_order(first, second, stmts);
    const bool ok = (expectation == Expectation::Before && order == Ordering::Before) ||
                    (expectation == Expectation::After && order == Ordering::After);
    if (!ok) {
        return reject(v, order == Ordering::Same ? "both descriptors resolve to one statement"
                                                 : "statements are in the expected safe order");
    }
    v.evidence = {{a->owner->file, citation_span(*a->statement), "first: " + v.names[0]},
                  {b->owner->file, citation_span(*b->statement), "second: " + v.names[1]}};
    v.confirmed = true;
    return v;
}

CheckVerdict check_fn_arg(const std::string& call,
                          const std::string& argument,
                          const CodeContext& context,
                          const std::vector<FunctionRecord>& functions,
                          const DefUseGraph& graph,
                          const ReachabilitySet& reach)
{
    CheckVerdict v;
    v.kind = CheckKind::FA;
    const auto call_name = principal_name(call);
    const auto arg_text = clean_descriptor(argument);
    v.names = {call_name, arg_text};

    const Expression* found = nullptr;
    const FunctionRecord* owner = nullptr;
    for (const auto idx : context.members()) {
        const auto& fn = functions[idx];
        for_each_statement(fn.body, [&](const Statement& s) {
            for_each_own_expression(s, [&](const Expression& e) {
                if (!found && e.kind == ExprKind::Call && e.callee && e.callee->terminal_name() == call_name) {
                    found = &e;
                    owner = &fn;
                }
            });
        });
        if (found) {
            break;
        }
    }
    if (!found) {
        return reject(v, "call '" + call_name + "' not found");
    }

    std::optional<std::size_t> index;
    if (!arg_text.empty() && std::all_of(arg_text.begin(), arg_text.end(), [](unsigned char c) { return std::isdigit(c); })) {
        index = std::stoul(arg_text.size() > 6 ? "999999" : arg_text);
    } else {
        for (std::size_t i = 0; i < found->args.size() && !index; ++i) {
            if (collapse_ws(found->args[i].raw) == arg_text) {
                index = i;
            }
        }
        const auto p = principal_name(arg_text);
        for (std::size_t i = 0; i < found->args.size() && !index; ++i) {
            const auto ps = principals_in(found->args[i]);
            if (std::find(ps.begin(), ps.end(), p) != ps.end()) {
                index = i;
            }
        }
    }
    if (!index || *index >= found->args.size()) {
        return reject(v, "argument '" + arg_text + "' not found in call to " + call_name);
    }
    const auto& arg = found->args[*index];

    std::vector<std::size_t> targets;
    for (const auto& p : principals_in(arg)) {
        if (const auto n = graph.find(scope_of(*owner, p), p)) {
            targets.push_back(*n);
        }
    }
    if (targets.empty()) {
        return reject(v, "argument does not depend on any variable");
    }
    std::vector<std::size_t> sources;
    for (const auto idx : context.members()) {
        const auto& fn = functions[idx];
        const bool entry = fn.visibility == Visibility::Public || fn.visibility == Visibility::External;
        if (!entry || !reach.is_reachable(idx)) {
            continue;
        }
        for (const auto& p : fn.params) {
            if (const auto n = graph.find(fn.id(), p.name)) {
                sources.push_back(*n);
            }
        }
    }
    const auto path = graph.path(sources, targets);
    if (!path) {
        return reject(v, "argument is not derived from a reachable entry point parameter");
    }

    std::set<std::string> path_names;
    for (const auto t : targets) {
        path_names.insert(graph.nodes()[t].name);
    }
    for (const auto e : *path) {
        path_names.insert(graph.nodes()[graph.edges()[e].from].name);
        path_names.insert(graph.nodes()[graph.edges()[e].to].name);
    }
    if (path->empty()) {
        for (const auto s : sources) {
            if (std::find(targets.begin(), targets.end(), s) != targets.end()) {
                path_names.insert(graph.nodes()[s].name);
            }
        }
    }
    std::optional<std::string> guard;
    for (const auto idx : context.members()) {
        for_each_statement(functions[idx].body, [&](const Statement& s) {
            if (guard || !is_condition_statement(s)) {
                return;
            }
            const auto ps = principals_in(*s.condition);
            const bool sender = std::find(ps.begin(), ps.end(), "msg.sender") != ps.end();
            const bool on_path = std::any_of(ps.begin(), ps.end(), [&](const auto& n) { return path_names.contains(n); });
            if (sender && on_path) {
                guard = s.condition->raw;
            }
        });
    }
    if (guard) {
        return reject(v, "guarded by sender check '" + *guard + "'");
    }
    v.evidence.push_back({owner->file, arg.span, "argument " + std::to_string(*index) + " of " + call_name});
    auto flow = path_evidence(graph, *path, "user-controlled flow");
    v.evidence.insert(v.evidence.end(), flow.begin(), flow.end());
    v.confirmed = true;
    return v;
}

ConfirmResult confirm_candidate(const VulnRule& rule,
                                const RecognitionAnswer& recognized,
                                const CodeContext& context,
                                const std::vector<FunctionRecord>& functions,
                                const CallGraph& graph,
                                const ReachabilitySet& reach)
{
    ConfirmResult result;
    result.confirmed = true;
    std::optional<DefUseGraph> defuse;
    auto dug = [&]() -> const DefUseGraph& {
        if (!defuse) {
            defuse = build_def_use(context, functions, graph);
        }
        return *defuse;
    };
    for (const auto& check : rule.checks) {
        std::vector<std::string> names;
        bool missing = false;
        for (const auto& slot : check.between) {
            const auto it = recognized.find(slot);
            if (it == recognized.end()) {
                missing = true;
                break;
            }
            names.push_back(it->second.name);
        }
        CheckVerdict v;
        v.kind = check.kind;
        if (missing) {
            v.reason = "missing recognized slot";
        } else {
            switch (check.kind) {
            case CheckKind::DF: v = check_dataflow(names[0], names[1], dug(), check.expectation); break;
            case CheckKind::VC: v = check_value_comparison(names, context, functions, check.expectation); break;
            case CheckKind::OC: v = check_order(names[0], names[1], check.expectation, context, functions, graph); break;
            case CheckKind::FA: v = check_fn_arg(names[0], names[1], context, functions, dug(), reach); break;
            }
        }
        v.slots = check.between;
        result.confirmed = result.confirmed && v.confirmed;
        result.verdicts.push_back(std::move(v));
    }
    return result;
}

} // namespace logiscan
