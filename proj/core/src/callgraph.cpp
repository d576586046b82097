#include "logiscan/callgraph.hpp"

#include "logiscan/errors.hpp"
#include "logiscan/tokens.hpp"

#include <algorithm>
#include <deque>
#include <regex>
#include <set>
#include <tuple>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

namespace logiscan {

namespace {

const std::unordered_set<std::string_view> kBuiltins{
    "require", "assert",  "revert",    "keccak256", "sha256",  "sha3",   "ripemd160", "ecrecover",
    "addmod",  "mulmod",  "blockhash", "gasleft",   "selfdestruct", "suicide", "type", "payable",
    "address", "bool",    "string",    "bytes",     "byte",    "uint",   "int"};

bool is_elementary_type(std::string_view name)
{
    static const std::regex re(R"(^(u?int\d*|bytes\d*|u?fixed[\dx]*)$)");
    return std::regex_match(name.begin(), name.end(), re);
}

struct Resolver {
    const std::vector<FunctionRecord>& functions;
    const InheritanceMap& inheritance;
    // contract -> name -> indices
    std::unordered_map<std::string, std::unordered_map<std::string, std::vector<FunctionIndex>>> by_contract;
    std::unordered_map<std::string, std::vector<FunctionIndex>> by_name;
    std::unordered_map<std::string, std::optional<std::vector<std::string>>> chains;

    Resolver(const std::vector<FunctionRecord>& fns, const InheritanceMap& inh) : functions(fns), inheritance(inh)
    {
        for (FunctionIndex i = 0; i < fns.size(); ++i) {
            const auto& f = fns[i];
            if (f.kind != FunctionKind::Function) {
                continue;
            }
            by_contract[f.contract][f.name].push_back(i);
            by_name[f.name].push_back(i);
        }
    }

    const std::optional<std::vector<std::string>>& chain(const std::string& contract)
    {
        auto it = chains.find(contract);
        if (it == chains.end()) {
            it = chains.emplace(contract, linearize(contract, inheritance)).first;
        }
        return it->second;
    }

    /// Matching functions defined directly in `contract`.
    std::vector<FunctionIndex> in_contract(const std::string& contract, const std::string& name, std::size_t arity) const
    {
        std::vector<FunctionIndex> out;
        const auto c = by_contract.find(contract);
        if (c == by_contract.end()) {
            return out;
        }
        const auto n = c->second.find(name);
        if (n == c->second.end()) {
            return out;
        }
        for (const auto i : n->second) {
            if (functions[i].arity() == arity) {
                out.push_back(i);
            }
        }
        return out;
    }

    enum class Outcome { Resolved, Ambiguous, Missing };

    /// Walks the linearized chain of `contract` starting at `skip` entries in.
    Outcome in_chain(const std::string& contract, const std::string& name, std::size_t arity, std::size_t skip,
                     FunctionIndex& out)
    {
        const auto& lin = chain(contract);
        if (lin) {
            for (std::size_t k = skip; k < lin->size(); ++k) {
                const auto found = in_contract((*lin)[k], name, arity);
                if (found.size() == 1) {
                    out = found.front();
                    return Outcome::Resolved;
                }
                if (found.size() > 1) {
                    return Outcome::Ambiguous;
                }
            }
            return Outcome::Missing;
        }
        // Inconsistent hierarchy: own contract first, then any unique ancestor definition.
        if (skip == 0) {
            const auto own = in_contract(contract, name, arity);
            if (own.size() == 1) {
                out = own.front();
                return Outcome::Resolved;
            }
            if (own.size() > 1) {
                return Outcome::Ambiguous;
            }
        }
        std::vector<FunctionIndex> found;
        std::set<std::string> seen{contract};
        std::deque<std::string> queue{contract};
        while (!queue.empty()) {
            const auto cur = queue.front();
            queue.pop_front();
            const auto it = inheritance.find(cur);
            if (it == inheritance.end()) {
                continue;
            }
            for (const auto& b : it->second) {
                if (seen.insert(b).second) {
                    const auto f = in_contract(b, name, arity);
                    found.insert(found.end(), f.begin(), f.end());
                    queue.push_back(b);
                }
            }
        }
        if (found.size() == 1) {
            out = found.front();
            return Outcome::Resolved;
        }
        return found.empty() ? Outcome::Missing : Outcome::Ambiguous;
    }

    Outcome global_unique(const std::string& name, std::size_t arity, FunctionIndex& out) const
    {
        const auto it = by_name.find(name);
        if (it == by_name.end()) {
            return Outcome::Missing;
        }
        std::vector<FunctionIndex> found;
        for (const auto i : it->second) {
            if (functions[i].arity() == arity) {
                found.push_back(i);
            }
        }
        if (found.size() == 1) {
            out = found.front();
            return Outcome::Resolved;
        }
        return found.empty() ? Outcome::Missing : Outcome::Ambiguous;
    }
};

} // namespace

InheritanceMap inheritance_of(const std::vector<SourceUnit>& units)
{
    InheritanceMap map;
    for (const auto& u : units) {
        for (const auto& c : u.contracts) {
            map.emplace(c.name, c.bases);
        }
    }
    return map;
}

std::optional<std::vector<std::string>> linearize(const std::string& contract, const InheritanceMap& inheritance)
{
    std::map<std::string, std::optional<std::vector<std::string>>> memo;
    std::set<std::string> active;
    auto lin = [&](auto& self, const std::string& c) -> std::optional<std::vector<std::string>> {
        if (const auto m = memo.find(c); m != memo.end()) {
            return m->second;
        }
        if (!active.insert(c).second) {
            return std::nullopt;
        }
        std::vector<std::string> bases;
        if (const auto it = inheritance.find(c); it != inheritance.end()) {
            bases = it->second;
        }
        // Solidity lists bases from "most base-like" to "most derived".
        std::reverse(bases.begin(), bases.end());
        std::vector<std::vector<std::string>> seqs;
        for (const auto& b : bases) {
            auto l = self(self, b);
            if (!l) {
                active.erase(c);
                memo[c] = std::nullopt;
                return std::nullopt;
            }
            seqs.push_back(std::move(*l));
        }
        seqs.push_back(bases);
        std::vector<std::string> result{c};
        for (;;) {
            seqs.erase(std::remove_if(seqs.begin(), seqs.end(), [](const auto& s) { return s.empty(); }), seqs.end());
            if (seqs.empty()) {
                break;
            }
            std::optional<std::string> pick;
            for (const auto& s : seqs) {
                const auto& head = s.front();
                const bool in_tail = std::any_of(seqs.begin(), seqs.end(), [&](const auto& other) {
                    return std::find(other.begin() + 1, other.end(), head) != other.end();
                });
                if (!in_tail) {
                    pick = head;
                    break;
                }
            }
            if (!pick) {
                active.erase(c);
                memo[c] = std::nullopt;
                return std::nullopt;
            }
            result.push_back(*pick);
            for (auto& s : seqs) {
                if (!s.empty() && s.front() == *pick) {
                    s.erase(s.begin());
                }
            }
        }
        active.erase(c);
        memo[c] = result;
        return result;
    };
    return lin(lin, contract);
}

std::vector<FunctionIndex> CallGraph::callees_of(FunctionIndex f) const
{
    std::vector<std::pair<std::size_t, FunctionIndex>> found;
    for (const auto& e : edges) {
        if (e.caller == f && e.callee != f) {
            found.emplace_back(e.seq, e.callee);
        }
    }
    std::stable_sort(found.begin(), found.end(),
                     [](const auto& a, const auto& b) { return a.first < b.first; });
    std::vector<FunctionIndex> out;
    for (const auto& [seq, callee] : found) {
        if (std::find(out.begin(), out.end(), callee) == out.end()) {
            out.push_back(callee);
        }
    }
    return out;
}

std::vector<FunctionIndex> CallGraph::callers_of(FunctionIndex f) const
{
    std::set<FunctionIndex> found;
    for (const auto& e : edges) {
        if (e.callee == f && e.caller != f) {
            found.insert(e.caller);
        }
    }
    return {found.begin(), found.end()};
}

CallGraph build_call_graph(const std::vector<FunctionRecord>& functions, const InheritanceMap& inheritance)
{
    CallGraph g;
    g.nodes.reserve(functions.size());
    for (const auto& f : functions) {
        g.nodes.push_back(f.id());
    }
    Resolver r(functions, inheritance);
    std::set<std::tuple<FunctionIndex, FunctionIndex, std::size_t>> seen_edges;
    std::set<std::tuple<FunctionIndex, std::string, std::size_t>> seen_unresolved;

    for (FunctionIndex caller = 0; caller < functions.size(); ++caller) {
        const auto& fn = functions[caller];
        auto on_call = [&](const Expression& call, std::size_t seq) {
            if (!call.callee) {
                return;
            }
            const Expression& callee = *call.callee;
            const std::size_t arity = call.args.size();
            FunctionIndex target = 0;
            auto outcome = Resolver::Outcome::Missing;
            std::string name;

            if (callee.kind == ExprKind::Identifier) {
                name = callee.name;
                if (kBuiltins.contains(name) || is_elementary_type(name) || inheritance.contains(name)) {
                    return;
                }
                outcome = r.in_chain(fn.contract, name, arity, 0, target);
                if (outcome == Resolver::Outcome::Missing) {
                    outcome = r.global_unique(name, arity, target);
                }
            } else if (callee.kind == ExprKind::MemberAccess && callee.callee) {
                name = callee.name;
                const Expression& base = *callee.callee;
                if (base.kind == ExprKind::Identifier && base.name == "super") {
                    outcome = r.in_chain(fn.contract, name, arity, 1, target);
                } else if (base.kind == ExprKind::Identifier && base.name == "this") {
                    outcome = r.in_chain(fn.contract, name, arity, 0, target);
                } else if (base.kind == ExprKind::Identifier && inheritance.contains(base.name)) {
                    outcome = r.in_chain(base.name, name, arity, 0, target);
                } else if (base.kind == ExprKind::Identifier && (base.name == "abi" || base.name == "msg" ||
                                                                 base.name == "block" || base.name == "tx")) {
                    return;
                }
            } else {
                return;
            }
            if (outcome == Resolver::Outcome::Resolved) {
                if (seen_edges.emplace(caller, target, seq).second) {
                    g.edges.push_back({caller, target, seq});
                }
            } else if (!name.empty() && seen_unresolved.emplace(caller, name, arity).second) {
                g.unresolved.push_back({caller, name, arity});
            }
        };
        for_each_statement(fn.body, [&](const Statement& s) {
            for_each_own_expression(s, [&](const Expression& e) {
                if (e.kind == ExprKind::Call) {
                    on_call(e, s.seq);
                }
            });
        });
    }
    return g;
}

const std::set<std::string>& default_acl_modifiers()
{
    static const std::set<std::string> acl{"onlyOwner", "onlyAdmin", "onlyGovernance", "onlyRole"};
    return acl;
}

ReachabilitySet compute_reachability(const CallGraph& graph,
                                     const std::vector<FunctionRecord>& functions,
                                     const std::set<std::string>& acl_modifiers)
{
    ReachabilitySet rs;
    for (FunctionIndex i = 0; i < functions.size(); ++i) {
        const auto& f = functions[i];
        for (const auto& m : f.modifiers) {
            if (acl_modifiers.contains(m)) {
                rs.blocked.emplace(i, m);
                break;
            }
        }
        const bool entry = f.visibility == Visibility::Public || f.visibility == Visibility::External;
        if (entry && f.kind != FunctionKind::Constructor && !rs.blocked.contains(i)) {
            rs.roots.insert(i);
        }
    }
    std::vector<std::vector<FunctionIndex>> adj(functions.size());
    for (const auto& e : graph.edges) {
        adj[e.caller].push_back(e.callee);
    }
    std::deque<FunctionIndex> queue(rs.roots.begin(), rs.roots.end());
    rs.reachable = rs.roots;
    while (!queue.empty()) {
        const auto cur = queue.front();
        queue.pop_front();
        for (const auto next : adj[cur]) {
            if (rs.blocked.contains(next) || functions[next].kind == FunctionKind::Constructor) {
                continue;
            }
            if (rs.reachable.insert(next).second) {
                queue.push_back(next);
            }
        }
    }
    return rs;
}

std::vector<FunctionIndex> CodeContext::members() const
{
    std::vector<FunctionIndex> out{focus};
    out.insert(out.end(), callees.begin(), callees.end());
    out.insert(out.end(), callers.begin(), callers.end());
    return out;
}

CodeContext assemble_context(FunctionIndex focus,
                             const std::vector<FunctionRecord>& functions,
                             const CallGraph& graph,
                             const ContextPolicy& policy,
                             std::size_t token_budget)
{
    CodeContext ctx;
    ctx.focus = focus;
    ctx.text = functions[focus].text;
    ctx.token_estimate = estimate_tokens(ctx.text);
    if (ctx.token_estimate > token_budget) {
        throw ContextOverflow(functions[focus].id() + " needs " + std::to_string(ctx.token_estimate) +
                              " tokens, budget is " + std::to_string(token_budget));
    }
    std::vector<std::pair<FunctionIndex, bool>> neighbors; // (index, is_callee)
    if (policy.include_callees) {
        for (const auto c : graph.callees_of(focus)) {
            neighbors.emplace_back(c, true);
        }
    }
    if (policy.include_callers) {
        for (const auto c : graph.callers_of(focus)) {
            const bool dup = std::any_of(neighbors.begin(), neighbors.end(),
                                         [&](const auto& n) { return n.first == c; });
            if (!dup) {
                neighbors.emplace_back(c, false);
            }
        }
    }
    for (const auto& [idx, is_callee] : neighbors) {
        std::string candidate = ctx.text + "\n\n" + functions[idx].text;
        const auto estimate = estimate_tokens(candidate);
        if (estimate > token_budget) {
            break;
        }
        ctx.text = std::move(candidate);
        ctx.token_estimate = estimate;
        (is_callee ? ctx.callees : ctx.callers).push_back(idx);
    }
    return ctx;
}

std::string to_dot(const CallGraph& graph, const ReachabilitySet* reach)
{
    auto quote = [](const std::string& s) {
        std::string out = "\"";
        for (const char c : s) {
            if (c == '"' || c == '\\') {
                out += '\\';
            }
            out += c;
        }
        return out + "\"";
    };
    std::ostringstream os;
    os << "digraph callgraph {\n  node [shape=box];\n";
    for (FunctionIndex i = 0; i < graph.nodes.size(); ++i) {
        os << "  n" << i << " [label=" << quote(graph.nodes[i]);
        if (reach) {
            if (reach->blocked.contains(i)) {
                os << ", style=filled, fillcolor=lightgray";
            } else if (!reach->is_reachable(i)) {
                os << ", style=dashed";
            }
        }
        os << "];\n";
    }
    for (const auto& e : graph.edges) {
        os << "  n" << e.caller << " -> n" << e.callee << " [label=\"" << e.seq << "\"];\n";
    }
    os << "}\n";
    return os.str();
}

} // namespace logiscan
