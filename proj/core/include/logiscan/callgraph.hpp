#pragma once

#include "logiscan/ast.hpp"

#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace logiscan {

/// Index into the project's function table.
using FunctionIndex = std::size_t;

/// Contract name -> declared bases (declaration order).
using InheritanceMap = std::map<std::string, std::vector<std::string>>;

InheritanceMap inheritance_of(const std::vector<SourceUnit>& units);

/// Solidity C3 linearization, most derived first. Contracts missing from the
/// map are treated as having no bases. nullopt on an inconsistent hierarchy.
std::optional<std::vector<std::string>> linearize(const std::string& contract, const InheritanceMap& inheritance);

struct CallEdge {
    FunctionIndex caller = 0;
    FunctionIndex callee = 0;
    std::size_t seq = 0;
    bool operator==(const CallEdge&) const = default;
};

struct UnresolvedCall {
    FunctionIndex caller = 0;
    std::string name;
    std::size_t arity = 0;
    bool operator==(const UnresolvedCall&) const = default;
};

struct CallGraph {
    std::vector<std::string> nodes;
    std::vector<CallEdge> edges;
    std::vector<UnresolvedCall> unresolved;

    /// Direct callees of `f` ordered by first call site.
    std::vector<FunctionIndex> callees_of(FunctionIndex f) const;
    /// Direct callers of `f` in function-table order.
    std::vector<FunctionIndex> callers_of(FunctionIndex f) const;
};

/// Resolves every call expression by (name, arity): own contract, then the
/// linearized inheritance chain, then project-wide unique definitions.
/// Ambiguous and external calls go to `unresolved`.
CallGraph build_call_graph(const std::vector<FunctionRecord>& functions, const InheritanceMap& inheritance);

/// Modifier names treated as access control by default.
const std::set<std::string>& default_acl_modifiers();

struct ReachabilitySet {
    std::set<FunctionIndex> reachable;
    std::set<FunctionIndex> roots;
    std::map<FunctionIndex, std::string> blocked;

    bool is_reachable(FunctionIndex f) const { return reachable.contains(f); }
};

ReachabilitySet compute_reachability(const CallGraph& graph,
                                     const std::vector<FunctionRecord>& functions,
                                     const std::set<std::string>& acl_modifiers = default_acl_modifiers());

struct ContextPolicy {
    bool include_callers = true;
    bool include_callees = true;
    bool operator==(const ContextPolicy&) const = default;
};

struct CodeContext {
    FunctionIndex focus = 0;
    std::vector<FunctionIndex> callers;
    std::vector<FunctionIndex> callees;
    std::string text;
    std::size_t token_estimate = 0;

    /// focus, then included callees, then included callers.
    std::vector<FunctionIndex> members() const;
};

/// Focus text plus direct neighbors appended in call-graph order (callees by
/// call site, then callers) while the estimate stays within `token_budget`.
/// Throws ContextOverflow when the focus alone exceeds the budget.
CodeContext assemble_context(FunctionIndex focus,
                             const std::vector<FunctionRecord>& functions,
                             const CallGraph& graph,
                             const ContextPolicy& policy,
                             std::size_t token_budget);

/// Graphviz rendering; reachable nodes are drawn solid, others dashed.
std::string to_dot(const CallGraph& graph, const ReachabilitySet* reach = nullptr);

} // namespace logiscan
