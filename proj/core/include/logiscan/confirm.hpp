#pragma once

#include "logiscan/callgraph.hpp"
#include "logiscan/prompts.hpp"
#include "logiscan/rules.hpp"

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace logiscan {

struct Evidence {
    std::string file;
    Span span;
    std::string note;
    bool operator==(const Evidence&) const = default;
};

struct CheckVerdict {
    CheckKind kind = CheckKind::DF;
    std::vector<std::string> slots;
    std::vector<std::string> names;
    bool confirmed = false;
    std::string reason;
    std::vector<Evidence> evidence;
};

/// The variable a recognized descriptor refers to: identifiers stand for
/// themselves, member access and indexing reduce to the base (except
/// `msg.*`, `block.*` and `tx.*`, kept whole), calls to the callee name.
/// Text that does not parse is returned trimmed.
std::string principal_name(std::string_view descriptor);

/// Principal names read by `e`, in first-occurrence order.
std::vector<std::string> principals_in(const Expression& e);

struct DefUseNode {
    std::string scope;
    std::string name;
    std::string file;
    Span occurrence;
};

struct DefUseEdge {
    std::size_t from = 0;
    std::size_t to = 0;
    std::string file;
    Span span;
};

/// Directed def -> use dependencies. Locals and parameters are scoped by
/// function id, everything else by name alone.
class DefUseGraph {
public:
    std::size_t add_node(const std::string& scope, const std::string& name, const std::string& file = {}, Span occurrence = {});
    void add_edge(std::size_t from, std::size_t to, const std::string& file = {}, Span span = {});

    const std::vector<DefUseNode>& nodes() const noexcept { return nodes_; }
    const std::vector<DefUseEdge>& edges() const noexcept { return edges_; }
    std::optional<std::size_t> find(const std::string& scope, const std::string& name) const;
    std::vector<std::size_t> nodes_named(std::string_view name) const;

    /// Shortest edge path from any of `sources` to any of `targets` as edge
    /// indices. An empty vector means a source is also a target.
    std::optional<std::vector<std::size_t>> path(const std::vector<std::size_t>& sources,
                                                 const std::vector<std::size_t>& targets) const;

private:
    std::vector<DefUseNode> nodes_;
    std::vector<DefUseEdge> edges_;
    std::map<std::pair<std::string, std::string>, std::size_t> index_;
    std::vector<std::vector<std::size_t>> out_;
};

/// Scope key used for `name` inside `fn`.
std::string scope_of(const FunctionRecord& fn, const std::string& name);

DefUseGraph build_def_use(const CodeContext& context,
                          const std::vector<FunctionRecord>& functions,
                          const CallGraph& graph);

/// DF: a dependency exists iff either name reaches the other. Unknown names
/// reject under either expectation.
CheckVerdict check_dataflow(const std::string& a,
                            const std::string& b,
                            const DefUseGraph& graph,
                            Expectation expectation = Expectation::Present);

/// VC: a comparison exists iff some if/require/assert condition in the
/// context mentions all of `names` (a lone name must be a comparison operand
/// or a bare test). `present` confirms when one exists, `absent` when none
/// does and every name still occurs in the context.
CheckVerdict check_value_comparison(const std::vector<std::string>& names,
                                    const CodeContext& context,
                                    const std::vector<FunctionRecord>& functions,
                                    Expectation expectation = Expectation::Present);

enum class Ordering { Before, After, Same };

/// Position of a statement in the focus body with one level of inlining:
/// (call-site seq, 0) for own statements, (call-site seq, inner seq + 1) for
/// statements of a called internal function.
struct OrderedStatement {
    std::size_t outer = 0;
    std::size_t inner = 0;
    const Statement* statement = nullptr;
    const FunctionRecord* owner = nullptr;
};

std::vector<OrderedStatement> ordered_statements(const CodeContext& context,
                                                 const std::vector<FunctionRecord>& functions,
                                                 const CallGraph& graph);

/// Earliest statement matching a descriptor, or nullopt.
std::optional<OrderedStatement> resolve_statement(std::string_view descriptor,
                                                  const std::vector<OrderedStatement>& statements);

/// Relative order of two descriptors; nullopt when either is unknown.
std::optional<Ordering> statement_order(std::string_view first,
                                        std::string_view second,
                                        const std::vector<OrderedStatement>& statements);

/// OC: confirmed iff `first` comes before (or after) `second` as expected.
CheckVerdict check_order(const std::string& first,
                         const std::string& second,
                         Expectation expectation,
                         const CodeContext& context,
                         const std::vector<FunctionRecord>& functions,
                         const CallGraph& graph);

/// FA: confirmed iff the argument of the named call depends on a parameter of
/// a reachable public/external function and no condition tests it against
/// msg.sender. `argument` is matched against the call's argument texts.
CheckVerdict check_fn_arg(const std::string& call,
                          const std::string& argument,
                          const CodeContext& context,
                          const std::vector<FunctionRecord>& functions,
                          const DefUseGraph& graph,
                          const ReachabilitySet& reach);

struct ConfirmResult {
    bool confirmed = false;
    std::vector<CheckVerdict> verdicts;
};

/// Runs the rule's checks in order; all must hold. A rule without checks
/// confirms on recognition alone.
ConfirmResult confirm_candidate(const VulnRule& rule,
                                const RecognitionAnswer& recognized,
                                const CodeContext& context,
                                const std::vector<FunctionRecord>& functions,
                                const CallGraph& graph,
                                const ReachabilitySet& reach);

} // namespace logiscan
