#pragma once

#include "logiscan/ast.hpp"
#include "logiscan/rules.hpp"

#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace logiscan {

struct FilterOutcome {
    std::string function_id;
    std::string rule_id;
    bool passed = false;
    /// First failing directive, set iff !passed.
    std::optional<FilterDirective> failed_directive;
};

/// Case-insensitive substring test.
bool contains_text(std::string_view haystack, std::string_view needle);

/// True if at least one combination has all of its members in `text`.
bool any_combination_present(std::string_view text, const std::vector<std::vector<std::string>>& combinations);

/// Evaluates one directive against a function.
bool directive_passes(const FilterDirective& d,
                      const FunctionRecord& fn,
                      const std::set<std::string>& acl_modifiers = default_acl_modifiers());

/// Evaluates the rule's directives in order with AND semantics.
FilterOutcome apply_filters(const FunctionRecord& fn,
                            const VulnRule& rule,
                            const std::set<std::string>& acl_modifiers = default_acl_modifiers());

struct Candidate {
    std::size_t index = 0;
    ContextPolicy policy;
};

/// Indices of the functions passing every filter of `rule`, in input order,
/// with the context policy implied by the rule.
std::vector<Candidate> candidates_for_rule(const std::vector<FunctionRecord>& functions,
                                           const VulnRule& rule,
                                           const std::set<std::string>& acl_modifiers = default_acl_modifiers());

} // namespace logiscan
