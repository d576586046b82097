#include "logiscan/filter.hpp"

#include <algorithm>
#include <cctype>

namespace logiscan {

namespace {

char fold(char c)
{
    return static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
}

std::string normalize_type(std::string_view t)
{
    std::string out;
    for (const char c : t) {
        if (!std::isspace(static_cast<unsigned char>(c))) {
            out += fold(c);
        }
    }
    if (out == "addresspayable") {
        return "address";
    }
    if (out == "uint") {
        return "uint256";
    }
    if (out == "int") {
        return "int256";
    }
    return out;
}

} // namespace

bool contains_text(std::string_view haystack, std::string_view needle)
{
    if (needle.empty()) {
        return true;
    }
    const auto it = std::search(haystack.begin(), haystack.end(), needle.begin(), needle.end(),
                                [](char a, char b) { return fold(a) == fold(b); });
    return it != haystack.end();
}

bool any_combination_present(std::string_view text, const std::vector<std::vector<std::string>>& combinations)
{
    return std::any_of(combinations.begin(), combinations.end(), [&](const auto& combo) {
        return std::all_of(combo.begin(), combo.end(), [&](const auto& e) { return contains_text(text, e); });
    });
}

bool directive_passes(const FilterDirective& d, const FunctionRecord& fn, const std::set<std::string>& acl_modifiers)
{
    const std::string_view body = fn.body_plain;
    auto any_term = [&](std::string_view text) {
        return std::any_of(d.terms.begin(), d.terms.end(), [&](const auto& t) { return contains_text(text, t); });
    };
    switch (d.kind) {
    case FilterKind::FNK: return any_term(fn.name);
    case FilterKind::FCE: return any_term(body);
    case FilterKind::FCNE: return !any_term(body);
    case FilterKind::FCCE: return any_combination_present(body, d.combinations);
    case FilterKind::FCNCE: return !any_combination_present(body, d.combinations);
    case FilterKind::FPT:
        return std::all_of(d.terms.begin(), d.terms.end(), [&](const auto& want) {
            const auto w = normalize_type(want);
            return std::any_of(fn.params.begin(), fn.params.end(),
                               [&](const Param& p) { return normalize_type(p.type) == w; });
        });
    case FilterKind::FPNC: return fn.visibility == Visibility::Public || fn.visibility == Visibility::External;
    case FilterKind::FNM:
        return std::none_of(fn.modifiers.begin(), fn.modifiers.end(),
                            [&](const auto& m) { return acl_modifiers.contains(m); });
    case FilterKind::CFN: return true;
    }
    return false;
}

FilterOutcome apply_filters(const FunctionRecord& fn, const VulnRule& rule, const std::set<std::string>& acl_modifiers)
{
    FilterOutcome out;
    out.function_id = fn.id();
    out.rule_id = rule.id;
    for (const auto& d : rule.filters) {
        if (!directive_passes(d, fn, acl_modifiers)) {
            out.failed_directive = d;
            return out;
        }
    }
    out.passed = true;
    return out;
}

std::vector<Candidate> candidates_for_rule(const std::vector<FunctionRecord>& functions,
                                           const VulnRule& rule,
                                           const std::set<std::string>& acl_modifiers)
{
    std::vector<Candidate> out;
    for (std::size_t i = 0; i < functions.size(); ++i) {
        if (apply_filters(functions[i], rule, acl_modifiers).passed) {
            out.push_back({i, rule.context});
        }
    }
    return out;
}

} // namespace logiscan
