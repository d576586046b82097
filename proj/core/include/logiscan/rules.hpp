#pragma once

#include "logiscan/callgraph.hpp"

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace logiscan {

enum class FilterKind { FNK, FCE, FCNE, FCCE, FCNCE, FPT, FPNC, FNM, CFN };
enum class CheckKind { DF, VC, OC, FA };
enum class Expectation { Present, Absent, Before, After, UserControlled };

std::string_view to_string(FilterKind k) noexcept;
std::string_view to_string(CheckKind k) noexcept;
std::string_view to_string(Expectation e) noexcept;
std::optional<FilterKind> filter_kind_from(std::string_view s);
std::optional<CheckKind> check_kind_from(std::string_view s);
std::optional<Expectation> expectation_from(std::string_view s);

/// Payload depends on kind: FNK keywords, FCE/FCNE expressions and FPT types
/// live in `terms`; FCCE/FCNCE use `combinations`; FPNC/FNM/CFN have none.
struct FilterDirective {
    FilterKind kind = FilterKind::FNK;
    std::vector<std::string> terms;
    std::vector<std::vector<std::string>> combinations;

    /// Compact rendering such as `FCCE [[total,supply]]`.
    std::string describe() const;
    bool operator==(const FilterDirective&) const = default;
};

/// DF/OC/FA take two slots, VC one or more. For FA the first slot names the
/// call and the second the argument.
struct CheckDirective {
    CheckKind kind = CheckKind::DF;
    std::vector<std::string> between;
    Expectation expectation = Expectation::Present;
    bool operator==(const CheckDirective&) const = default;
};

struct RecognitionQuestion {
    std::string slot;
    std::string question;
    bool operator==(const RecognitionQuestion&) const = default;
};

struct VulnRule {
    std::string id;
    std::string title;
    std::vector<std::string> scenarios;
    std::string property;
    std::vector<FilterDirective> filters;
    std::vector<RecognitionQuestion> recognition;
    std::vector<CheckDirective> checks;
    ContextPolicy context;
    std::string origin;
    std::string source;

    bool has_slot(std::string_view slot) const;
    std::vector<std::string> slot_names() const;
};

/// Parses one rule document. `source` names the file in errors.
VulnRule parse_rule(std::string_view yaml_text, const std::string& source);

/// Loads every `*.yaml`/`*.yml` file in `rule_dir`, sorted by id. The first
/// invalid file aborts the load with RuleParseError.
std::vector<VulnRule> load_rules(const std::filesystem::path& rule_dir);

const VulnRule& rule_for_id(const std::vector<VulnRule>& rules, std::string_view id);

/// Rules directory shipped with the project (compile-time default).
std::filesystem::path default_rules_dir();
std::filesystem::path default_whitelist_path();

} // namespace logiscan
