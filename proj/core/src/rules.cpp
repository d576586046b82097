#include "logiscan/rules.hpp"

#include "logiscan/errors.hpp"

#include <yaml-cpp/yaml.h>

#include <algorithm>
#include <array>
#include <cstdlib>
#include <fstream>
#include <regex>
#include <set>
#include <sstream>

#ifndef LOGISCAN_DATA_DIR
#define LOGISCAN_DATA_DIR "data"
#endif
#ifndef LOGISCAN_INSTALL_DATA_DIR
#define LOGISCAN_INSTALL_DATA_DIR LOGISCAN_DATA_DIR
#endif

namespace logiscan {

namespace fs = std::filesystem;

namespace {

constexpr std::array<std::pair<FilterKind, std::string_view>, 9> kFilterNames{{
    {FilterKind::FNK, "FNK"},
    {FilterKind::FCE, "FCE"},
    {FilterKind::FCNE, "FCNE"},
    {FilterKind::FCCE, "FCCE"},
    {FilterKind::FCNCE, "FCNCE"},
    {FilterKind::FPT, "FPT"},
    {FilterKind::FPNC, "FPNC"},
    {FilterKind::FNM, "FNM"},
    {FilterKind::CFN, "CFN"},
}};

constexpr std::array<std::pair<CheckKind, std::string_view>, 4> kCheckNames{{
    {CheckKind::DF, "DF"},
    {CheckKind::VC, "VC"},
    {CheckKind::OC, "OC"},
    {CheckKind::FA, "FA"},
}};

constexpr std::array<std::pair<Expectation, std::string_view>, 5> kExpectationNames{{
    {Expectation::Present, "present"},
    {Expectation::Absent, "absent"},
    {Expectation::Before, "before"},
    {Expectation::After, "after"},
    {Expectation::UserControlled, "user-controlled"},
}};

template <typename E, std::size_t N>
std::string_view name_of(const std::array<std::pair<E, std::string_view>, N>& table, E value) noexcept
{
    for (const auto& [k, n] : table) {
        if (k == value) {
            return n;
        }
    }
    return "?";
}

template <typename E, std::size_t N>
std::optional<E> value_of(const std::array<std::pair<E, std::string_view>, N>& table, std::string_view s)
{
    for (const auto& [k, n] : table) {
        if (n == s) {
            return k;
        }
    }
    return std::nullopt;
}

class RuleReader {
public:
    explicit RuleReader(std::string source) : source_(std::move(source)) {}

    [[noreturn]] void fail(const std::string& field, const std::string& reason) const
    {
        throw RuleParseError(source_, field, reason);
    }

    std::string scalar(const YAML::Node& node, const std::string& field) const
    {
        if (!node || !node.IsScalar()) {
            fail(field, node ? "expected a string" : "missing");
        }
        return node.as<std::string>();
    }

    std::string nonempty(const YAML::Node& node, const std::string& field) const
    {
        auto s = scalar(node, field);
        if (s.find_first_not_of(" \t\r\n") == std::string::npos) {
            fail(field, "must not be empty");
        }
        return s;
    }

    std::vector<std::string> strings(const YAML::Node& node, const std::string& field) const
    {
        if (!node || !node.IsSequence()) {
            fail(field, node ? "expected a list" : "missing");
        }
        std::vector<std::string> out;
        for (std::size_t i = 0; i < node.size(); ++i) {
            out.push_back(nonempty(node[i], field + "[" + std::to_string(i) + "]"));
        }
        return out;
    }

    bool flag(const YAML::Node& node, const std::string& field, bool fallback) const
    {
        if (!node) {
            return fallback;
        }
        try {
            return node.as<bool>();
        } catch (const YAML::Exception&) {
            fail(field, "expected true or false");
        }
    }

    FilterDirective filter(const YAML::Node& node, const std::string& field) const
    {
        if (!node.IsMap()) {
            fail(field, "expected a mapping");
        }
        const auto kind_name = scalar(node["kind"], field + ".kind");
        const auto kind = filter_kind_from(kind_name);
        if (!kind) {
            fail(field + ".kind", "unknown filter kind '" + kind_name + "'");
        }
        FilterDirective d;
        d.kind = *kind;
        std::set<std::string> allowed{"kind"};
        auto list_payload = [&](const char* key) {
            allowed.insert(key);
            d.terms = strings(node[key], field + "." + key);
            if (d.terms.empty()) {
                fail(field + "." + key, "needs at least one entry");
            }
        };
        switch (d.kind) {
        case FilterKind::FNK: list_payload("keywords"); break;
        case FilterKind::FCE:
        case FilterKind::FCNE: list_payload("expressions"); break;
        case FilterKind::FPT: list_payload("types"); break;
        case FilterKind::FCCE:
        case FilterKind::FCNCE: {
            allowed.insert("combinations");
            const auto combos = node["combinations"];
            const auto cfield = field + ".combinations";
            if (!combos || !combos.IsSequence() || combos.size() == 0) {
                fail(cfield, "needs a nonempty list of expression lists");
            }
            for (std::size_t i = 0; i < combos.size(); ++i) {
                auto combo = strings(combos[i], cfield + "[" + std::to_string(i) + "]");
                if (combo.empty()) {
                    fail(cfield + "[" + std::to_string(i) + "]", "empty combination");
                }
                d.combinations.push_back(std::move(combo));
            }
            break;
        }
        case FilterKind::FPNC:
        case FilterKind::FNM:
        case FilterKind::CFN: break;
        }
        for (const auto& kv : node) {
            const auto key = kv.first.as<std::string>();
            if (!allowed.contains(key)) {
                fail(field + "." + key, "not a valid payload for " + kind_name);
            }
        }
        return d;
    }

    CheckDirective check(const YAML::Node& node, const std::string& field) const
    {
        if (!node.IsMap()) {
            fail(field, "expected a mapping");
        }
        const auto kind_name = scalar(node["kind"], field + ".kind");
        const auto kind = check_kind_from(kind_name);
        if (!kind) {
            fail(field + ".kind", "unknown check kind '" + kind_name + "'");
        }
        CheckDirective c;
        c.kind = *kind;
        c.between = strings(node["between"], field + ".between");
        const auto exp_name = scalar(node["expectation"], field + ".expectation");
        const auto exp = expectation_from(exp_name);
        if (!exp) {
            fail(field + ".expectation", "unknown expectation '" + exp_name + "'");
        }
        c.expectation = *exp;

        const bool pair = c.kind != CheckKind::VC;
        if (pair && c.between.size() != 2) {
            fail(field + ".between", std::string(to_string(c.kind)) + " takes exactly two slots");
        }
        if (!pair && c.between.empty()) {
            fail(field + ".between", "VC takes at least one slot");
        }
        bool ok = false;
        switch (c.kind) {
        case CheckKind::DF:
        case CheckKind::VC: ok = c.expectation == Expectation::Present || c.expectation == Expectation::Absent; break;
        case CheckKind::OC: ok = c.expectation == Expectation::Before || c.expectation == Expectation::After; break;
        case CheckKind::FA: ok = c.expectation == Expectation::UserControlled; break;
        }
        if (!ok) {
            fail(field + ".expectation", "'" + exp_name + "' does not apply to " + kind_name);
        }
        return c;
    }

private:
    std::string source_;
};

} // namespace

std::string_view to_string(FilterKind k) noexcept { return name_of(kFilterNames, k); }
std::string_view to_string(CheckKind k) noexcept { return name_of(kCheckNames, k); }
std::string_view to_string(Expectation e) noexcept { return name_of(kExpectationNames, e); }
std::optional<FilterKind> filter_kind_from(std::string_view s) { return value_of(kFilterNames, s); }
std::optional<CheckKind> check_kind_from(std::string_view s) { return value_of(kCheckNames, s); }
std::optional<Expectation> expectation_from(std::string_view s) { return value_of(kExpectationNames, s); }

std::string FilterDirective::describe() const
{
    std::string out(to_string(kind));
    auto list = [](const std::vector<std::string>& v) {
        std::string s = "[";
        for (std::size_t i = 0; i < v.size(); ++i) {
            s += (i ? "," : "") + v[i];
        }
        return s + "]";
    };
    if (!terms.empty()) {
        out += " " + list(terms);
    }
    if (!combinations.empty()) {
        out += " [";
        for (std::size_t i = 0; i < combinations.size(); ++i) {
            out += (i ? "," : "") + list(combinations[i]);
        }
        out += "]";
    }
    return out;
}

bool VulnRule::has_slot(std::string_view slot) const
{
    return std::any_of(recognition.begin(), recognition.end(), [&](const auto& q) { return q.slot == slot; });
}

std::vector<std::string> VulnRule::slot_names() const
{
    std::vector<std::string> out;
    for (const auto& q : recognition) {
        out.push_back(q.slot);
    }
    return out;
}

VulnRule parse_rule(std::string_view yaml_text, const std::string& source)
{
    RuleReader r(source);
    YAML::Node root;
    try {
        root = YAML::Load(std::string(yaml_text));
    } catch (const YAML::Exception& e) {
        r.fail("<document>", e.what());
    }
    if (!root.IsMap()) {
        r.fail("<document>", "expected a mapping at top level");
    }
    static const std::set<std::string> known{"schema",      "id",     "title",   "scenarios", "property",
                                             "filters",     "checks", "context", "recognition", "origin"};
    for (const auto& kv : root) {
        const auto key = kv.first.as<std::string>();
        if (!known.contains(key)) {
            r.fail(key, "unknown field");
        }
    }
    if (r.scalar(root["schema"], "schema") != "1") {
        r.fail("schema", "unsupported schema version (expected 1)");
    }

    VulnRule rule;
    rule.source = source;
    rule.id = r.nonempty(root["id"], "id");
    static const std::regex slug(R"(^[a-z0-9]+(-[a-z0-9]+)*$)");
    if (!std::regex_match(rule.id, slug)) {
        r.fail("id", "must be a lowercase slug");
    }
    rule.title = r.nonempty(root["title"], "title");
    rule.scenarios = r.strings(root["scenarios"], "scenarios");
    if (rule.scenarios.empty()) {
        r.fail("scenarios", "needs at least one scenario");
    }
    rule.property = r.nonempty(root["property"], "property");
    if (root["origin"]) {
        rule.origin = r.scalar(root["origin"], "origin");
    }

    if (const auto filters = root["filters"]) {
        if (!filters.IsSequence()) {
            r.fail("filters", "expected a list");
        }
        for (std::size_t i = 0; i < filters.size(); ++i) {
            rule.filters.push_back(r.filter(filters[i], "filters[" + std::to_string(i) + "]"));
        }
    }

    if (const auto rec = root["recognition"]) {
        if (!rec.IsSequence()) {
            r.fail("recognition", "expected a list");
        }
        std::set<std::string> seen;
        static const std::regex slot_re(R"(^[A-Za-z][A-Za-z0-9_]*$)");
        for (std::size_t i = 0; i < rec.size(); ++i) {
            const auto field = "recognition[" + std::to_string(i) + "]";
            if (!rec[i].IsMap()) {
                r.fail(field, "expected a mapping");
            }
            RecognitionQuestion q{r.nonempty(rec[i]["slot"], field + ".slot"),
                                  r.nonempty(rec[i]["question"], field + ".question")};
            if (!std::regex_match(q.slot, slot_re)) {
                r.fail(field + ".slot", "slot names are identifiers");
            }
            if (!seen.insert(q.slot).second) {
                r.fail(field + ".slot", "duplicate slot '" + q.slot + "'");
            }
            rule.recognition.push_back(std::move(q));
        }
    }

    if (const auto checks = root["checks"]) {
        if (!checks.IsSequence()) {
            r.fail("checks", "expected a list");
        }
        for (std::size_t i = 0; i < checks.size(); ++i) {
            const auto field = "checks[" + std::to_string(i) + "]";
            auto c = r.check(checks[i], field);
            for (const auto& slot : c.between) {
                if (!rule.has_slot(slot)) {
                    r.fail(field + ".between", "slot '" + slot + "' is not defined in recognition");
                }
            }
            rule.checks.push_back(std::move(c));
        }
    }
    if (!rule.checks.empty() && rule.recognition.empty()) {
        r.fail("recognition", "rules with checks need at least one recognition question");
    }

    const bool suppress_callers = std::any_of(rule.filters.begin(), rule.filters.end(), [](const auto& f) {
        return f.kind == FilterKind::FPNC || f.kind == FilterKind::CFN;
    });
    rule.context.include_callers = !suppress_callers;
    rule.context.include_callees = true;
    if (const auto ctx = root["context"]) {
        if (!ctx.IsMap()) {
            r.fail("context", "expected a mapping");
        }
        const bool callers = r.flag(ctx["callers"], "context.callers", rule.context.include_callers);
        if (callers && suppress_callers) {
            r.fail("context.callers", "FPNC/CFN filters suppress callers");
        }
        rule.context.include_callers = callers;
        rule.context.include_callees = r.flag(ctx["callees"], "context.callees", true);
    }
    return rule;
}

std::vector<VulnRule> load_rules(const fs::path& rule_dir)
{
    std::error_code ec;
    if (!fs::is_directory(rule_dir, ec)) {
        throw IoError("rules directory not found: " + rule_dir.string());
    }
    std::vector<fs::path> files;
    for (const auto& entry : fs::directory_iterator(rule_dir)) {
        const auto ext = entry.path().extension();
        if (entry.is_regular_file() && (ext == ".yaml" || ext == ".yml")) {
            files.push_back(entry.path());
        }
    }
    std::sort(files.begin(), files.end());

    std::vector<VulnRule> rules;
    std::set<std::string> ids;
    for (const auto& f : files) {
        std::ifstream in(f);
        if (!in) {
            throw RuleParseError(f.string(), "<file>", "unreadable");
        }
        std::ostringstream buf;
        buf << in.rdbuf();
        auto rule = parse_rule(buf.str(), f.string());
        if (!ids.insert(rule.id).second) {
            throw RuleParseError(f.string(), "id", "duplicate rule id '" + rule.id + "'");
        }
        rules.push_back(std::move(rule));
    }
    std::sort(rules.begin(), rules.end(), [](const auto& a, const auto& b) { return a.id < b.id; });
    return rules;
}

const VulnRule& rule_for_id(const std::vector<VulnRule>& rules, std::string_view id)
{
    const auto it = std::find_if(rules.begin(), rules.end(), [&](const auto& r) { return r.id == id; });
    if (it == rules.end()) {
        throw NotFound("no rule with id '" + std::string(id) + "'");
    }
    return *it;
}

namespace {

fs::path data_dir()
{
    if (const char* env = std::getenv("LOGISCAN_DATA_DIR"); env && *env) {
        return env;
    }
    // Source tree while developing, the install prefix otherwise.
    if (fs::is_directory(fs::path(LOGISCAN_DATA_DIR) / "rules")) {
        return LOGISCAN_DATA_DIR;
    }
    return LOGISCAN_INSTALL_DATA_DIR;
}

} // namespace

fs::path default_rules_dir() { return data_dir() / "rules"; }
fs::path default_whitelist_path() { return data_dir() / "openzeppelin-whitelist.txt"; }

} // namespace logiscan
