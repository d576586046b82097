#include "logiscan/report.hpp"

#include "logiscan/errors.hpp"

#include <nlohmann/json.hpp>
#include <yaml-cpp/yaml.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace logiscan {

using nlohmann::json;
using nlohmann::ordered_json;

std::string_view to_string(Verdict v) noexcept
{
    switch (v) {
    case Verdict::Confirmed: return "confirmed";
    case Verdict::Rejected: return "rejected";
    case Verdict::Skipped: return "skipped";
    }
    return "?";
}

std::optional<Verdict> verdict_from(std::string_view s)
{
    for (const auto v : {Verdict::Confirmed, Verdict::Rejected, Verdict::Skipped}) {
        if (to_string(v) == s) {
            return v;
        }
    }
    return std::nullopt;
}

CostLedger summarize_cost(const std::vector<LlmExchange>& exchanges,
                          std::size_t code_lines,
                          double price_in_per_1k,
                          double price_out_per_1k)
{
    // Summation order is fixed so concurrent scans produce identical totals.
    std::vector<const LlmExchange*> sorted;
    sorted.reserve(exchanges.size());
    for (const auto& e : exchanges) {
        sorted.push_back(&e);
    }
    std::sort(sorted.begin(), sorted.end(), [](const auto* a, const auto* b) { return a->key < b->key; });

    CostLedger l;
    double cost_milli = 0.0;
    for (const auto* e : sorted) {
        l.seconds += e->latency_ms / 1000.0;
        l.tokens_in += e->tokens_in;
        l.tokens_out += e->tokens_out;
        cost_milli += static_cast<double>(e->tokens_in) * price_in_per_1k +
                      static_cast<double>(e->tokens_out) * price_out_per_1k;
    }
    l.exchanges = exchanges.size();
    l.usd = cost_milli / 1000.0;
    l.code_lines = code_lines;
    l.kloc = static_cast<double>(code_lines) / 1000.0;
    if (l.kloc > 0.0) {
        l.seconds_per_kloc = l.seconds / l.kloc;
        l.usd_per_kloc = l.usd / l.kloc;
    }
    return l;
}

std::size_t ScanReport::confirmed_count() const
{
    return static_cast<std::size_t>(std::count_if(findings.begin(), findings.end(),
                                                  [](const auto& f) { return f.verdict == Verdict::Confirmed; }));
}

namespace {

ordered_json span_json(const Span& s)
{
    return ordered_json{{"first_line", s.first_line}, {"last_line", s.last_line}, {"begin", s.begin}, {"end", s.end}};
}

Span span_from(const json& j)
{
    return Span{j.at("begin").get<std::size_t>(), j.at("end").get<std::size_t>(),
                j.at("first_line").get<std::size_t>(), j.at("last_line").get<std::size_t>()};
}

template <typename J>
J optional_number(const std::optional<double>& v)
{
    return v ? J(*v) : J(nullptr);
}

std::optional<double> optional_from(const json& j)
{
    if (j.is_null()) {
        return std::nullopt;
    }
    return j.get<double>();
}

std::string line_range(const Span& s)
{
    if (s.first_line == s.last_line) {
        return "L" + std::to_string(s.first_line);
    }
    return "L" + std::to_string(s.first_line) + "-L" + std::to_string(s.last_line);
}

} // namespace

std::string report_to_json(const ScanReport& r)
{
    ordered_json j;
    j["schema"] = ScanReport::kSchema;
    j["tool"] = "logiscan";
    j["project"] = r.project;
    j["mode"] = r.mode;
    j["config_fingerprint"] = r.config_fingerprint;
    j["rules"] = r.rules;
    j["stats"] = ordered_json{{"files_scanned", r.files_scanned},
                              {"functions", r.functions},
                              {"whitelisted", r.whitelisted},
                              {"reachable", r.reachable}};
    auto& excluded = j["excluded"] = ordered_json::array();
    for (const auto& e : r.excluded) {
        excluded.push_back({{"path", e.path}, {"reason", e.reason}});
    }
    auto& errors = j["parse_errors"] = ordered_json::array();
    for (const auto& e : r.parse_errors) {
        errors.push_back({{"file", e.file}, {"line", e.line}, {"column", e.column}, {"message", e.message}});
    }
    j["warnings"] = r.warnings;
    auto& funnel = j["funnel"] = ordered_json::object();
    for (const auto& [rule, f] : r.funnel) {
        funnel[rule] = {{"filtered", f.filtered},
                        {"scenario", f.scenario},
                        {"property", f.property},
                        {"recognized", f.recognized},
                        {"confirmed", f.confirmed}};
    }
    auto& findings = j["findings"] = ordered_json::array();
    for (const auto& f : r.findings) {
        ordered_json fj;
        fj["rule_id"] = f.rule_id;
        fj["project"] = f.project;
        fj["file"] = f.file;
        fj["function_id"] = f.function_id;
        fj["locator"] = f.locator;
        fj["span"] = span_json(f.span);
        fj["verdict"] = to_string(f.verdict);
        fj["stage"] = f.stage;
        fj["reason"] = f.reason;
        auto& rec = fj["recognized"] = ordered_json::object();
        for (const auto& [slot, item] : f.recognized) {
            rec[slot] = {{"name", item.name}, {"description", item.description}};
        }
        auto& checks = fj["checks"] = ordered_json::array();
        for (const auto& c : f.checks) {
            ordered_json cj;
            cj["kind"] = to_string(c.kind);
            cj["slots"] = c.slots;
            cj["names"] = c.names;
            cj["confirmed"] = c.confirmed;
            cj["reason"] = c.reason;
            auto& ev = cj["evidence"] = ordered_json::array();
            for (const auto& e : c.evidence) {
                ordered_json ej{{"file", e.file}};
                ej["span"] = span_json(e.span);
                ej["note"] = e.note;
                ev.push_back(std::move(ej));
            }
            checks.push_back(std::move(cj));
        }
        fj["transcript_keys"] = f.transcript_keys;
        findings.push_back(std::move(fj));
    }
    const auto& l = r.ledger;
    j["ledger"] = ordered_json{{"seconds", l.seconds},
                               {"exchanges", l.exchanges},
                               {"tokens_in", l.tokens_in},
                               {"tokens_out", l.tokens_out},
                               {"usd", l.usd},
                               {"code_lines", l.code_lines},
                               {"kloc", l.kloc},
                               {"seconds_per_kloc", optional_number<ordered_json>(l.seconds_per_kloc)},
                               {"usd_per_kloc", optional_number<ordered_json>(l.usd_per_kloc)},
                               {"loc_rule", "non-blank, non-comment lines of included files"}};
    return j.dump(2) + "\n";
}

ScanReport report_from_json(std::string_view text)
{
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw TruthMismatch(std::string("report is not valid JSON: ") + e.what());
    }
    try {
        if (j.at("schema").get<int>() != ScanReport::kSchema) {
            throw TruthMismatch("unsupported report schema");
        }
        ScanReport r;
        r.project = j.at("project").get<std::string>();
        r.mode = j.value("mode", "");
        r.config_fingerprint = j.value("config_fingerprint", "");
        r.rules = j.value("rules", std::vector<std::string>{});
        if (const auto s = j.find("stats"); s != j.end()) {
            r.files_scanned = s->value("files_scanned", std::size_t{0});
            r.functions = s->value("functions", std::size_t{0});
            r.whitelisted = s->value("whitelisted", std::size_t{0});
            r.reachable = s->value("reachable", std::size_t{0});
        }
        for (const auto& e : j.value("excluded", json::array())) {
            r.excluded.push_back({e.at("path").get<std::string>(), e.at("reason").get<std::string>()});
        }
        for (const auto& e : j.value("parse_errors", json::array())) {
            r.parse_errors.push_back({e.at("file").get<std::string>(), e.at("line").get<std::size_t>(),
                                      e.at("column").get<std::size_t>(), e.at("message").get<std::string>()});
        }
        r.warnings = j.value("warnings", std::vector<std::string>{});
        const auto funnel = j.value("funnel", json::object());
        for (const auto& [rule, f] : funnel.items()) {
            r.funnel[rule] = {f.at("filtered").get<std::size_t>(), f.at("scenario").get<std::size_t>(),
                              f.at("property").get<std::size_t>(), f.at("recognized").get<std::size_t>(),
                              f.at("confirmed").get<std::size_t>()};
        }
        for (const auto& fj : j.at("findings")) {
            Finding f;
            f.rule_id = fj.at("rule_id").get<std::string>();
            f.project = fj.at("project").get<std::string>();
            f.file = fj.value("file", "");
            f.function_id = fj.value("function_id", "");
            f.locator = fj.at("locator").get<std::string>();
            if (fj.contains("span")) {
                f.span = span_from(fj.at("span"));
            }
            const auto verdict = verdict_from(fj.at("verdict").get<std::string>());
            if (!verdict) {
                throw TruthMismatch("unknown verdict in report");
            }
            f.verdict = *verdict;
            f.stage = fj.value("stage", "");
            f.reason = fj.value("reason", "");
            const auto recognized = fj.value("recognized", json::object());
            for (const auto& [slot, item] : recognized.items()) {
                f.recognized[slot] = {item.at("name").get<std::string>(), item.at("description").get<std::string>()};
            }
            for (const auto& cj : fj.value("checks", json::array())) {
                CheckVerdict c;
                const auto kind = check_kind_from(cj.at("kind").get<std::string>());
                if (!kind) {
                    throw TruthMismatch("unknown check kind in report");
                }
                c.kind = *kind;
                c.slots = cj.value("slots", std::vector<std::string>{});
                c.names = cj.value("names", std::vector<std::string>{});
                c.confirmed = cj.at("confirmed").get<bool>();
                c.reason = cj.value("reason", "");
                for (const auto& ej : cj.value("evidence", json::array())) {
                    c.evidence.push_back({ej.at("file").get<std::string>(), span_from(ej.at("span")),
                                          ej.value("note", "")});
                }
                f.checks.push_back(std::move(c));
            }
            f.transcript_keys = fj.value("transcript_keys", std::vector<std::string>{});
            r.findings.push_back(std::move(f));
        }
        if (const auto l = j.find("ledger"); l != j.end()) {
            r.ledger.seconds = l->value("seconds", 0.0);
            r.ledger.exchanges = l->value("exchanges", std::size_t{0});
            r.ledger.tokens_in = l->value("tokens_in", std::size_t{0});
            r.ledger.tokens_out = l->value("tokens_out", std::size_t{0});
            r.ledger.usd = l->value("usd", 0.0);
            r.ledger.code_lines = l->value("code_lines", std::size_t{0});
            r.ledger.kloc = l->value("kloc", 0.0);
            r.ledger.seconds_per_kloc = optional_from(l->value("seconds_per_kloc", json(nullptr)));
            r.ledger.usd_per_kloc = optional_from(l->value("usd_per_kloc", json(nullptr)));
        }
        return r;
    } catch (const json::exception& e) {
        throw TruthMismatch(std::string("report does not match schema: ") + e.what());
    }
}

std::string report_to_markdown(const ScanReport& r, const std::optional<std::filesystem::path>& root)
{
    std::ostringstream os;
    os << "# logiscan report: " << r.project << "\n\n";
    os << "- mode: " << r.mode << "\n";
    os << "- config fingerprint: `" << r.config_fingerprint << "`\n";
    os << "- files scanned: " << r.files_scanned << ", functions: " << r.functions
       << ", whitelisted: " << r.whitelisted << ", reachable: " << r.reachable << "\n";
    os << "- confirmed findings: " << r.confirmed_count() << " of " << r.findings.size() << " candidates\n\n";

    const auto& l = r.ledger;
    char buf[256];
    std::snprintf(buf, sizeof buf, "%.3f s, %zu exchanges, %zu tokens in, %zu tokens out, USD %.6f", l.seconds,
                  l.exchanges, l.tokens_in, l.tokens_out, l.usd);
    os << "## Cost\n\n" << buf << "\n\n";
    os << "Code lines: " << l.code_lines << " (non-blank, non-comment)";
    if (l.seconds_per_kloc && l.usd_per_kloc) {
        std::snprintf(buf, sizeof buf, "; %.3f s/KLoC, USD %.6f/KLoC", *l.seconds_per_kloc, *l.usd_per_kloc);
        os << buf;
    }
    os << "\n\n";

    if (!r.warnings.empty() || !r.parse_errors.empty()) {
        os << "## Warnings\n\n";
        for (const auto& w : r.warnings) {
            os << "- " << w << "\n";
        }
        for (const auto& e : r.parse_errors) {
            os << "- parse error " << e.file << ":" << e.line << ":" << e.column << ": " << e.message << "\n";
        }
        os << "\n";
    }

    std::map<std::string, std::vector<const Finding*>> by_rule;
    for (const auto& f : r.findings) {
        by_rule[f.rule_id].push_back(&f);
    }
    auto excerpt = [&](const Evidence& e) -> std::string {
        if (!root || e.span.first_line == 0) {
            return {};
        }
        std::ifstream in(*root / e.file);
        if (!in) {
            return {};
        }
        std::string line, out;
        for (std::size_t n = 1; std::getline(in, line) && n <= e.span.last_line; ++n) {
            if (n >= e.span.first_line) {
                out += std::to_string(n) + ": " + line + "\n";
            }
        }
        return out;
    };
    for (const auto& [rule, list] : by_rule) {
        os << "## " << rule << "\n\n";
        if (const auto it = r.funnel.find(rule); it != r.funnel.end()) {
            const auto& f = it->second;
            os << "Funnel: filtered " << f.filtered << ", scenario " << f.scenario << ", property " << f.property
               << ", recognized " << f.recognized << ", confirmed " << f.confirmed << "\n\n";
        }
        for (const auto* f : list) {
            os << "### " << to_string(f->verdict) << ": " << f->function_id << "\n\n";
            os << "- location: " << f->file << " " << line_range(f->span) << "\n";
            os << "- stage: " << f->stage;
            if (!f->reason.empty()) {
                os << " (" << f->reason << ")";
            }
            os << "\n";
            for (const auto& [slot, item] : f->recognized) {
                os << "- " << slot << ": `" << item.name << "` (" << item.description << ")\n";
            }
            for (const auto& c : f->checks) {
                os << "- check " << to_string(c.kind) << " " << (c.confirmed ? "confirmed" : "rejected");
                if (!c.reason.empty()) {
                    os << ": " << c.reason;
                }
                os << "\n";
                for (const auto& e : c.evidence) {
                    os << "  - evidence " << e.file << " " << line_range(e.span);
                    if (!e.note.empty()) {
                        os << " (" << e.note << ")";
                    }
                    os << "\n";
                    if (f->verdict == Verdict::Confirmed) {
                        const auto text = excerpt(e);
                        if (!text.empty()) {
                            os << "\n```solidity\n" << text << "```\n\n";
                        }
                    }
                }
            }
            os << "\n";
        }
    }
    if (by_rule.empty()) {
        os << "No candidates reached the LLM stage.\n";
    }
    return os.str();
}

GroundTruth parse_ground_truth(std::string_view yaml_text, const std::string& source)
{
    YAML::Node root;
    try {
        root = YAML::Load(std::string(yaml_text));
    } catch (const YAML::Exception& e) {
        throw TruthMismatch(source + ": " + e.what());
    }
    auto fail = [&](const std::string& what) -> void { throw TruthMismatch(source + ": " + what); };
    GroundTruth truth;
    if (root.IsNull()) {
        return truth;
    }
    if (!root.IsMap() || (root["projects"] && !root["projects"].IsSequence())) {
        fail("expected a mapping with a 'projects' list");
    }
    const auto projects = root["projects"];
    if (!projects) {
        return truth;
    }
    try {
        for (const auto& p : projects) {
            if (!p.IsMap() || !p["name"] || !p["name"].IsScalar()) {
                fail("every project needs a name");
            }
            const auto name = p["name"].as<std::string>();
            if (truth.tested_types.contains(name)) {
                fail("duplicate project '" + name + "'");
            }
            auto& tested = truth.tested_types[name];
            if (p["tested"]) {
                if (!p["tested"].IsSequence()) {
                    fail(name + ": 'tested' must be a list");
                }
                for (const auto& t : p["tested"]) {
                    tested.insert(t.as<std::string>());
                }
            }
            if (p["vulnerable"]) {
                if (!p["vulnerable"].IsSequence()) {
                    fail(name + ": 'vulnerable' must be a list");
                }
                for (const auto& v : p["vulnerable"]) {
                    if (!v.IsMap() || !v["rule"] || !v["function"]) {
                        fail(name + ": vulnerable entries need 'rule' and 'function'");
                    }
                    TruthEntry e{name, v["rule"].as<std::string>(), v["function"].as<std::string>()};
                    if (!tested.contains(e.rule_id)) {
                        fail(name + ": rule '" + e.rule_id + "' is not in the tested list");
                    }
                    truth.entries.insert(std::move(e));
                }
            }
        }
    } catch (const YAML::Exception& e) {
        fail(e.what());
    }
    return truth;
}

GroundTruth load_ground_truth(const std::filesystem::path& file)
{
    std::ifstream in(file);
    if (!in) {
        throw TruthMismatch("cannot read ground truth " + file.string());
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_ground_truth(buf.str(), file.string());
}

ConfusionCounts score(const std::vector<Finding>& findings, const GroundTruth& truth)
{
    std::map<std::pair<std::string, std::string>, std::set<std::string>> confirmed;
    for (const auto& f : findings) {
        if (!truth.tested_types.contains(f.project)) {
            throw TruthMismatch("project '" + f.project + "' is not in the ground truth");
        }
        if (f.verdict == Verdict::Confirmed) {
            confirmed[{f.project, f.rule_id}].insert(f.locator);
        }
    }
    ConfusionCounts c;
    for (const auto& [project, rules] : truth.tested_types) {
        for (const auto& rule : rules) {
            std::set<std::string> expected;
            for (const auto& e : truth.entries) {
                if (e.project == project && e.rule_id == rule) {
                    expected.insert(e.locator);
                }
            }
            const auto it = confirmed.find({project, rule});
            const bool reported = it != confirmed.end() && !it->second.empty();
            const bool matched =
                reported && std::any_of(it->second.begin(), it->second.end(),
                                        [&](const auto& loc) { return expected.contains(loc); });
            if (matched) {
                ++c.tp;
            } else if (!expected.empty()) {
                ++c.fn;
            } else if (reported) {
                ++c.fp;
            } else {
                ++c.tn;
            }
        }
    }
    return c;
}

Rates derive_rates(const ConfusionCounts& c)
{
    Rates r;
    auto ratio = [](std::size_t num, std::size_t den) -> std::optional<double> {
        if (den == 0) {
            return std::nullopt;
        }
        return static_cast<double>(num) / static_cast<double>(den);
    };
    r.precision = ratio(c.tp, c.tp + c.fp);
    r.recall = ratio(c.tp, c.tp + c.fn);
    r.fp_rate = ratio(c.fp, c.fp + c.tn);
    if (r.precision && r.recall && (*r.precision + *r.recall) > 0.0) {
        r.f1 = 2.0 * *r.precision * *r.recall / (*r.precision + *r.recall);
    }
    return r;
}

std::string format_percent(const std::optional<double>& v)
{
    if (!v) {
        return "undefined";
    }
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f%%", *v * 100.0);
    return buf;
}

} // namespace logiscan
