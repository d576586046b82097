#include "logiscan/pipeline.hpp"

#include "logiscan/errors.hpp"
#include "logiscan/filter.hpp"
#include "logiscan/parser.hpp"
#include "logiscan/prompts.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <mutex>
#include <thread>

namespace logiscan {

ProjectModel load_project(const std::filesystem::path& root,
                          const std::vector<std::string>& exclusions,
                          const SignatureSet& whitelist,
                          const std::set<std::string>& acl_modifiers)
{
    ProjectModel m;
    m.layout = discover_sources(root, exclusions);
    for (const auto& file : m.layout.included) {
        m.code_lines += count_code_lines(file->text());
        try {
            m.units.push_back(parse_source(file));
        } catch (const SyntaxError& e) {
            m.parse_errors.push_back({e.path(), e.line(), e.column(), e.message()});
        }
    }
    for (const auto& unit : m.units) {
        auto fns = enumerate_functions(unit);
        m.functions.insert(m.functions.end(), std::make_move_iterator(fns.begin()), std::make_move_iterator(fns.end()));
    }
    m.inheritance = inheritance_of(m.units);
    m.graph = build_call_graph(m.functions, m.inheritance);
    m.reach = compute_reachability(m.graph, m.functions, acl_modifiers);
    for (FunctionIndex i = 0; i < m.functions.size(); ++i) {
        const auto& fn = m.functions[i];
        if (!fn.has_body) {
            continue;
        }
        if (is_whitelisted(fn, whitelist)) {
            ++m.whitelisted;
            continue;
        }
        if (m.reach.is_reachable(i)) {
            m.eligible.push_back(i);
        }
    }
    return m;
}

namespace {

struct Task {
    const VulnRule* rule = nullptr;
    FunctionIndex function = 0;
    ContextPolicy policy;
};

std::string project_display_name(const ScanConfig& config)
{
    if (!config.project_name.empty()) {
        return config.project_name;
    }
    auto root = config.project_root.lexically_normal();
    if (root.filename().empty()) {
        root = root.parent_path();
    }
    return root.filename().string();
}

int stage_rank(const std::string& stage)
{
    if (stage == "scenario") return 1;
    if (stage == "property") return 2;
    if (stage == "recognition") return 3;
    if (stage == "confirmation") return 4;
    return 0;
}

class CandidateRunner {
public:
    CandidateRunner(const ProjectModel& model, const ScanConfig& config, Gateway& gateway)
        : model_(model), config_(config), gateway_(gateway)
    {
    }

    Finding run(const Task& task) const
    {
        const auto& fn = model_.functions[task.function];
        const auto& rule = *task.rule;
        Finding f;
        f.rule_id = rule.id;
        f.project = project_display_name(config_);
        f.file = fn.file;
        f.function_id = fn.id();
        f.locator = fn.file + ":" + fn.qualified_name();
        f.span = fn.span;
        f.verdict = Verdict::Rejected;

        CodeContext ctx;
        try {
            ctx = assemble_context(task.function, model_.functions, model_.graph, task.policy, config_.token_budget);
        } catch (const ContextOverflow& e) {
            return skip(std::move(f), "context", std::string("context-overflow: ") + e.what());
        }

        RecognitionAnswer recognized;
        try {
            f.stage = "scenario";
            const auto scenario_prompt = build_scenario_prompt(rule.scenarios, ctx.text);
            const auto scenarios = ask(f, Purpose::Scenario, scenario_prompt,
                                       [&](const std::string& r) { return parse_scenario_answer(r, rule.scenarios.size()); });
            if (!scenarios) {
                return skip(std::move(f), "scenario", "llm-format");
            }
            if (std::none_of(scenarios->begin(), scenarios->end(), [](const auto& kv) { return kv.second; })) {
                f.reason = "no scenario matched";
                return f;
            }

            f.stage = "property";
            const auto property = ask(f, Purpose::Property, build_property_prompt(rule, ctx.text),
                                      [](const std::string& r) { return parse_yes_no(r); });
            if (!property) {
                return skip(std::move(f), "property", "llm-format");
            }
            if (!*property) {
                f.reason = "property not matched";
                return f;
            }

            f.stage = "recognition";
            if (!rule.recognition.empty()) {
                const auto slots = rule.slot_names();
                const auto answer = ask(f, Purpose::Recognition, build_recognition_prompt(rule.recognition, ctx.text),
                                        [&](const std::string& r) { return parse_recognition_answer(r, slots); });
                if (!answer) {
                    return skip(std::move(f), "recognition", "llm-format");
                }
                const auto check = validate_recognition(*answer, slots, ctx.text);
                f.recognized = *answer;
                if (!check.ok) {
                    f.reason = "recognition aborted: " + check.reason;
                    return f;
                }
                recognized = check.items;
            }
        } catch (const ProviderError& e) {
            return skip(std::move(f), f.stage, std::string("provider-error: ") + e.what());
        }

        f.stage = "confirmation";
        const auto result =
            confirm_candidate(rule, recognized, ctx, model_.functions, model_.graph, model_.reach);
        f.checks = result.verdicts;
        if (result.confirmed) {
            f.verdict = Verdict::Confirmed;
        } else {
            for (const auto& v : result.verdicts) {
                if (!v.confirmed) {
                    f.reason = std::string(to_string(v.kind)) + " rejected: " + v.reason;
                    break;
                }
            }
        }
        return f;
    }

private:
    static Finding skip(Finding f, std::string stage, std::string reason)
    {
        f.verdict = Verdict::Skipped;
        f.stage = std::move(stage);
        f.reason = std::move(reason);
        return f;
    }

    /// Sends a prompt; an unparseable answer is asked once more before
    /// giving up with nullopt.
    template <typename Parse>
    auto ask(Finding& f, Purpose purpose, const std::string& user, Parse&& parse) const
        -> std::optional<decltype(parse(std::string()))>
    {
        for (int attempt = 0; attempt < 2; ++attempt) {
            const auto ex = gateway_.complete(purpose, f.rule_id, f.function_id, system_prompt(), user, attempt);
            f.transcript_keys.push_back(ex.key.describe());
            try {
                return parse(ex.response);
            } catch (const UnparseableAnswer&) {
            }
        }
        return std::nullopt;
    }

    const ProjectModel& model_;
    const ScanConfig& config_;
    Gateway& gateway_;
};

} // namespace

ScanReport run_scan(const ScanConfig& config,
                    const std::vector<VulnRule>& rules,
                    const SignatureSet& whitelist,
                    Gateway& gateway)
{
    const std::set<std::string> acl(config.acl_modifiers.begin(), config.acl_modifiers.end());
    const auto model = load_project(config.project_root, config.exclusions, whitelist, acl);

    ScanReport report;
    report.mode = std::string(to_string(config.mode));
    report.config_fingerprint = config.fingerprint();
    report.files_scanned = model.layout.included.size();
    report.functions = model.functions.size();
    report.whitelisted = model.whitelisted;
    report.reachable = model.reach.reachable.size();
    report.excluded = model.layout.excluded;
    report.parse_errors = model.parse_errors;
    if (rules.empty()) {
        report.warnings.push_back("no rules");
    }

    std::vector<Task> tasks;
    for (const auto& rule : rules) {
        report.rules.push_back(rule.id);
        auto& funnel = report.funnel[rule.id];
        for (const auto idx : model.eligible) {
            if (apply_filters(model.functions[idx], rule, acl).passed) {
                tasks.push_back({&rule, idx, rule.context});
                ++funnel.filtered;
            }
        }
    }

    CandidateRunner runner(model, config, gateway);
    std::vector<Finding> findings(tasks.size());
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    auto worker = [&] {
        for (std::size_t i = next++; i < tasks.size(); i = next++) {
            try {
                findings[i] = runner.run(tasks[i]);
            } catch (...) {
                std::lock_guard lock(failure_mutex);
                if (!failure) {
                    failure = std::current_exception();
                }
                next = tasks.size();
            }
        }
    };
    const auto workers = std::min<std::size_t>(std::max<std::size_t>(config.max_in_flight, 1), tasks.size());
    if (workers <= 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        for (std::size_t w = 0; w < workers; ++w) {
            pool.emplace_back(worker);
        }
    }
    if (failure) {
        std::rethrow_exception(failure);
    }

    for (const auto& f : findings) {
        auto& funnel = report.funnel[f.rule_id];
        const int rank = stage_rank(f.stage);
        funnel.scenario += rank > 1 ? 1 : 0;
        funnel.property += rank > 2 ? 1 : 0;
        funnel.recognized += rank > 3 ? 1 : 0;
        funnel.confirmed += f.verdict == Verdict::Confirmed ? 1 : 0;
    }
    report.project = project_display_name(config);
    report.findings = std::move(findings);
    report.ledger = summarize_cost(gateway.exchanges(), model.code_lines, config.provider.price_in_per_1k,
                                   config.provider.price_out_per_1k);
    return report;
}

} // namespace logiscan
