// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 when
// any criterion fails.

#include "logiscan/confirm.hpp"
#include "logiscan/filter.hpp"
#include "logiscan/report.hpp"
#include "support/fixture_scan.hpp"
#include "support/fixture_scripts.hpp"
#include "support/seeded_corpus.hpp"
#include "support/solidity.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <set>
#include <sstream>

using namespace logiscan;
using namespace logiscan::testing;
namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

namespace {

// Pinned tolerances and budgets.
constexpr double kRateTolerancePct = 0.1;
constexpr double kFirstDepositBudgetSeconds = 5.0;
constexpr double kMinKlocPerSecond = 10.0;
constexpr double kThroughputMinSeconds = 0.5;
constexpr std::size_t kMinSeededCandidates = 30;
constexpr int kMinDeMorganCases = 1000;

struct Outcome {
    bool ok = true;
    std::string detail;
};

// Collects failures; the first few are kept for the summary line.
struct Checker {
    Outcome out;
    std::vector<std::string> failures;
    void expect(bool cond, const std::string& what)
    {
        if (!cond) {
            out.ok = false;
            failures.push_back(what);
        }
    }
    Outcome finish(std::string detail)
    {
        if (!out.ok) {
            detail = failures.front();
            if (failures.size() > 1) {
                detail += " (+" + std::to_string(failures.size() - 1) + " more)";
            }
        }
        out.detail = std::move(detail);
        return out;
    }
};

double seconds_since(Clock::time_point t)
{
    return std::chrono::duration<double>(Clock::now() - t).count();
}

std::string fixed(double v, int digits = 2)
{
    std::ostringstream s;
    s.setf(std::ios::fixed);
    s.precision(digits);
    s << v;
    return s.str();
}

std::string read_file(const fs::path& p)
{
    std::ifstream in(p);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

const std::vector<VulnRule>& shipped_rules()
{
    static const auto rules = load_rules(default_rules_dir());
    return rules;
}

std::vector<std::string> fixture_names()
{
    std::vector<std::string> names;
    for (const auto& e : fs::directory_iterator(fixture_dir())) {
        if (e.is_directory()) {
            names.push_back(e.path().filename().string());
        }
    }
    std::sort(names.begin(), names.end());
    return names;
}

std::vector<const Finding*> confirmed(const ScanReport& r, const std::string& rule)
{
    std::vector<const Finding*> out;
    for (const auto& f : r.findings) {
        if (f.verdict == Verdict::Confirmed && f.rule_id == rule) {
            out.push_back(&f);
        }
    }
    return out;
}

bool evidence_covers_line(const Finding& f, std::size_t line)
{
    for (const auto& c : f.checks) {
        for (const auto& e : c.evidence) {
            if (e.span.first_line <= line && line <= e.span.last_line) {
                return true;
            }
        }
    }
    return false;
}

Outcome motivating_example()
{
    Checker c;
    const auto started = Clock::now();
    const auto vault = scan_fixture("first_deposit");
    const auto elapsed = seconds_since(started);
    const auto hits = confirmed(vault, "risky-first-deposit");
    c.expect(hits.size() == 1, "first_deposit: expected 1 confirmed risky-first-deposit, got " +
                                   std::to_string(hits.size()));
    c.expect(vault.confirmed_count() == 1, "first_deposit: other rules confirmed findings");
    if (hits.size() == 1) {
        c.expect(evidence_covers_line(*hits[0], 8), "first_deposit: no evidence on line 8");
        c.expect(evidence_covers_line(*hits[0], 9), "first_deposit: no evidence on line 9");
    }
    const auto patched = scan_fixture("first_deposit_no_branch");
    c.expect(patched.confirmed_count() == 0, "first_deposit_no_branch: expected 0 confirmed findings");
    c.expect(elapsed < kFirstDepositBudgetSeconds, "first_deposit scan took " + fixed(elapsed) + " s");
    return c.finish("1 finding with evidence on lines 8-9, branchless variant 0, scan " + fixed(elapsed, 3) + " s");
}

Outcome order_discrimination()
{
    Checker c;
    const auto staker = scan_fixture("checkpoint_order");
    c.expect(confirmed(staker, "wrong-checkpoint-order").size() == 1, "checkpoint_order: expected 1 confirmed finding");
    c.expect(staker.confirmed_count() == 1, "checkpoint_order: other rules confirmed findings");
    const auto patched = scan_fixture("checkpoint_patched");
    c.expect(patched.confirmed_count() == 0, "checkpoint_patched: expected 0 confirmed findings");
    // The replayed answers still say Yes: the verdict must come from the OC check.
    bool reached_confirmation = false;
    for (const auto& f : patched.findings) {
        if (f.rule_id == "wrong-checkpoint-order" && f.stage == "confirmation") {
            reached_confirmation = true;
            const bool oc_rejected = std::any_of(f.checks.begin(), f.checks.end(), [](const CheckVerdict& v) {
                return v.kind == CheckKind::OC && !v.confirmed;
            });
            c.expect(oc_rejected, "checkpoint_patched: OC did not reject");
        }
    }
    c.expect(reached_confirmation, "checkpoint_patched: candidate never reached confirmation");
    return c.finish("original 1 confirmed, patched rejected by OC after Yes answers");
}

Outcome metric_arithmetic()
{
    Checker c;
    auto near = [&](const std::optional<double>& v, double expected, const std::string& what) {
        c.expect(v.has_value() && std::abs(*v * 100.0 - expected) <= kRateTolerancePct,
                 what + " = " + format_percent(v) + ", expected " + fixed(expected) + "%");
    };
    const auto web3 = derive_rates({40, 154, 30, 8});
    near(web3.precision, 57.14, "Web3Bugs precision");
    near(web3.recall, 83.33, "Web3Bugs recall");
    near(web3.f1, 67.8, "Web3Bugs F1");
    const auto defi = derive_rates({10, 19, 1, 4});
    near(defi.precision, 90.91, "DefiHacks precision");
    near(defi.recall, 71.43, "DefiHacks recall");
    near(defi.f1, 80.0, "DefiHacks F1");
    const auto top = derive_rates({0, 283, 13, 0});
    near(top.fp_rate, 4.39, "Top200 FP rate");
    return c.finish("7 rates within " + fixed(kRateTolerancePct, 1) + "%");
}

Finding finding(const std::string& project, const std::string& rule, const std::string& locator,
                Verdict v = Verdict::Confirmed)
{
    Finding f;
    f.project = project;
    f.rule_id = rule;
    f.locator = locator;
    f.verdict = v;
    return f;
}

Outcome counting_semantics()
{
    Checker c;
    const auto truth = load_ground_truth(fixture_dir().parent_path() / "truth" / "three_projects.yaml");
    std::size_t tested = 0;
    std::vector<std::pair<std::string, std::string>> pairs;
    for (const auto& [project, rules] : truth.tested_types) {
        tested += rules.size();
        for (const auto& r : rules) {
            pairs.emplace_back(project, r);
        }
    }
    c.expect(truth.tested_types.size() == 3, "truth fixture must have 3 projects");

    const std::vector<std::string> locators{"contracts/Vault.sol:Vault.deposit",
                                            "contracts/Minter.sol:Minter.claimReward",
                                            "contracts/StakerVault.sol:StakerVault.transfer",
                                            "contracts/Other.sol:Other.run"};
    std::mt19937 rng(77);
    for (int round = 0; round < 1000 && c.out.ok; ++round) {
        std::vector<Finding> fs;
        const int n = static_cast<int>(rng() % 12);
        for (int i = 0; i < n; ++i) {
            const auto& [p, r] = pairs[rng() % pairs.size()];
            fs.push_back(finding(p, r, locators[rng() % locators.size()], static_cast<Verdict>(rng() % 3)));
        }
        const auto counts = score(fs, truth);
        c.expect(counts.total() == tested, "partition broken in round " + std::to_string(round) + ": " +
                                               std::to_string(counts.total()) + " != " + std::to_string(tested));
    }

    // Five tested types, one true finding confirmed and one spurious report.
    GroundTruth five;
    five.tested_types["p"] = {"approval-not-cleared", "risky-first-deposit", "slippage", "front-running",
                              "wrong-checkpoint-order"};
    five.entries.insert({"p", "risky-first-deposit", "contracts/V.sol:V.deposit"});
    const auto counts = score({finding("p", "risky-first-deposit", "contracts/V.sol:V.deposit"),
                               finding("p", "slippage", "contracts/R.sol:R.swap")},
                              five);
    c.expect(counts.total() == 5, "5-type project sums to " + std::to_string(counts.total()));
    c.expect(counts == ConfusionCounts{1, 3, 1, 0}, "5-type project counts wrong");
    return c.finish("1000 random finding sets sum to " + std::to_string(tested) + ", 5-type project sums to 5");
}

Outcome static_confirmation_reduction()
{
    Checker c;
    const auto root = fs::temp_directory_path() / ("logiscan-seeded-" + std::to_string(std::random_device{}()));
    const auto corpus = write_seeded_corpus(root);
    auto config = ScanConfig::defaults();
    config.project_root = root;
    config.project_name = "seeded";
    config.mode = GatewayMode::Live;
    config.max_in_flight = 1;
    auto transport = std::make_shared<ScriptedTransport>(shipped_rules(), corpus.answers);
    Gateway gateway(config.provider, config.mode, transport, std::nullopt, config.max_in_flight);
    const auto report = run_scan(config, shipped_rules(), SignatureSet::load(config.whitelist), gateway);
    fs::remove_all(root);

    std::size_t vulnerable = 0, correct = 0, accepted = 0, rejected = 0, crossover = 0;
    for (const auto& cand : corpus.candidates) {
        (cand.vulnerable ? vulnerable : correct) += 1;
        const Finding* hit = nullptr;
        for (const auto& f : report.findings) {
            if (f.rule_id == cand.rule_id && f.locator.ends_with("." + cand.function_name)) {
                hit = &f;
            }
        }
        const auto label = cand.rule_id + " " + cand.function_name;
        if (!hit) {
            c.expect(false, label + ": never became a candidate");
            continue;
        }
        c.expect(hit->stage == "confirmation", label + ": stopped at stage " + hit->stage + " " + hit->reason);
        const bool ok = hit->verdict == Verdict::Confirmed;
        if (cand.vulnerable && ok) {
            ++accepted;
        } else if (!cand.vulnerable && !ok) {
            ++rejected;
        } else {
            ++crossover;
            c.expect(false, label + ": " + (cand.vulnerable ? "vulnerable rejected" : "correct accepted"));
        }
    }
    c.expect(corpus.candidates.size() >= kMinSeededCandidates, "seeded corpus too small");
    c.expect(vulnerable == correct, "seeded corpus is not balanced");
    return c.finish(std::to_string(corpus.candidates.size()) + " candidates: " + std::to_string(accepted) + "/" +
                    std::to_string(vulnerable) + " vulnerable accepted, " + std::to_string(rejected) + "/" +
                    std::to_string(correct) + " correct rejected, " + std::to_string(crossover) + " crossover");
}

using Edges = std::vector<std::pair<std::size_t, std::size_t>>;

// Brute-force reachability: depth-first search from every node.
std::vector<std::vector<bool>> brute_reach(std::size_t n, const Edges& edges)
{
    std::vector<std::vector<bool>> r(n, std::vector<bool>(n, false));
    for (std::size_t s = 0; s < n; ++s) {
        std::vector<std::size_t> stack{s};
        r[s][s] = true;
        while (!stack.empty()) {
            const auto at = stack.back();
            stack.pop_back();
            for (const auto& [a, b] : edges) {
                if (a == at && !r[s][b]) {
                    r[s][b] = true;
                    stack.push_back(b);
                }
            }
        }
    }
    return r;
}

bool dataflow_matches(std::size_t n, const Edges& edges)
{
    DefUseGraph g;
    for (std::size_t i = 0; i < n; ++i) {
        g.add_node("", "v" + std::to_string(i));
    }
    for (const auto& [a, b] : edges) {
        g.add_edge(a, b);
    }
    const auto r = brute_reach(n, edges);
    for (std::size_t a = 0; a < n; ++a) {
        for (std::size_t b = 0; b < n; ++b) {
            if (g.path({a}, {b}).has_value() != r[a][b]) {
                return false;
            }
            const auto df = check_dataflow("v" + std::to_string(a), "v" + std::to_string(b), g);
            if (df.confirmed != (r[a][b] || r[b][a])) {
                return false;
            }
        }
    }
    return true;
}

bool contains_ci(const std::string& hay, const std::string& needle)
{
    auto low = [](char ch) { return static_cast<char>(std::tolower(static_cast<unsigned char>(ch))); };
    for (std::size_t i = 0; i + needle.size() <= hay.size(); ++i) {
        bool ok = true;
        for (std::size_t j = 0; j < needle.size() && ok; ++j) {
            ok = low(hay[i + j]) == low(needle[j]);
        }
        if (ok) {
            return true;
        }
    }
    return needle.empty();
}

Outcome oracle_equivalence()
{
    Checker c;

    std::size_t graphs = 0;
    for (std::size_t n = 1; n <= 4; ++n) {
        Edges all;
        for (std::size_t a = 0; a < n; ++a) {
            for (std::size_t b = 0; b < n; ++b) {
                if (a != b) {
                    all.emplace_back(a, b);
                }
            }
        }
        for (std::uint32_t mask = 0; mask < (1u << all.size()); ++mask) {
            Edges edges;
            for (std::size_t i = 0; i < all.size(); ++i) {
                if (mask & (1u << i)) {
                    edges.push_back(all[i]);
                }
            }
            c.expect(dataflow_matches(n, edges), "DF mismatch on exhaustive graph n=" + std::to_string(n));
            ++graphs;
        }
    }
    std::mt19937 rng(9001);
    for (std::size_t n = 5; n <= 12; ++n) {
        for (int round = 0; round < 150; ++round) {
            const double density = 0.05 + 0.3 * (round % 7) / 6.0;
            Edges edges;
            for (std::size_t a = 0; a < n; ++a) {
                for (std::size_t b = 0; b < n; ++b) {
                    if (a != b && std::uniform_real_distribution<>(0, 1)(rng) < density) {
                        edges.emplace_back(a, b);
                    }
                }
            }
            c.expect(dataflow_matches(n, edges), "DF mismatch on random graph n=" + std::to_string(n));
            ++graphs;
        }
    }

    std::size_t pairs = 0;
    for (const auto& name : fixture_names()) {
        std::vector<std::string> texts;
        for (const auto& e : fs::recursive_directory_iterator(fixture_root(name))) {
            if (e.path().extension() == ".sol") {
                texts.push_back(read_file(e.path()));
            }
        }
        const auto p = mini_project(texts);
        for (std::size_t i = 0; i < p.functions.size(); ++i) {
            if (!p.functions[i].has_body) {
                continue;
            }
            const auto ctx = assemble_context(i, p.functions, p.graph, {}, 100000);
            const auto stmts = ordered_statements(ctx, p.functions, p.graph);
            for (const auto& s1 : stmts) {
                for (const auto& s2 : stmts) {
                    const auto d1 = std::string(s1.statement->own_text());
                    const auto d2 = std::string(s2.statement->own_text());
                    const auto ab = statement_order(d1, d2, stmts);
                    const auto ba = statement_order(d2, d1, stmts);
                    const bool anti = ab && ba &&
                                      ((*ab == Ordering::Before && *ba == Ordering::After) ||
                                       (*ab == Ordering::After && *ba == Ordering::Before) ||
                                       (*ab == Ordering::Same && *ba == Ordering::Same));
                    c.expect(anti, "OC not antisymmetric in " + name + ": " + d1 + " / " + d2);
                    ++pairs;
                }
            }
        }
    }

    const std::vector<std::string> vocab{"total", "supply", "min", "amount", "require", "swap", "liq", "Total"};
    int cases = 0;
    for (; cases < 1500; ++cases) {
        std::string body;
        const int words = static_cast<int>(rng() % 6);
        for (int w = 0; w < words; ++w) {
            body += vocab[rng() % vocab.size()] + std::string(rng() % 3, " ;()x"[rng() % 5]);
        }
        std::vector<std::vector<std::string>> combinations(1 + rng() % 3);
        for (auto& combo : combinations) {
            combo.resize(1 + rng() % 3);
            for (auto& e : combo) {
                e = vocab[rng() % vocab.size()];
            }
        }
        FunctionRecord fn;
        fn.name = "f";
        fn.contract = "C";
        fn.file = "c.sol";
        fn.has_body = true;
        fn.body_text = body;
        fn.body_plain = body;
        FilterDirective fcce;
        fcce.kind = FilterKind::FCCE;
        fcce.combinations = combinations;
        FilterDirective fcnce = fcce;
        fcnce.kind = FilterKind::FCNCE;
        bool every_combo_misses = true;
        for (const auto& combo : combinations) {
            every_combo_misses = every_combo_misses && std::any_of(combo.begin(), combo.end(), [&](const auto& e) {
                                     return !contains_ci(body, e);
                                 });
        }
        const bool p_fcce = directive_passes(fcce, fn);
        const bool p_fcnce = directive_passes(fcnce, fn);
        c.expect(p_fcnce == !p_fcce && p_fcnce == every_combo_misses, "De Morgan pair broken for body '" + body + "'");
    }
    c.expect(cases >= kMinDeMorganCases, "too few De Morgan cases");
    c.expect(pairs > 0, "no statement pairs in fixtures");
    return c.finish(std::to_string(graphs) + " def-use graphs, " + std::to_string(pairs) + " OC pairs, " +
                    std::to_string(cases) + " De Morgan cases");
}

Outcome determinism()
{
    Checker c;
    const auto names = fixture_names();
    for (const auto& name : names) {
        const auto first = report_to_json(scan_fixture(name));
        const auto second = report_to_json(scan_fixture(name, GatewayMode::Replay, nullptr, std::nullopt, 4));
        c.expect(first == second, name + ": replay reports differ");
    }

    // Record through the scripted transport, then replay the new transcript.
    const auto dir = fs::temp_directory_path() / ("logiscan-det-" + std::to_string(std::random_device{}()));
    fs::create_directories(dir);
    std::size_t recorded_runs = 0;
    for (const auto& script : fixture_scripts()) {
        const auto transcript = dir / (script.name + ".jsonl");
        auto transport = std::make_shared<ScriptedTransport>(shipped_rules(), script.answers);
        auto recorded = scan_fixture(script.name, GatewayMode::Record, transport, transcript);
        auto replayed = scan_fixture(script.name, GatewayMode::Replay, nullptr, transcript);
        recorded.mode.clear();
        replayed.mode.clear();
        recorded.ledger = {};
        replayed.ledger = {};
        c.expect(report_to_json(recorded) == report_to_json(replayed), script.name + ": record and replay differ");
        ++recorded_runs;
    }
    fs::remove_all(dir);
    return c.finish(std::to_string(names.size()) + " fixtures byte-identical across replays, " +
                    std::to_string(recorded_runs) + " record-then-replay runs identical");
}

Outcome throughput()
{
    Checker c;
    // Rules and whitelist are loaded once; each pass re-reads, parses,
    // filters and confirms every fixture with replayed answers.
    const auto whitelist = SignatureSet::load(ScanConfig::defaults().whitelist);
    std::vector<ScanConfig> configs;
    for (const auto& name : fixture_names()) {
        configs.push_back(fixture_config(name, GatewayMode::Replay, std::nullopt));
    }
    std::size_t lines = 0;
    int reps = 0;
    const auto started = Clock::now();
    while (seconds_since(started) < kThroughputMinSeconds) {
        for (const auto& config : configs) {
            Gateway gateway(config.provider, config.mode, nullptr, config.transcript, config.max_in_flight);
            lines += run_scan(config, shipped_rules(), whitelist, gateway).ledger.code_lines;
        }
        ++reps;
    }
    const auto elapsed = seconds_since(started);
    const double kloc_per_s = static_cast<double>(lines) / 1000.0 / elapsed;
    c.expect(lines > 0, "fixture corpus has no code lines");
    c.expect(kloc_per_s >= kMinKlocPerSecond,
             fixed(kloc_per_s) + " KLoC/s is below " + fixed(kMinKlocPerSecond, 0) + " KLoC/s");
    return c.finish(fixed(kloc_per_s) + " KLoC/s over " + std::to_string(reps) + " passes (" +
                    std::to_string(lines) + " lines)");
}

Outcome rule_conformance()
{
    Checker c;
    struct Row {
        std::string id;
        std::multiset<std::string> filters;
        std::multiset<std::string> checks;
    };
    // FNI and CEN read as FNK and CFN.
    const std::vector<Row> table{
        {"approval-not-cleared", {"FNK", "FCCE"}, {"VC"}},
        {"risky-first-deposit", {"FCCE"}, {"DF", "VC"}},
        {"price-manipulation-amm", {"FNK", "FCCE"}, {"DF"}},
        {"price-manipulation-buying-tokens", {"FNK", "FCE"}, {"FA"}},
        {"vote-manipulation-flashloan", {"FCCE"}, {"DF"}},
        {"front-running", {"FNK", "FPNC", "FPT", "FCNE", "FNM"}, {"FA"}},
        {"wrong-interest-rate-order", {"FCE", "CFN"}, {"OC"}},
        {"wrong-checkpoint-order", {"FCE", "CFN"}, {"OC"}},
        {"slippage", {"FCCE", "FCNCE"}, {"VC"}},
        {"unauthorized-transfer", {"FNK", "FCNE", "FCE", "FCNCE", "FPNC"}, {"VC"}},
    };
    const auto& rules = shipped_rules();
    c.expect(rules.size() == table.size(), "expected 10 shipped rules, found " + std::to_string(rules.size()));
    for (const auto& row : table) {
        const auto it = std::find_if(rules.begin(), rules.end(), [&](const VulnRule& r) { return r.id == row.id; });
        if (it == rules.end()) {
            c.expect(false, "missing rule " + row.id);
            continue;
        }
        std::multiset<std::string> filters, checks;
        for (const auto& f : it->filters) {
            filters.emplace(to_string(f.kind));
        }
        for (const auto& k : it->checks) {
            checks.emplace(to_string(k.kind));
        }
        c.expect(filters == row.filters, row.id + ": filter kinds differ");
        c.expect(checks == row.checks, row.id + ": check kinds differ");
    }
    return c.finish(std::to_string(rules.size()) + " rules match the filter and check table");
}

} // namespace

int main()
{
    const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
        {"motivating example detection", motivating_example},
        {"order check discrimination", order_discrimination},
        {"metric arithmetic", metric_arithmetic},
        {"counting semantics", counting_semantics},
        {"static confirmation reduction", static_confirmation_reduction},
        {"oracle equivalence", oracle_equivalence},
        {"determinism", determinism},
        {"throughput", throughput},
        {"rule conformance", rule_conformance},
    };
    int failed = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        Outcome o;
        try {
            o = criteria[i].second();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        failed += o.ok ? 0 : 1;
        std::cout << "criterion " << i + 1 << " [" << (o.ok ? "PASS" : "FAIL") << "] " << criteria[i].first << ": "
                  << o.detail << std::endl;
    }
    std::cout << (criteria.size() - failed) << "/" << criteria.size() << " criteria passed" << std::endl;
    return failed == 0 ? 0 : 1;
}
