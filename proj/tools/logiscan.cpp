#include "CLI11.hpp"

#include "logiscan/config.hpp"
#include "logiscan/errors.hpp"
#include "logiscan/gateway.hpp"
#include "logiscan/pipeline.hpp"
#include "logiscan/report.hpp"
#include "logiscan/rules.hpp"

#include <chrono>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <set>
#include <sstream>

namespace fs = std::filesystem;
using namespace logiscan;

namespace {

constexpr int kExitClean = 0;
constexpr int kExitFindings = 1;
constexpr int kExitFatal = 2;

struct ScanOptions {
    std::string project;
    std::string name;
    std::string config;
    std::string rules;
    std::string whitelist;
    std::string mode;
    std::string transcript;
    std::string out;
    std::size_t token_budget = 0;
    std::size_t max_in_flight = 0;
};

void write_file(const fs::path& path, const std::string& text)
{
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw IoError("cannot write " + path.string());
    }
    out << text;
}

ScanConfig resolve_config(const ScanOptions& o)
{
    auto config = ScanConfig::defaults();
    if (!o.config.empty()) {
        config.merge_file(o.config);
    }
    if (!o.project.empty()) config.project_root = o.project;
    if (!o.name.empty()) config.project_name = o.name;
    if (!o.rules.empty()) config.rules_dir = o.rules;
    if (!o.whitelist.empty()) config.whitelist = o.whitelist;
    if (!o.transcript.empty()) config.transcript = fs::path(o.transcript);
    if (!o.out.empty()) config.out_dir = o.out;
    if (o.token_budget > 0) config.token_budget = o.token_budget;
    if (o.max_in_flight > 0) config.max_in_flight = o.max_in_flight;
    if (!o.mode.empty()) {
        const auto m = gateway_mode_from(o.mode);
        if (!m) {
            throw ConfigError("--mode must be live, record or replay");
        }
        config.mode = *m;
    }
    config.validate();
    return config;
}

int cmd_scan(const ScanOptions& o)
{
    const auto started = std::chrono::steady_clock::now();
    const auto config = resolve_config(o);
    const auto rules = load_rules(config.rules_dir);
    if (rules.empty()) {
        std::cerr << "warning: no rules in " << config.rules_dir << "\n";
    }
    const auto whitelist = fs::exists(config.whitelist) ? SignatureSet::load(config.whitelist) : SignatureSet{};

    std::shared_ptr<ChatTransport> transport;
    if (config.mode != GatewayMode::Replay) {
        transport = std::make_shared<HttpChatTransport>(config.provider, std::getenv(config.provider.api_key_env.c_str()));
    }
    Gateway gateway(config.provider, config.mode, transport, config.transcript, config.max_in_flight);
    const auto report = run_scan(config, rules, whitelist, gateway);

    fs::create_directories(config.out_dir);
    write_file(config.out_dir / "scan-report.json", report_to_json(report));
    write_file(config.out_dir / "scan-report.md", report_to_markdown(report, config.project_root));

    const auto wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
    std::cerr << report.project << ": " << report.confirmed_count() << " confirmed of " << report.findings.size()
              << " candidates, " << report.parse_errors.size() << " parse errors, wall " << wall << " s\n";
    return report.confirmed_count() > 0 ? kExitFindings : kExitClean;
}

int cmd_score(const std::vector<std::string>& reports, const std::string& truth_path)
{
    const auto truth = load_ground_truth(truth_path);
    std::vector<Finding> findings;
    for (const auto& path : reports) {
        std::ifstream in(path);
        if (!in) {
            throw TruthMismatch("cannot read report " + path);
        }
        std::ostringstream buf;
        buf << in.rdbuf();
        auto report = report_from_json(buf.str());
        findings.insert(findings.end(), report.findings.begin(), report.findings.end());
    }
    const auto counts = score(findings, truth);
    const auto rates = derive_rates(counts);
    std::cout << "TP " << counts.tp << "  TN " << counts.tn << "  FP " << counts.fp << "  FN " << counts.fn << "\n";
    std::cout << "precision " << format_percent(rates.precision) << "\n";
    std::cout << "recall    " << format_percent(rates.recall) << "\n";
    std::cout << "f1        " << format_percent(rates.f1) << "\n";
    std::cout << "fp_rate   " << format_percent(rates.fp_rate) << "\n";
    return kExitClean;
}

int cmd_rules_check(const std::string& dir)
{
    const fs::path rules_dir = dir.empty() ? default_rules_dir() : fs::path(dir);
    const auto rules = load_rules(rules_dir);
    if (rules.empty()) {
        std::cout << "warning: 0 rules in " << rules_dir.string() << "\n";
        return kExitClean;
    }
    for (const auto& r : rules) {
        std::cout << r.id << ":";
        for (const auto& f : r.filters) {
            std::cout << " " << to_string(f.kind);
        }
        std::cout << " |";
        for (const auto& c : r.checks) {
            std::cout << " " << to_string(c.kind);
        }
        std::cout << "\n";
    }
    std::cout << rules.size() << " rules OK\n";
    return kExitClean;
}

int cmd_graph_dump(const ScanOptions& o)
{
    auto config = ScanConfig::defaults();
    if (!o.config.empty()) {
        config.merge_file(o.config);
    }
    if (!o.project.empty()) {
        config.project_root = o.project;
    }
    if (config.project_root.empty()) {
        throw ConfigError("no project root given");
    }
    const auto whitelist = fs::exists(config.whitelist) ? SignatureSet::load(config.whitelist) : SignatureSet{};
    const std::set<std::string> acl(config.acl_modifiers.begin(), config.acl_modifiers.end());
    const auto model = load_project(config.project_root, config.exclusions, whitelist, acl);
    const auto dot = to_dot(model.graph, &model.reach);
    if (o.out.empty()) {
        std::cout << dot;
    } else {
        write_file(o.out, dot);
    }
    return kExitClean;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"logiscan: LLM-assisted logic vulnerability scanner for Solidity"};
    app.require_subcommand(1);

    ScanOptions scan;
    auto* scan_cmd = app.add_subcommand("scan", "Scan a project directory");
    scan_cmd->add_option("project", scan.project, "Project root");
    scan_cmd->add_option("--name", scan.name, "Project name used in reports");
    scan_cmd->add_option("--config", scan.config, "YAML scan config");
    scan_cmd->add_option("--rules", scan.rules, "Rules directory");
    scan_cmd->add_option("--whitelist", scan.whitelist, "Library signature whitelist");
    scan_cmd->add_option("--mode", scan.mode, "live, record or replay");
    scan_cmd->add_option("--transcript", scan.transcript, "Transcript JSONL file");
    scan_cmd->add_option("--out", scan.out, "Output directory");
    scan_cmd->add_option("--token-budget", scan.token_budget, "Context token budget");
    scan_cmd->add_option("--max-in-flight", scan.max_in_flight, "Concurrent LLM requests");

    std::vector<std::string> reports;
    std::string truth;
    auto* score_cmd = app.add_subcommand("score", "Score reports against ground truth");
    score_cmd->add_option("reports", reports, "scan-report.json files")->required();
    score_cmd->add_option("--truth", truth, "Ground-truth YAML")->required();

    std::string rules_dir;
    auto* rules_cmd = app.add_subcommand("rules-check", "Validate a rules directory");
    rules_cmd->add_option("--rules", rules_dir, "Rules directory");

    ScanOptions graph;
    auto* graph_cmd = app.add_subcommand("graph-dump", "Print the call graph as DOT");
    graph_cmd->add_option("project", graph.project, "Project root");
    graph_cmd->add_option("--config", graph.config, "YAML scan config");
    graph_cmd->add_option("--out", graph.out, "Output file (default stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitClean : kExitFatal;
    }

    try {
        if (*scan_cmd) {
            return cmd_scan(scan);
        }
        if (*score_cmd) {
            return cmd_score(reports, truth);
        }
        if (*rules_cmd) {
            return cmd_rules_check(rules_dir);
        }
        if (*graph_cmd) {
            return cmd_graph_dump(graph);
        }
    } catch (const ReplayMiss& e) {
        std::cerr << "error: replay miss: " << e.what() << "\n";
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
    } catch (const std::exception& e) {
        std::cerr << "fatal: " << e.what() << "\n";
    }
    return kExitFatal;
}
