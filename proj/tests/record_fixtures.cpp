// Regenerates tests/fixtures/*/transcript.jsonl from the scripted answers.
// Usage: record_fixtures [fixture-name...]

#include "support/fixture_scan.hpp"
#include "support/fixture_scripts.hpp"

#include <iostream>
#include <set>

using namespace logiscan;
using namespace logiscan::testing;

int main(int argc, char** argv)
{
    const std::set<std::string> only(argv + 1, argv + argc);
    const auto rules = load_rules(default_rules_dir());
    try {
        for (const auto& script : fixture_scripts()) {
            if (!only.empty() && !only.contains(script.name)) {
                continue;
            }
            auto transport = std::make_shared<ScriptedTransport>(rules, script.answers);
            const auto report = scan_fixture(script.name, GatewayMode::Record, transport);
            std::cout << script.name << ": " << transport->calls() << " exchanges, " << report.confirmed_count()
                      << " confirmed of " << report.findings.size() << " candidates\n";
        }
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
