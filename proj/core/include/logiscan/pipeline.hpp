#pragma once

#include "logiscan/callgraph.hpp"
#include "logiscan/config.hpp"
#include "logiscan/gateway.hpp"
#include "logiscan/project.hpp"
#include "logiscan/report.hpp"
#include "logiscan/rules.hpp"

#include <set>
#include <string>
#include <vector>

namespace logiscan {

/// Everything derived from the sources before any LLM query.
struct ProjectModel {
    ProjectLayout layout;
    std::vector<SourceUnit> units;
    std::vector<ParseFailureRecord> parse_errors;
    std::vector<FunctionRecord> functions;
    InheritanceMap inheritance;
    CallGraph graph;
    ReachabilitySet reach;
    /// Functions with a body that survive the whitelist and are reachable.
    std::vector<FunctionIndex> eligible;
    std::size_t whitelisted = 0;
    std::size_t code_lines = 0;
};

/// discover -> parse -> call graph -> reachability -> whitelist. Files that
/// fail to parse are recorded and skipped.
ProjectModel load_project(const std::filesystem::path& root,
                          const std::vector<std::string>& exclusions,
                          const SignatureSet& whitelist,
                          const std::set<std::string>& acl_modifiers);

/// Runs the full scan for one project. ReplayMiss propagates; every other
/// per-candidate failure is recorded as a skipped finding.
ScanReport run_scan(const ScanConfig& config,
                    const std::vector<VulnRule>& rules,
                    const SignatureSet& whitelist,
                    Gateway& gateway);

} // namespace logiscan
