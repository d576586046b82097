#pragma once

#include "logiscan/confirm.hpp"
#include "logiscan/gateway.hpp"
#include "logiscan/project.hpp"

#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace logiscan {

enum class Verdict { Confirmed, Rejected, Skipped };
std::string_view to_string(Verdict v) noexcept;
std::optional<Verdict> verdict_from(std::string_view s);

struct Finding {
    std::string rule_id;
    std::string project;
    std::string file;
    std::string function_id;
    /// `file:Contract.function`, the ground-truth matching key.
    std::string locator;
    Span span;
    Verdict verdict = Verdict::Rejected;
    /// Pipeline stage that produced the verdict: scenario, property,
    /// recognition, confirmation, context or llm.
    std::string stage;
    std::string reason;
    RecognitionAnswer recognized;
    std::vector<CheckVerdict> checks;
    std::vector<std::string> transcript_keys;
};

struct CostLedger {
    double seconds = 0.0;
    std::size_t exchanges = 0;
    std::size_t tokens_in = 0;
    std::size_t tokens_out = 0;
    double usd = 0.0;
    std::size_t code_lines = 0;
    double kloc = 0.0;
    std::optional<double> seconds_per_kloc;
    std::optional<double> usd_per_kloc;
};

/// Totals over `exchanges`; USD = sum(in * price_in + out * price_out) / 1000.
/// Seconds are the summed exchange latencies.
CostLedger summarize_cost(const std::vector<LlmExchange>& exchanges,
                          std::size_t code_lines,
                          double price_in_per_1k,
                          double price_out_per_1k);

struct ParseFailureRecord {
    std::string file;
    std::size_t line = 0;
    std::size_t column = 0;
    std::string message;
};

/// Per-rule candidate counts after each stage; each stage only removes.
struct Funnel {
    std::size_t filtered = 0;
    std::size_t scenario = 0;
    std::size_t property = 0;
    std::size_t recognized = 0;
    std::size_t confirmed = 0;
};

struct ScanReport {
    static constexpr int kSchema = 1;
    std::string project;
    std::string mode;
    std::string config_fingerprint;
    std::size_t files_scanned = 0;
    std::size_t functions = 0;
    std::size_t whitelisted = 0;
    std::size_t reachable = 0;
    std::vector<std::string> rules;
    std::vector<ExcludedFile> excluded;
    std::vector<ParseFailureRecord> parse_errors;
    std::vector<std::string> warnings;
    std::map<std::string, Funnel> funnel;
    std::vector<Finding> findings;
    CostLedger ledger;

    std::size_t confirmed_count() const;
};

std::string report_to_json(const ScanReport& report);
ScanReport report_from_json(std::string_view text);
/// Human-readable rendering grouped by rule. Source excerpts are taken from
/// `root` when given.
std::string report_to_markdown(const ScanReport& report, const std::optional<std::filesystem::path>& root = std::nullopt);

struct TruthEntry {
    std::string project;
    std::string rule_id;
    std::string locator;
    auto operator<=>(const TruthEntry&) const = default;
};

struct GroundTruth {
    std::set<TruthEntry> entries;
    std::map<std::string, std::set<std::string>> tested_types;
};

/// YAML: `projects: [{name, tested: [rule ids], vulnerable: [{rule, function}]}]`.
/// Throws TruthMismatch on schema violations.
GroundTruth parse_ground_truth(std::string_view yaml_text, const std::string& source = "<memory>");
GroundTruth load_ground_truth(const std::filesystem::path& file);

struct ConfusionCounts {
    std::size_t tp = 0;
    std::size_t tn = 0;
    std::size_t fp = 0;
    std::size_t fn = 0;
    std::size_t total() const noexcept { return tp + tn + fp + fn; }
    bool operator==(const ConfusionCounts&) const = default;
};

/// Counts per (project, tested rule): TP when a confirmed finding matches a
/// truth locator, FN when truth has entries but none matched, FP when only
/// unmatched confirmed findings exist, TN otherwise. Throws TruthMismatch for
/// findings of projects absent from the truth.
ConfusionCounts score(const std::vector<Finding>& findings, const GroundTruth& truth);

/// Rates in [0, 1]; nullopt where the denominator is zero.
struct Rates {
    std::optional<double> precision;
    std::optional<double> recall;
    std::optional<double> f1;
    std::optional<double> fp_rate;
};

Rates derive_rates(const ConfusionCounts& c);

/// `57.14%`, or `undefined`.
std::string format_percent(const std::optional<double>& v);

} // namespace logiscan
