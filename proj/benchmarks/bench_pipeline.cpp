#include "logiscan/confirm.hpp"
#include "logiscan/filter.hpp"
#include "support/fixture_scan.hpp"
#include "support/solidity.hpp"

#include <benchmark/benchmark.h>

#include <fstream>
#include <random>
#include <sstream>

using namespace logiscan;
using namespace logiscan::testing;

namespace {

std::string fixture_text(const std::string& name, const std::string& file)
{
    std::ifstream in(fixture_root(name) / "contracts" / file);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

// Repeats the contract body under fresh names to get a file of `copies` contracts.
std::string scaled_source(int copies)
{
    const auto base = fixture_text("checkpoint_order", "StakerVault.sol");
    std::string out;
    for (int i = 0; i < copies; ++i) {
        auto copy = base;
        for (const std::string name : {"StakerVault", "ILpGauge", "Error"}) {
            for (auto pos = copy.find(name); pos != std::string::npos; pos = copy.find(name, pos + 1)) {
                copy.insert(pos + name.size(), std::to_string(i));
            }
        }
        out += copy;
    }
    return out;
}

void BM_Parse(benchmark::State& state)
{
    const auto text = scaled_source(static_cast<int>(state.range(0)));
    for (auto _ : state) {
        benchmark::DoNotOptimize(parse_text(text));
    }
    state.SetBytesProcessed(static_cast<int64_t>(state.iterations() * text.size()));
}
BENCHMARK(BM_Parse)->Arg(1)->Arg(16)->Arg(64);

void BM_CallGraph(benchmark::State& state)
{
    const auto text = scaled_source(static_cast<int>(state.range(0)));
    for (auto _ : state) {
        benchmark::DoNotOptimize(mini_project(text));
    }
}
BENCHMARK(BM_CallGraph)->Arg(1)->Arg(16)->Arg(64);

void BM_Filters(benchmark::State& state)
{
    const auto project = mini_project(scaled_source(16));
    const auto rules = load_rules(default_rules_dir());
    for (auto _ : state) {
        std::size_t n = 0;
        for (const auto& rule : rules) {
            n += candidates_for_rule(project.functions, rule).size();
        }
        benchmark::DoNotOptimize(n);
    }
}
BENCHMARK(BM_Filters);

void BM_DataflowPath(benchmark::State& state)
{
    const auto n = static_cast<std::size_t>(state.range(0));
    std::mt19937 rng(3);
    DefUseGraph g;
    for (std::size_t i = 0; i < n; ++i) {
        g.add_node("", "v" + std::to_string(i));
    }
    for (std::size_t i = 0; i < 3 * n; ++i) {
        g.add_edge(rng() % n, rng() % n);
    }
    for (auto _ : state) {
        benchmark::DoNotOptimize(g.path({0}, {n - 1}));
    }
}
BENCHMARK(BM_DataflowPath)->Arg(16)->Arg(256)->Arg(4096);

void BM_ReplayScan(benchmark::State& state)
{
    const auto config = fixture_config("first_deposit", GatewayMode::Replay, std::nullopt);
    const auto rules = load_rules(config.rules_dir);
    const auto whitelist = SignatureSet::load(config.whitelist);
    for (auto _ : state) {
        Gateway gateway(config.provider, config.mode, nullptr, config.transcript, 1);
        benchmark::DoNotOptimize(run_scan(config, rules, whitelist, gateway));
    }
}
BENCHMARK(BM_ReplayScan);

} // namespace

BENCHMARK_MAIN();
