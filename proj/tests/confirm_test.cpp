#include "logiscan/confirm.hpp"
#include "logiscan/rules.hpp"
#include "support/fixture_scan.hpp"
#include "support/solidity.hpp"

#include <gtest/gtest.h>

#include <fstream>
#include <random>
#include <sstream>

using namespace logiscan;
using namespace logiscan::testing;

namespace {

using Matrix = std::vector<std::vector<bool>>;

// Warshall transitive closure, reflexive.
Matrix closure(std::size_t n, const std::vector<std::pair<std::size_t, std::size_t>>& edges)
{
    Matrix r(n, std::vector<bool>(n, false));
    for (std::size_t i = 0; i < n; ++i) {
        r[i][i] = true;
    }
    for (const auto& [a, b] : edges) {
        r[a][b] = true;
    }
    for (std::size_t k = 0; k < n; ++k) {
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = 0; j < n; ++j) {
                if (r[i][k] && r[k][j]) {
                    r[i][j] = true;
                }
            }
        }
    }
    return r;
}

DefUseGraph graph_of(std::size_t n, const std::vector<std::pair<std::size_t, std::size_t>>& edges)
{
    DefUseGraph g;
    for (std::size_t i = 0; i < n; ++i) {
        g.add_node("", "v" + std::to_string(i));
    }
    for (const auto& [a, b] : edges) {
        g.add_edge(a, b);
    }
    return g;
}

// A returned path must be a chain of edges from the source to the target.
void expect_valid_path(const DefUseGraph& g, const std::vector<std::size_t>& path, std::size_t from, std::size_t to)
{
    std::size_t at = from;
    for (const auto e : path) {
        ASSERT_EQ(g.edges()[e].from, at);
        at = g.edges()[e].to;
    }
    EXPECT_EQ(at, to);
}

void compare_with_oracle(std::size_t n, const std::vector<std::pair<std::size_t, std::size_t>>& edges)
{
    const auto g = graph_of(n, edges);
    const auto r = closure(n, edges);
    for (std::size_t a = 0; a < n; ++a) {
        for (std::size_t b = 0; b < n; ++b) {
            const auto p = g.path({a}, {b});
            ASSERT_EQ(p.has_value(), static_cast<bool>(r[a][b])) << "n=" << n << " " << a << "->" << b;
            if (p) {
                expect_valid_path(g, *p, a, b);
            }
            const auto df = check_dataflow("v" + std::to_string(a), "v" + std::to_string(b), g);
            ASSERT_EQ(df.confirmed, r[a][b] || r[b][a]);
            const auto absent =
                check_dataflow("v" + std::to_string(a), "v" + std::to_string(b), g, Expectation::Absent);
            ASSERT_EQ(absent.confirmed, !df.confirmed);
        }
    }
}

std::string read_file(const std::filesystem::path& p)
{
    std::ifstream in(p);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

MiniProject fixture_project(const std::string& name)
{
    std::vector<std::string> texts;
    for (const auto& e : std::filesystem::recursive_directory_iterator(fixture_root(name))) {
        if (e.path().extension() == ".sol") {
            texts.push_back(read_file(e.path()));
        }
    }
    return mini_project(texts);
}

CodeContext context_of(const MiniProject& p, const std::string& fn, ContextPolicy policy = {})
{
    return assemble_context(p.index_of(fn), p.functions, p.graph, policy, 100000);
}

} // namespace

TEST(DefUseOracle, ExhaustiveUpToFourNodes)
{
    std::size_t graphs = 0;
    for (std::size_t n = 1; n <= 4; ++n) {
        std::vector<std::pair<std::size_t, std::size_t>> all;
        for (std::size_t a = 0; a < n; ++a) {
            for (std::size_t b = 0; b < n; ++b) {
                if (a != b) {
                    all.emplace_back(a, b);
                }
            }
        }
        for (std::uint32_t mask = 0; mask < (1u << all.size()); ++mask) {
            std::vector<std::pair<std::size_t, std::size_t>> edges;
            for (std::size_t i = 0; i < all.size(); ++i) {
                if (mask & (1u << i)) {
                    edges.push_back(all[i]);
                }
            }
            compare_with_oracle(n, edges);
            ++graphs;
        }
    }
    EXPECT_EQ(graphs, 1u + 4u + 64u + 4096u);
}

TEST(DefUseOracle, RandomGraphsUpToTwelveNodes)
{
    std::mt19937 rng(31337);
    for (std::size_t n = 5; n <= 12; ++n) {
        for (int round = 0; round < 150; ++round) {
            std::vector<std::pair<std::size_t, std::size_t>> edges;
            const double density = 0.05 + 0.3 * (round % 7) / 6.0;
            for (std::size_t a = 0; a < n; ++a) {
                for (std::size_t b = 0; b < n; ++b) {
                    if (a != b && std::uniform_real_distribution<>(0, 1)(rng) < density) {
                        edges.emplace_back(a, b);
                    }
                }
            }
            compare_with_oracle(n, edges);
        }
    }
}

TEST(DefUseOracle, MultiSourcePathStartsAtASource)
{
    const auto g = graph_of(5, {{0, 1}, {1, 2}, {3, 2}, {2, 4}});
    const auto p = g.path({0, 3}, {4});
    ASSERT_TRUE(p);
    EXPECT_EQ(p->size(), 2u);
    expect_valid_path(g, *p, 3, 4);
    EXPECT_TRUE(g.path({4}, {4})->empty());
    EXPECT_FALSE(g.path({4}, {0}));
}

TEST(DefUse, EdgesFromAssignmentsDeclarationsAndCalls)
{
    const auto p = mini_project(R"(contract A {
    uint256 stored;
    function f(uint256 a, uint256 b) public {
        uint256 c = a + 1;
        stored = c * b;
        g(c);
    }
    function g(uint256 x) internal { stored = x; }
})");
    const auto ctx = context_of(p, "A.f");
    const auto g = build_def_use(ctx, p.functions, p.graph);
    std::set<std::pair<std::string, std::string>> edges;
    for (const auto& e : g.edges()) {
        edges.emplace(g.nodes()[e.from].name, g.nodes()[e.to].name);
    }
    // Every def site enumerated by hand: c <- a, stored <- c, stored <- b,
    // x <- c (argument binding), stored <- x.
    EXPECT_EQ(edges, (std::set<std::pair<std::string, std::string>>{
                         {"a", "c"}, {"c", "stored"}, {"b", "stored"}, {"c", "x"}, {"x", "stored"}}));
    const auto& fn = p.fn("A.f");
    EXPECT_EQ(scope_of(fn, "a"), fn.id());
    EXPECT_EQ(scope_of(fn, "stored"), "");
}

TEST(DefUse, PrincipalNames)
{
    EXPECT_EQ(principal_name("balances[msg.sender]"), "balances");
    EXPECT_EQ(principal_name("totalSupply()"), "totalSupply");
    EXPECT_EQ(principal_name("token.balanceOf(address(this))"), "balanceOf");
    EXPECT_EQ(principal_name("msg.sender"), "msg.sender");
    EXPECT_EQ(principal_name("  _amount "), "_amount");
    EXPECT_EQ(principal_name("pool.reserve0"), "pool");
}

TEST(Dataflow, FirstDepositFixture)
{
    const auto p = fixture_project("first_deposit");
    const auto ctx = context_of(p, "Vault.deposit");
    const auto g = build_def_use(ctx, p.functions, p.graph);
    const auto v = check_dataflow("_shares", "_amount", g);
    ASSERT_TRUE(v.confirmed) << v.reason;
    ASSERT_FALSE(v.evidence.empty());
    EXPECT_EQ(v.evidence.front().span.first_line, 9u);
    EXPECT_FALSE(check_dataflow("_shares", "nonexistent", g).confirmed);
    EXPECT_FALSE(check_dataflow("_shares", "nonexistent", g, Expectation::Absent).confirmed);
}

TEST(ValueComparison, PresentAndAbsent)
{
    const auto vault = fixture_project("first_deposit");
    const auto v = check_value_comparison({"totalSupply()"}, context_of(vault, "Vault.deposit"), vault.functions);
    ASSERT_TRUE(v.confirmed) << v.reason;
    EXPECT_EQ(v.evidence.at(0).span.first_line, 8u);

    const auto patched = fixture_project("first_deposit_no_branch");
    const auto ctx = context_of(patched, "Vault.deposit");
    EXPECT_FALSE(check_value_comparison({"totalSupply()"}, ctx, patched.functions).confirmed);
    EXPECT_TRUE(check_value_comparison({"totalSupply()"}, ctx, patched.functions, Expectation::Absent).confirmed);
    // A name that never occurs is not evidence of absence.
    EXPECT_FALSE(check_value_comparison({"ghost"}, ctx, patched.functions, Expectation::Absent).confirmed);
}

TEST(ValueComparison, ConditionShapes)
{
    const auto p = mini_project(R"(contract S {
    bool paused;
    function a(uint out, uint minOut) public { require(out >= minOut, "slip"); }
    function b(uint out) public { if (!paused && out > 0) { out = 1; } }
    function c(uint out) public { uint x = out + 1; }
    function d(address who) public { assert(allowed(who)); }
    function allowed(address) internal returns (bool) { return true; }
})");
    EXPECT_TRUE(check_value_comparison({"out", "minOut"}, context_of(p, "S.a"), p.functions).confirmed);
    EXPECT_TRUE(check_value_comparison({"out"}, context_of(p, "S.b"), p.functions).confirmed);
    EXPECT_TRUE(check_value_comparison({"paused"}, context_of(p, "S.b"), p.functions).confirmed);
    EXPECT_FALSE(check_value_comparison({"out"}, context_of(p, "S.c"), p.functions).confirmed);
    EXPECT_TRUE(check_value_comparison({"out"}, context_of(p, "S.c"), p.functions, Expectation::Absent).confirmed);
    EXPECT_TRUE(check_value_comparison({"allowed"}, context_of(p, "S.d"), p.functions).confirmed);
}

TEST(Order, CheckpointFixtureAndPatch)
{
    const std::string bal = "balances[msg.sender] -= amount";
    const std::string cp = "ILpGauge(lpGauge).userCheckpoint(msg.sender)";
    const auto vuln = fixture_project("checkpoint_order");
    const auto vctx = context_of(vuln, "StakerVault.transfer", {false, true});
    const auto v = check_order(bal, cp, Expectation::Before, vctx, vuln.functions, vuln.graph);
    ASSERT_TRUE(v.confirmed) << v.reason;
    ASSERT_EQ(v.evidence.size(), 2u);
    EXPECT_LT(v.evidence[0].span.first_line, v.evidence[1].span.first_line);

    const auto fixed = fixture_project("checkpoint_patched");
    const auto fctx = context_of(fixed, "StakerVault.transfer", {false, true});
    EXPECT_FALSE(check_order(bal, cp, Expectation::Before, fctx, fixed.functions, fixed.graph).confirmed);
    EXPECT_TRUE(check_order(bal, cp, Expectation::After, fctx, fixed.functions, fixed.graph).confirmed);
    EXPECT_FALSE(check_order(bal, "nonexistent()", Expectation::Before, fctx, fixed.functions, fixed.graph).confirmed);
}

TEST(Order, InlinesOneLevelOfInternalCalls)
{
    const auto p = mini_project(R"(contract A {
    uint bal;
    function f() public { _accrue(); bal = 1; }
    function g() public { bal = 1; _accrue(); }
    function _accrue() internal { accrueInterest(); }
    function accrueInterest() internal {}
})");
    const auto stmts = ordered_statements(context_of(p, "A.f", {false, true}), p.functions, p.graph);
    EXPECT_EQ(statement_order("accrueInterest()", "bal = 1", stmts), Ordering::Before);
    const auto stmts_g = ordered_statements(context_of(p, "A.g", {false, true}), p.functions, p.graph);
    EXPECT_EQ(statement_order("accrueInterest()", "bal = 1", stmts_g), Ordering::After);
    EXPECT_EQ(statement_order("bal = 1", "bal = 1", stmts_g), Ordering::Same);
}

TEST(Order, AntisymmetricOnEveryFixture)
{
    std::size_t pairs = 0;
    for (const auto& entry : std::filesystem::directory_iterator(fixture_dir())) {
        if (!entry.is_directory()) {
            continue;
        }
        const auto p = fixture_project(entry.path().filename().string());
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
                    ASSERT_TRUE(ab && ba) << d1 << " / " << d2;
                    if (*ab == Ordering::Before) {
                        EXPECT_EQ(*ba, Ordering::After) << d1 << " / " << d2;
                    } else if (*ab == Ordering::After) {
                        EXPECT_EQ(*ba, Ordering::Before) << d1 << " / " << d2;
                    } else {
                        EXPECT_EQ(*ba, Ordering::Same) << d1 << " / " << d2;
                    }
                    ++pairs;
                }
            }
        }
    }
    EXPECT_GT(pairs, 100u);
}

TEST(FnArg, UserControlledRecipient)
{
    const auto p = fixture_project("front_running");
    const auto ctx = context_of(p, "RewardMinter.claimReward", {false, true});
    const auto g = build_def_use(ctx, p.functions, p.graph);
    const auto v = check_fn_arg("_mintReward(recipient, amount)", "recipient", ctx, p.functions, g, p.reach);
    ASSERT_TRUE(v.confirmed) << v.reason;
    EXPECT_FALSE(check_fn_arg("_mintReward(recipient, amount)", "nobody", ctx, p.functions, g, p.reach).confirmed);
    EXPECT_FALSE(check_fn_arg("unknownCall(x)", "recipient", ctx, p.functions, g, p.reach).confirmed);

    // Blocked by onlyOwner: the parameter is not attacker-controlled.
    const auto admin = context_of(p, "RewardMinter.collectFees", {false, true});
    const auto ga = build_def_use(admin, p.functions, p.graph);
    EXPECT_FALSE(check_fn_arg("_mintReward(recipient, earned[address(this)])", "recipient", admin, p.functions, ga,
                              p.reach)
                     .confirmed);
}

TEST(FnArg, SenderGuardAndConstantArguments)
{
    const auto p = mini_project(R"(contract M {
    address treasury;
    function guarded(address to, uint a) public { require(to == msg.sender); _give(to, a); }
    function fixedDest(address to, uint a) public { _give(treasury, a); }
    function derived(address to, uint a) public { address dest = to; _give(dest, a); }
    function _give(address r, uint a) internal {}
})");
    auto run = [&](const std::string& fn, const std::string& call, const std::string& arg) {
        const auto ctx = context_of(p, fn, {false, true});
        const auto g = build_def_use(ctx, p.functions, p.graph);
        return check_fn_arg(call, arg, ctx, p.functions, g, p.reach);
    };
    EXPECT_FALSE(run("M.guarded", "_give(to, a)", "to").confirmed);
    EXPECT_FALSE(run("M.fixedDest", "_give(treasury, a)", "treasury").confirmed);
    EXPECT_TRUE(run("M.derived", "_give(dest, a)", "dest").confirmed);
}

TEST(Confirm, AllChecksMustHold)
{
    const auto rules = load_rules(default_rules_dir());
    const auto& rule = rule_for_id(rules, "risky-first-deposit");
    RecognitionAnswer rec{{"VariableA", {"_shares", "d"}}, {"VariableB", {"totalSupply()", "d"}},
                          {"VariableC", {"_amount", "d"}}};
    const auto vault = fixture_project("first_deposit");
    const auto r1 = confirm_candidate(rule, rec, context_of(vault, "Vault.deposit"), vault.functions, vault.graph,
                                      vault.reach);
    EXPECT_TRUE(r1.confirmed);
    ASSERT_EQ(r1.verdicts.size(), 2u);
    EXPECT_EQ(r1.verdicts[0].slots, (std::vector<std::string>{"VariableA", "VariableC"}));

    const auto patched = fixture_project("first_deposit_no_branch");
    const auto r2 = confirm_candidate(rule, rec, context_of(patched, "Vault.deposit"), patched.functions,
                                      patched.graph, patched.reach);
    EXPECT_FALSE(r2.confirmed);
    EXPECT_TRUE(r2.verdicts[0].confirmed);
    EXPECT_FALSE(r2.verdicts[1].confirmed);
}
