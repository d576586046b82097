#include "logiscan/errors.hpp"
#include "logiscan/project.hpp"
#include "logiscan/rules.hpp"
#include "support/solidity.hpp"

#include <gtest/gtest.h>

#include <fstream>
#include <random>

using namespace logiscan;
using namespace logiscan::testing;
namespace fs = std::filesystem;

namespace {

struct TempDir {
    fs::path path;
    TempDir()
    {
        static std::mt19937_64 rng(std::random_device{}());
        path = fs::temp_directory_path() / ("logiscan-test-" + std::to_string(rng()));
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
    void write(const std::string& rel, const std::string& text = "contract X {}\n") const
    {
        fs::create_directories((path / rel).parent_path());
        std::ofstream(path / rel) << text;
    }
};

std::vector<std::string> included_paths(const ProjectLayout& l)
{
    std::vector<std::string> out;
    for (const auto& f : l.included) {
        out.push_back(f->path());
    }
    return out;
}

} // namespace

TEST(Discover, ExcludesBySegmentCaseInsensitively)
{
    TempDir d;
    d.write("contracts/Vault.sol");
    d.write("contracts/core/Pool.sol");
    d.write("node_modules/@oz/ERC20.sol");
    d.write("contracts/Mocks/MockToken.sol");
    d.write("Test/VaultTest.sol");
    d.write("contracts/readme.md");
    d.write("contracts/testing.sol");  // file name, not a directory segment

    const auto layout = discover_sources(d.path);
    EXPECT_EQ(included_paths(layout),
              (std::vector<std::string>{"contracts/Vault.sol", "contracts/core/Pool.sol", "contracts/testing.sol"}));
    ASSERT_EQ(layout.excluded.size(), 3u);
    std::map<std::string, std::string> reasons;
    for (const auto& e : layout.excluded) {
        reasons[e.path] = e.reason;
    }
    EXPECT_EQ(reasons["node_modules/@oz/ERC20.sol"], "node_modules");
    EXPECT_EQ(reasons["contracts/Mocks/MockToken.sol"], "mocks");
    EXPECT_EQ(reasons["Test/VaultTest.sol"], "test");
}

TEST(Discover, CustomExclusionsReplaceDefaults)
{
    TempDir d;
    d.write("test/A.sol");
    d.write("vendor/B.sol");
    const auto layout = discover_sources(d.path, {"vendor"});
    EXPECT_EQ(included_paths(layout), std::vector<std::string>{"test/A.sol"});
}

TEST(Discover, EveryFileIsIncludedOrExcluded)
{
    TempDir d;
    const std::vector<std::string> dirs{"a", "test", "lib", "b/mock", "c/d"};
    int n = 0;
    for (const auto& dir : dirs) {
        for (int i = 0; i < 3; ++i) {
            d.write(dir + "/F" + std::to_string(n++) + ".sol");
        }
    }
    const auto layout = discover_sources(d.path);
    EXPECT_EQ(layout.included.size() + layout.excluded.size(), static_cast<std::size_t>(n));
}

TEST(Discover, MissingRootThrows)
{
    EXPECT_THROW(discover_sources("/nonexistent/logiscan/root"), IoError);
}

TEST(Signature, CanonicalForm)
{
    const auto p = mini_project(R"(contract T is ERC20 {
    function transferFrom(address from, address to, uint amount) public returns (bool) { return true; }
    function _x(uint8 a, bytes memory b, string calldata c) internal {}
})");
    EXPECT_EQ(canonical_signature(p.fn("T.transferFrom"), "ERC20"),
              "public ERC20.transferFrom(address,address,uint256)");
    EXPECT_EQ(canonical_signature(p.fn("T._x"), "T"), "internal T._x(uint8,bytes,string)");
}

TEST(Whitelist, MatchesOwnContractOrDirectBase)
{
    const auto wl = SignatureSet::parse("# comment\n\npublic ERC20.transfer(address,uint256)\n");
    EXPECT_EQ(wl.size(), 1u);
    const auto p = mini_project(R"(
contract ERC20 { function transfer(address to, uint256 v) public returns (bool) { return true; } }
contract Token is ERC20 { function transfer(address to, uint v) public returns (bool) { return true; } }
contract Other { function transfer(address to, uint256 v) public returns (bool) { return true; } }
contract Deep is Token { function transfer(address to, uint256 v) public returns (bool) { return true; } }
)");
    EXPECT_TRUE(is_whitelisted(p.fn("ERC20.transfer"), wl));
    EXPECT_TRUE(is_whitelisted(p.fn("Token.transfer"), wl));
    EXPECT_FALSE(is_whitelisted(p.fn("Other.transfer"), wl));
    EXPECT_FALSE(is_whitelisted(p.fn("Deep.transfer"), wl));

    const auto kept = filter_openzeppelin(p.functions, wl);
    ASSERT_EQ(kept.size(), 2u);
    EXPECT_EQ(kept[0].contract, "Other");
    EXPECT_EQ(kept[1].contract, "Deep");
    EXPECT_FALSE(is_whitelisted(p.fn("Other.transfer"), SignatureSet{}));
}

TEST(Whitelist, RejectsMalformedEntries)
{
    EXPECT_TRUE(SignatureSet::well_formed("internal SafeMath.add(uint256,uint256)"));
    EXPECT_FALSE(SignatureSet::well_formed("SafeMath.add(uint256)"));
    EXPECT_FALSE(SignatureSet::well_formed("public SafeMath.add(uint256, uint256)"));
    EXPECT_THROW(SignatureSet::parse("public add(uint256)\n"), Error);
}

TEST(Whitelist, ShippedFileLoadsAndIsWellFormed)
{
    const auto wl = SignatureSet::load(default_whitelist_path());
    EXPECT_GT(wl.size(), 40u);
    for (const auto& sig : wl.entries()) {
        EXPECT_TRUE(SignatureSet::well_formed(sig)) << sig;
    }
    EXPECT_TRUE(wl.contains("public ERC20.transferFrom(address,address,uint256)"));
}
