#pragma once

// Synthetic candidates with known ground truth for the static-confirmation
// stage. Each group has the same number of vulnerable and correct variants;
// the scripted model answers "Yes" to all of them, so only the static checks
// can tell them apart.

#include "scripted_transport.hpp"

#include <nlohmann/json.hpp>

#include <array>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

namespace logiscan::testing {

struct SeededCandidate {
    std::string rule_id;
    std::string function_name;
    bool vulnerable = false;
};

struct SeededCorpus {
    std::vector<SeededCandidate> candidates;
    std::vector<ScriptedAnswer> answers;
};

/// `{"Slot": {"name": "description"}, ...}`
inline std::string recognition_json(const std::vector<std::array<std::string, 3>>& items)
{
    nlohmann::ordered_json j = nlohmann::ordered_json::object();
    for (const auto& [slot, name, description] : items) {
        j[slot] = {{name, description}};
    }
    return j.dump();
}

inline SeededCorpus write_seeded_corpus(const std::filesystem::path& root, int per_group = 4)
{
    SeededCorpus corpus;
    std::filesystem::create_directories(root / "contracts");
    auto emit = [&](const std::string& file, const std::string& text) {
        std::ofstream(root / "contracts" / file) << text;
    };
    const std::string yes = R"({"1": "Yes"})";

    for (int k = 0; k < 2 * per_group; ++k) {
        const bool vuln = k % 2 == 0;
        const auto n = std::to_string(k);

        // Checkpoint order: balance update before the user checkpoint.
        {
            const auto fn = "move" + n;
            const auto bal = "stakes" + n + "[msg.sender] -= amount";
            const auto cp = "gauge.userCheckpoint(msg.sender)";
            const std::string update = "        " + bal + ";\n        stakes" + n + "[to] += amount;\n";
            const std::string checkpoint = "        gauge.userCheckpoint(msg.sender);\n        gauge.userCheckpoint(to);\n";
            emit("Staker" + n + ".sol",
                 "contract Staker" + n + " {\n    IGauge gauge;\n    mapping(address => uint256) stakes" + n +
                     ";\n    function " + fn + "(address to, uint256 amount) external {\n" +
                     (vuln ? update + checkpoint : checkpoint + update) + "    }\n}\n");
            corpus.candidates.push_back({"wrong-checkpoint-order", fn, vuln});
            corpus.answers.push_back({"wrong-checkpoint-order", fn, yes, "Yes",
                                      recognition_json({{{"StatementA", bal, "balance update"}},
                                                        {{"StatementB", cp, "checkpoint"}}})});
        }

        // Interest accrual: loan bookkeeping before the accrual call.
        {
            const auto fn = "borrow" + n;
            const auto loan = "loans[msg.sender] += amount";
            const std::string book = "        " + std::string(loan) + ";\n";
            const std::string accrue = "        accrueInterest();\n";
            emit("Market" + n + ".sol",
                 "contract Market" + n + " {\n    mapping(address => uint256) loans;\n    uint256 index;\n" +
                     "    function " + fn + "(uint256 amount) external {\n" + (vuln ? book + accrue : accrue + book) +
                     "    }\n    function accrueInterest() internal { index += 1; }\n}\n");
            corpus.candidates.push_back({"wrong-interest-rate-order", fn, vuln});
            corpus.answers.push_back({"wrong-interest-rate-order", fn, yes, "Yes",
                                      recognition_json({{{"StatementA", loan, "loan update"}},
                                                        {{"StatementB", "accrueInterest()", "accrual"}}})});
        }

        // First deposit: special case when the supply is zero.
        {
            const auto fn = "deposit" + n;
            const std::string body = vuln ? "        if (totalSupply() == 0) {\n            minted = amt;\n"
                                            "        } else {\n            minted = amt * totalSupply() / pool;\n"
                                            "        }\n"
                                          : "        minted = amt * totalSupply() / (pool + 1);\n";
            emit("Pool" + n + ".sol", "contract Pool" + n + " is ERC20 {\n    uint256 pool;\n    function " + fn +
                                          "(uint256 amt) public {\n        uint256 minted = 0;\n" + body +
                                          "        _mint(msg.sender, minted);\n    }\n}\n");
            corpus.candidates.push_back({"risky-first-deposit", fn, vuln});
            corpus.answers.push_back(
                {"risky-first-deposit", fn, yes, "Yes",
                 recognition_json({{{"VariableA", "minted", "shares"}},
                                   {{"VariableB", "totalSupply()", "supply"}},
                                   {{"VariableC", "amt", "amount"}}})});
        }

        // Front running: the beneficiary comes from a parameter.
        {
            const auto fn = "claim" + n;
            const std::string dest = vuln ? "to" : "treasury";
            emit("Claim" + n + ".sol", "contract Claim" + n +
                                           " {\n    address treasury;\n    mapping(address => uint256) credit;\n"
                                           "    function " + fn + "(address to, uint256 amt) public {\n        _credit(" +
                                           dest + ", amt);\n    }\n"
                                           "    function _credit(address who, uint256 amt) internal { credit[who] += amt; }\n}\n");
            corpus.candidates.push_back({"front-running", fn, vuln});
            corpus.answers.push_back({"front-running", fn, yes, "Yes",
                                      recognition_json({{{"CallA", "_credit(" + dest + ", amt)", "credit"}},
                                                        {{"ArgumentB", dest, "beneficiary"}}})});
        }
    }
    return corpus;
}

} // namespace logiscan::testing
