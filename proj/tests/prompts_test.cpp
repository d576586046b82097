#include "logiscan/errors.hpp"
#include "logiscan/prompts.hpp"
#include "logiscan/rules.hpp"

#include <gtest/gtest.h>

using namespace logiscan;

TEST(Prompts, SystemPromptIsTheAuditorTemplate)
{
    EXPECT_EQ(system_prompt(),
              "You are a smart contract auditor. You will be asked questions related to code properties. You can "
              "mimic answering them in the background five times and provide me with the most frequently appearing "
              "answer. Furthermore, please strictly adhere to the output format specified in the question; there is "
              "no need to explain your answer.");
}

TEST(Prompts, ScenarioPromptNumbersEveryScenario)
{
    const auto p = build_scenario_prompt({"buy some tokens", "sell some tokens"}, "function f() {}");
    EXPECT_EQ(p, "Given the following smart contract code, answer the questions below and organize the result in a "
                 "json format like {\"1\": \"Yes\" or \"No\", \"2\": \"Yes\" or \"No\"}.\n\n"
                 "\"1\": buy some tokens?\n"
                 "\"2\": sell some tokens?\n\n"
                 "function f() {}");
}

TEST(Prompts, PropertyPromptJoinsScenarioAndProperty)
{
    const auto rules = load_rules(default_rules_dir());
    const auto& rule = rule_for_id(rules, "risky-first-deposit");
    EXPECT_EQ(build_property_prompt(rule, "CODE"),
              "Does the following smart contract code \"deposit/mint/add the liquidity pool/amount/share and set the "
              "total share to the number of first deposit when the supply/liquidity is 0\"? Answer only \"Yes\" or "
              "\"No\".\n\nCODE");
}

TEST(Prompts, RecognitionPromptMatchesExample)
{
    const auto rules = load_rules(default_rules_dir());
    const auto& rule = rule_for_id(rules, "risky-first-deposit");
    const auto p = build_recognition_prompt(rule.recognition, "CODE");
    EXPECT_EQ(p,
              "In this function, which variable holds the value of total minted share or amount? Please answer in a "
              "section starts with \"VariableA:\".\n"
              "In this function, which variable or function holds the total supply/liquidity AND is used by the "
              "conditional branch to determine the supply/liquidity is 0? Please answer in a section starts with "
              "\"VariableB:\".\n"
              "In this function, which variable or function holds the value of the deposit/mint/add amount? Please "
              "answer in a section starts with \"VariableC:\".\n"
              "Please answer in the following json format: {\"VariableA\":{\"Variable name\":\"Description\"}, "
              "\"VariableB\":{\"Variable name\":\"Description\"}, \"VariableC\":{\"Variable name\":\"Description\"}}"
              "\n\nCODE");
}

TEST(Answers, FirstJsonObjectSkipsNoise)
{
    EXPECT_EQ(first_json_object("Sure! {\"1\": \"Yes\"} done"), "{\"1\": \"Yes\"}");
    EXPECT_EQ(first_json_object("{broken {\"a\": \"}\"}"), "{\"a\": \"}\"}");
    EXPECT_EQ(first_json_object("```json\n{\"a\": {\"b\": 1}}\n```"), "{\"a\": {\"b\": 1}}");
    EXPECT_FALSE(first_json_object("no json here"));
    EXPECT_FALSE(first_json_object("{unbalanced"));
}

TEST(Answers, ScenarioAnswer)
{
    const auto a = parse_scenario_answer(R"({"1": "Yes", "2": "no", "3": true, "9": "Yes"})", 4);
    EXPECT_EQ(a, (std::map<std::size_t, bool>{{1, true}, {2, false}, {3, true}, {4, false}}));
    EXPECT_EQ(parse_scenario_answer(R"({"1": "Yes."})", 1).at(1), true);
    EXPECT_EQ(parse_scenario_answer(R"({"1": "maybe"})", 1).at(1), false);
    EXPECT_THROW(parse_scenario_answer("Yes", 1), UnparseableAnswer);
}

TEST(Answers, YesNo)
{
    EXPECT_TRUE(parse_yes_no("Yes"));
    EXPECT_TRUE(parse_yes_no("\"yes\"."));
    EXPECT_FALSE(parse_yes_no("No, because"));
    EXPECT_FALSE(parse_yes_no("  NO"));
    EXPECT_THROW(parse_yes_no("Perhaps"), UnparseableAnswer);
    EXPECT_THROW(parse_yes_no(""), UnparseableAnswer);
}

TEST(Answers, RecognitionAnswer)
{
    const auto a = parse_recognition_answer(
        R"(Here: {"VariableA": {"_shares": "minted"}, "VariableB": "not an object", "Other": {"x": "y"}})",
        {"VariableA", "VariableB"});
    ASSERT_EQ(a.size(), 1u);
    EXPECT_EQ(a.at("VariableA"), (RecognizedItem{"_shares", "minted"}));
    EXPECT_THROW(parse_recognition_answer("none", {"VariableA"}), UnparseableAnswer);
}

TEST(Answers, NameOccurrence)
{
    const std::string code = "function f(uint _amount) { _shares = _amount; // totalAssets\n if (totalSupply() == 0) {} }";
    EXPECT_TRUE(name_occurs_in("_amount", code));
    EXPECT_FALSE(name_occurs_in("_amoun", code));
    EXPECT_FALSE(name_occurs_in("totalAssets", code));
    EXPECT_TRUE(name_occurs_in("totalSupply()", code));
    EXPECT_TRUE(name_occurs_in("_shares  =   _amount", code));
    EXPECT_FALSE(name_occurs_in("balances[msg.sender]", code));
}

TEST(Answers, RecognitionValidation)
{
    const std::string code = "function f(uint a) { b = a; }";
    RecognitionAnswer ok{{"A", {"a", "input"}}, {"B", {"b", "output"}}};
    EXPECT_TRUE(validate_recognition(ok, {"A", "B"}, code).ok);

    auto missing = ok;
    missing.erase("B");
    const auto m = validate_recognition(missing, {"A", "B"}, code);
    EXPECT_FALSE(m.ok);
    EXPECT_NE(m.reason.find("B"), std::string::npos);

    auto hallucinated = ok;
    hallucinated["B"].name = "c";
    EXPECT_FALSE(validate_recognition(hallucinated, {"A", "B"}, code).ok);

    auto undescribed = ok;
    undescribed["A"].description.clear();
    EXPECT_FALSE(validate_recognition(undescribed, {"A", "B"}, code).ok);
}
