#pragma once

#include "logiscan/callgraph.hpp"
#include "logiscan/rules.hpp"

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace logiscan {

/// The auditor system prompt sent with every query.
const std::string& system_prompt();

/// One numbered yes/no question per scenario, all in a single prompt.
std::string build_scenario_prompt(const std::vector<std::string>& scenarios, std::string_view code);

/// Asks whether the code matches the joined scenario and property sentence.
std::string build_property_prompt(const VulnRule& rule, std::string_view code);

/// One question per recognition slot followed by the JSON answer format.
std::string build_recognition_prompt(const std::vector<RecognitionQuestion>& questions, std::string_view code);

/// First balanced `{...}` block in `text` that parses as a JSON object,
/// returned as its source text. nullopt if there is none.
std::optional<std::string> first_json_object(std::string_view text);

/// Keys "1".."n" mapped to yes (true) / no (false). Missing keys and
/// anything other than a yes value read as no. Throws UnparseableAnswer when
/// the response holds no JSON object.
std::map<std::size_t, bool> parse_scenario_answer(std::string_view text, std::size_t n);

/// Leading yes/no token, case-insensitive, ignoring quotes and punctuation.
/// Throws UnparseableAnswer otherwise.
bool parse_yes_no(std::string_view text);

struct RecognizedItem {
    std::string name;
    std::string description;
    bool operator==(const RecognizedItem&) const = default;
};

using RecognitionAnswer = std::map<std::string, RecognizedItem>;

/// Reads `{"Slot":{"name":"description"}, ...}`. Slots that are missing or
/// not objects are left out (validation rejects them). Throws
/// UnparseableAnswer when the response holds no JSON object.
RecognitionAnswer parse_recognition_answer(std::string_view text, const std::vector<std::string>& slots);

struct RecognitionCheck {
    bool ok = false;
    std::string reason;
    RecognitionAnswer items;
};

/// Every slot needs an answer whose name occurs in `context_text` and whose
/// description is nonempty. A plain identifier must appear as a whole token
/// outside comments; anything longer must appear verbatim modulo whitespace.
RecognitionCheck validate_recognition(const RecognitionAnswer& answer,
                                      const std::vector<std::string>& slots,
                                      std::string_view context_text);

/// True if `name` occurs in `code` under the rules of validate_recognition.
bool name_occurs_in(std::string_view name, std::string_view code);

} // namespace logiscan
