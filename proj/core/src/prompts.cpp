#include "logiscan/prompts.hpp"

#include "logiscan/errors.hpp"
#include "logiscan/parser.hpp"
#include "logiscan/source.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cctype>

namespace logiscan {

using nlohmann::json;

namespace {

std::string lower(std::string_view s)
{
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return out;
}

std::string trim(std::string_view s)
{
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string_view::npos) {
        return {};
    }
    return std::string(s.substr(b, s.find_last_not_of(" \t\r\n") - b + 1));
}

bool is_ident_char(char c)
{
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '$';
}

std::string collapse_ws(std::string_view s)
{
    std::string out;
    bool pending = false;
    for (const char c : s) {
        if (std::isspace(static_cast<unsigned char>(c))) {
            pending = !out.empty();
        } else {
            if (pending) {
                out += ' ';
                pending = false;
            }
            out += c;
        }
    }
    return out;
}

bool is_yes(const json& v)
{
    if (v.is_boolean()) {
        return v.get<bool>();
    }
    if (v.is_string()) {
        try {
            return parse_yes_no(v.get<std::string>());
        } catch (const UnparseableAnswer&) {
            return false;
        }
    }
    return false;
}

json first_object_or_throw(std::string_view text)
{
    const auto obj = first_json_object(text);
    if (!obj) {
        throw UnparseableAnswer("no JSON object in response: " + std::string(text.substr(0, 80)));
    }
    return json::parse(*obj);
}

} // namespace

const std::string& system_prompt()
{
    static const std::string prompt =
        "You are a smart contract auditor. You will be asked questions related to code properties. "
        "You can mimic answering them in the background five times and provide me with the most frequently "
        "appearing answer. Furthermore, please strictly adhere to the output format specified in the question; "
        "there is no need to explain your answer.";
    return prompt;
}

std::string build_scenario_prompt(const std::vector<std::string>& scenarios, std::string_view code)
{
    std::string format = "{";
    for (std::size_t i = 1; i <= scenarios.size(); ++i) {
        format += (i > 1 ? ", \"" : "\"") + std::to_string(i) + "\": \"Yes\" or \"No\"";
    }
    format += "}";
    std::string out = "Given the following smart contract code, answer the questions below and organize the result "
                      "in a json format like " + format + ".\n\n";
    for (std::size_t i = 0; i < scenarios.size(); ++i) {
        out += "\"" + std::to_string(i + 1) + "\": " + scenarios[i] + "?\n";
    }
    out += "\n";
    out += code;
    return out;
}

std::string build_property_prompt(const VulnRule& rule, std::string_view code)
{
    std::string sentence;
    for (const auto& s : rule.scenarios) {
        sentence += (sentence.empty() ? "" : " or ") + s;
    }
    sentence += " " + rule.property;
    std::string out = "Does the following smart contract code \"" + sentence + "\"? Answer only \"Yes\" or \"No\".\n\n";
    out += code;
    return out;
}

std::string build_recognition_prompt(const std::vector<RecognitionQuestion>& questions, std::string_view code)
{
    std::string out;
    std::string format = "{";
    for (std::size_t i = 0; i < questions.size(); ++i) {
        const auto& q = questions[i];
        out += "In this function, " + q.question + " Please answer in a section starts with \"" + q.slot + ":\".\n";
        format += (i ? ", \"" : "\"") + q.slot + "\":{\"Variable name\":\"Description\"}";
    }
    format += "}";
    out += "Please answer in the following json format: " + format + "\n\n";
    out += code;
    return out;
}

std::optional<std::string> first_json_object(std::string_view text)
{
    for (std::size_t start = text.find('{'); start != std::string_view::npos; start = text.find('{', start + 1)) {
        int depth = 0;
        bool in_string = false;
        for (std::size_t i = start; i < text.size(); ++i) {
            const char c = text[i];
            if (in_string) {
                if (c == '\\') {
                    ++i;
                } else if (c == '"') {
                    in_string = false;
                }
                continue;
            }
            if (c == '"') {
                in_string = true;
            } else if (c == '{') {
                ++depth;
            } else if (c == '}' && --depth == 0) {
                const auto candidate = text.substr(start, i - start + 1);
                if (json::accept(candidate)) {
                    return std::string(candidate);
                }
                break;
            }
        }
    }
    return std::nullopt;
}

std::map<std::size_t, bool> parse_scenario_answer(std::string_view text, std::size_t n)
{
    const json obj = first_object_or_throw(text);
    std::map<std::size_t, bool> out;
    for (std::size_t i = 1; i <= n; ++i) {
        out[i] = false;
    }
    for (const auto& [key, value] : obj.items()) {
        const auto k = trim(key);
        if (k.empty() || !std::all_of(k.begin(), k.end(), [](unsigned char c) { return std::isdigit(c); })) {
            continue;
        }
        const auto idx = std::stoul(k.size() > 6 ? "0" : k);
        if (idx >= 1 && idx <= n) {
            out[idx] = is_yes(value);
        }
    }
    return out;
}

bool parse_yes_no(std::string_view text)
{
    std::size_t i = 0;
    while (i < text.size() && !std::isalpha(static_cast<unsigned char>(text[i]))) {
        ++i;
    }
    std::size_t j = i;
    while (j < text.size() && std::isalpha(static_cast<unsigned char>(text[j]))) {
        ++j;
    }
    const auto word = lower(text.substr(i, j - i));
    if (word == "yes") {
        return true;
    }
    if (word == "no") {
        return false;
    }
    throw UnparseableAnswer("expected Yes or No, got: " + std::string(text.substr(0, 80)));
}

RecognitionAnswer parse_recognition_answer(std::string_view text, const std::vector<std::string>& slots)
{
    const json obj = first_object_or_throw(text);
    RecognitionAnswer out;
    for (const auto& slot : slots) {
        const auto it = obj.find(slot);
        if (it == obj.end() || !it->is_object() || it->empty()) {
            continue;
        }
        const auto first = it->items().begin();
        RecognizedItem item;
        item.name = trim(first.key());
        if (first.value().is_string()) {
            item.description = trim(first.value().get<std::string>());
        }
        out.emplace(slot, std::move(item));
    }
    return out;
}

bool name_occurs_in(std::string_view name, std::string_view code)
{
    const std::string plain = strip_comments(code);
    const auto expr = parse_expression_text(name);
    if (expr && expr->kind == ExprKind::Identifier) {
        const auto& id = expr->name;
        for (auto pos = plain.find(id); pos != std::string::npos; pos = plain.find(id, pos + 1)) {
            const bool left_ok = pos == 0 || !is_ident_char(plain[pos - 1]);
            const bool right_ok = pos + id.size() >= plain.size() || !is_ident_char(plain[pos + id.size()]);
            if (left_ok && right_ok) {
                return true;
            }
        }
        return false;
    }
    const auto needle = collapse_ws(name);
    return !needle.empty() && collapse_ws(plain).find(needle) != std::string::npos;
}

RecognitionCheck validate_recognition(const RecognitionAnswer& answer,
                                      const std::vector<std::string>& slots,
                                      std::string_view context_text)
{
    RecognitionCheck out;
    for (const auto& slot : slots) {
        const auto it = answer.find(slot);
        if (it == answer.end()) {
            out.reason = slot + ": no answer";
            return out;
        }
        const auto& item = it->second;
        if (item.name.empty() || !name_occurs_in(item.name, context_text)) {
            out.reason = slot + ": '" + item.name + "' does not occur in the code";
            return out;
        }
        if (trim(item.description).empty()) {
            out.reason = slot + ": empty description";
            return out;
        }
    }
    out.ok = true;
    for (const auto& slot : slots) {
        out.items.emplace(slot, answer.at(slot));
    }
    return out;
}

} // namespace logiscan
