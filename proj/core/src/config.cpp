#include "logiscan/config.hpp"

#include "logiscan/callgraph.hpp"
#include "logiscan/errors.hpp"
#include "logiscan/project.hpp"
#include "logiscan/rules.hpp"

#include <nlohmann/json.hpp>
#include <yaml-cpp/yaml.h>

#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>

namespace logiscan {

namespace fs = std::filesystem;

ScanConfig ScanConfig::defaults()
{
    ScanConfig c;
    c.rules_dir = default_rules_dir();
    c.whitelist = default_whitelist_path();
    const auto& acl = default_acl_modifiers();
    c.acl_modifiers.assign(acl.begin(), acl.end());
    c.exclusions = default_exclusion_segments();
    return c;
}

void ScanConfig::merge_yaml(std::string_view yaml_text, const fs::path& base_dir)
{
    YAML::Node root;
    try {
        root = YAML::Load(std::string(yaml_text));
    } catch (const YAML::Exception& e) {
        throw ConfigError(std::string("config is not valid YAML: ") + e.what());
    }
    if (root.IsNull()) {
        return;
    }
    if (!root.IsMap()) {
        throw ConfigError("config must be a mapping");
    }
    static const std::set<std::string> known{"project",  "project_name", "rules",        "whitelist",
                                             "provider", "acl_modifiers", "exclusions",  "token_budget",
                                             "mode",     "transcript",   "out",          "max_in_flight"};
    auto path = [&](const YAML::Node& n) {
        fs::path p = n.as<std::string>();
        return p.is_relative() ? base_dir / p : p;
    };
    try {
        for (const auto& kv : root) {
            const auto key = kv.first.as<std::string>();
            if (!known.contains(key)) {
                throw ConfigError("unknown config key '" + key + "'");
            }
        }
        if (root["project"]) {
            project_root = path(root["project"]);
        }
        if (root["project_name"]) {
            project_name = root["project_name"].as<std::string>();
        }
        if (root["rules"]) {
            rules_dir = path(root["rules"]);
        }
        if (root["whitelist"]) {
            whitelist = path(root["whitelist"]);
        }
        if (root["transcript"]) {
            transcript = path(root["transcript"]);
        }
        if (root["out"]) {
            out_dir = path(root["out"]);
        }
        if (root["acl_modifiers"]) {
            acl_modifiers = root["acl_modifiers"].as<std::vector<std::string>>();
        }
        if (root["exclusions"]) {
            exclusions = root["exclusions"].as<std::vector<std::string>>();
        }
        if (root["token_budget"]) {
            token_budget = root["token_budget"].as<std::size_t>();
        }
        if (root["max_in_flight"]) {
            max_in_flight = root["max_in_flight"].as<std::size_t>();
        }
        if (root["mode"]) {
            const auto m = gateway_mode_from(root["mode"].as<std::string>());
            if (!m) {
                throw ConfigError("mode must be live, record or replay");
            }
            mode = *m;
        }
        if (const auto p = root["provider"]) {
            if (!p.IsMap()) {
                throw ConfigError("provider must be a mapping");
            }
            if (p["api_key"]) {
                throw ConfigError("API keys are read from the environment only; set provider.api_key_env");
            }
            if (p["endpoint"]) provider.endpoint = p["endpoint"].as<std::string>();
            if (p["model"]) provider.model = p["model"].as<std::string>();
            if (p["temperature"]) provider.temperature = p["temperature"].as<double>();
            if (p["max_context_tokens"]) provider.max_context_tokens = p["max_context_tokens"].as<std::size_t>();
            if (p["price_in_per_1k"]) provider.price_in_per_1k = p["price_in_per_1k"].as<double>();
            if (p["price_out_per_1k"]) provider.price_out_per_1k = p["price_out_per_1k"].as<double>();
            if (p["api_key_env"]) provider.api_key_env = p["api_key_env"].as<std::string>();
            if (p["timeout_seconds"]) provider.timeout_seconds = p["timeout_seconds"].as<int>();
        }
    } catch (const YAML::Exception& e) {
        throw ConfigError(std::string("bad config value: ") + e.what());
    }
}

void ScanConfig::merge_file(const fs::path& file)
{
    std::ifstream in(file);
    if (!in) {
        throw ConfigError("cannot read config " + file.string());
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    merge_yaml(buf.str(), file.parent_path());
}

void ScanConfig::validate() const
{
    if (project_root.empty()) {
        throw ConfigError("no project root given");
    }
    if (mode != GatewayMode::Live && !transcript) {
        throw ConfigError(std::string(to_string(mode)) + " mode requires a transcript path");
    }
    if (mode != GatewayMode::Replay) {
        const char* key = std::getenv(provider.api_key_env.c_str());
        if (!key || !*key) {
            throw ConfigError(std::string(to_string(mode)) + " mode requires the " + provider.api_key_env +
                              " environment variable");
        }
    }
    if (token_budget == 0) {
        throw ConfigError("token budget must be positive");
    }
    if (token_budget > provider.max_context_tokens) {
        throw ConfigError("token budget exceeds the provider context of " +
                          std::to_string(provider.max_context_tokens) + " tokens");
    }
    if (max_in_flight == 0) {
        throw ConfigError("max-in-flight must be at least 1");
    }
}

std::string ScanConfig::fingerprint() const
{
    nlohmann::ordered_json j;
    j["provider"] = {{"endpoint", provider.endpoint},
                     {"model", provider.model},
                     {"temperature", provider.temperature},
                     {"max_context_tokens", provider.max_context_tokens},
                     {"price_in_per_1k", provider.price_in_per_1k},
                     {"price_out_per_1k", provider.price_out_per_1k}};
    std::set<std::string> acl(acl_modifiers.begin(), acl_modifiers.end());
    std::set<std::string> excl(exclusions.begin(), exclusions.end());
    j["acl_modifiers"] = acl;
    j["exclusions"] = excl;
    j["token_budget"] = token_budget;
    return sha256_hex(j.dump());
}

} // namespace logiscan
