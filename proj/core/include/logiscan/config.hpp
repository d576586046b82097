#pragma once

#include "logiscan/gateway.hpp"

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace logiscan {

struct ScanConfig {
    std::filesystem::path project_root;
    std::string project_name;
    std::filesystem::path rules_dir;
    std::filesystem::path whitelist;
    ProviderConfig provider;
    std::vector<std::string> acl_modifiers;
    std::vector<std::string> exclusions;
    std::size_t token_budget = 3072;
    GatewayMode mode = GatewayMode::Replay;
    std::optional<std::filesystem::path> transcript;
    std::filesystem::path out_dir = ".";
    std::size_t max_in_flight = 4;

    /// Defaults: shipped rules and whitelist, default ACL set and exclusions.
    static ScanConfig defaults();

    /// Applies keys from a YAML config document on top of `*this`. Relative
    /// paths are resolved against `base_dir`. Throws ConfigError.
    void merge_yaml(std::string_view yaml_text, const std::filesystem::path& base_dir);
    void merge_file(const std::filesystem::path& file);

    /// Throws ConfigError unless the configuration can run: replay and record
    /// need a transcript, live and record need the API key variable set.
    void validate() const;

    /// SHA-256 over the settings that influence findings; paths, mode and
    /// secrets are left out so record and replay runs agree.
    std::string fingerprint() const;
};

} // namespace logiscan
