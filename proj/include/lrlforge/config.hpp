#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>

#include "lrlforge/gateway.hpp"

namespace lrlforge::config {

struct AppConfig {
    std::map<std::string, gateway::EndpointProfile> profiles;
    gateway::GenerationParams default_params;
    std::string subword_vocab_path;
    std::string lang_table_path;
    std::string data_root = "datasets";
};

AppConfig load(const std::filesystem::path& path);

// Resolution order: explicit CLI path, then LRLFORGE_CONFIG, then defaults.
AppConfig resolve(const std::optional<std::filesystem::path>& cli_path);

const gateway::EndpointProfile& require_profile(const AppConfig& cfg, const std::string& name);

}  // namespace lrlforge::config
