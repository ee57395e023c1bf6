#include "lrlforge/config.hpp"

#include <cstdlib>
#include <fstream>

#include <json.hpp>

#include "lrlforge/error.hpp"

using nlohmann::json;

namespace lrlforge::config {

AppConfig load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error("config/unreadable", "cannot read config file " + path.string());
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw Error("config/parse", std::string("bad config: ") + e.what());
    }

    AppConfig cfg;
    for (const auto& [name, pj] : j.value("profiles", json::object()).items()) {
        gateway::EndpointProfile p;
        p.name = name;
        p.base_url = pj.at("base_url").get<std::string>();
        p.model_id = pj.value("model_id", "");
        p.auth_env_var = pj.value("auth_env_var", "");
        p.max_concurrency = pj.value("max_concurrency", 4);
        p.timeout_s = pj.value("timeout_s", 60.0);
        if (p.max_concurrency < 1)
            throw Error("config/bad-profile", "profile " + name + ": max_concurrency must be >= 1");
        cfg.profiles[name] = std::move(p);
    }
    if (j.contains("default_params")) {
        const auto& d = j["default_params"];
        cfg.default_params.temperature = d.value("temperature", 0.1);
        cfg.default_params.top_p = d.value("top_p", 0.9);
        cfg.default_params.max_new_tokens = d.value("max_new_tokens", 512);
    }
    cfg.subword_vocab_path = j.value("subword_vocab_path", "");
    cfg.lang_table_path = j.value("lang_table_path", "");
    cfg.data_root = j.value("data_root", "datasets");
    return cfg;
}

AppConfig resolve(const std::optional<std::filesystem::path>& cli_path) {
    if (cli_path) return load(*cli_path);
    if (const char* env = std::getenv("LRLFORGE_CONFIG")) return load(env);
    return AppConfig{};
}

const gateway::EndpointProfile& require_profile(const AppConfig& cfg, const std::string& name) {
    auto it = cfg.profiles.find(name);
    if (it == cfg.profiles.end())
        throw Error("config/unknown-profile", "profile not found in config: " + name);
    return it->second;
}

}  // namespace lrlforge::config
