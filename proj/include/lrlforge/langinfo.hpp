#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace lrlforge::langinfo {

struct LanguageInfo {
    std::string code;
    std::string display_name;
    std::string family;
    std::string script;
    std::optional<double> hdi;        // only where a country mapping exists
    std::optional<double> web_share;  // percent of web content
};

class LanguageTable {
public:
    static LanguageTable builtin();
    // CSV columns: code,display_name,family,script,hdi,web_share (hdi and
    // web_share may be blank). A header row is skipped when present.
    static LanguageTable load_csv(const std::filesystem::path& path);

    const LanguageInfo* find(const std::string& code) const;
    const LanguageInfo& require(const std::string& code) const;
    std::string display_name(const std::string& code) const;  // throws on unknown code

    // web share < 0.1% counts as low-resource
    bool is_low_resource(const std::string& code) const;

    const std::vector<LanguageInfo>& all() const { return entries_; }

private:
    std::vector<LanguageInfo> entries_;
};

enum class HdiTier { VERY_HIGH, HIGH, MEDIUM, LOW };

// Tier cutoffs: VeryHigh >= 0.80, High [0.70, 0.80), Medium [0.55, 0.70),
// Low < 0.55.
HdiTier hdi_tier(double hdi);
std::string to_string(HdiTier tier);

}  // namespace lrlforge::langinfo
