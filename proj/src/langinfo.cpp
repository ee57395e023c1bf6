#include "lrlforge/langinfo.hpp"

#include <fstream>
#include <sstream>

#include "lrlforge/error.hpp"
#include "lrlforge/unicode.hpp"

namespace lrlforge::langinfo {

LanguageTable LanguageTable::builtin() {
    LanguageTable t;
    auto add = [&t](std::string code, std::string name, std::string family, std::string script,
                    std::optional<double> hdi = std::nullopt,
                    std::optional<double> web_share = std::nullopt) {
        t.entries_.push_back({std::move(code), std::move(name), std::move(family),
                              std::move(script), hdi, web_share});
    };
    add("en", "English", "Indo-European", "Latin", 0.93, 49.0);
    add("lb", "Luxembourgish", "Indo-European", "Latin", 0.93, 0.01);
    add("de", "German", "Indo-European", "Latin", 0.95, 5.0);
    add("fr", "French", "Indo-European", "Latin", 0.91, 4.3);
    add("nl", "Dutch", "Indo-European", "Latin", 0.95, 1.1);
    add("uk", "Ukrainian", "Indo-European", "Cyrillic", 0.73, 0.6);
    add("as", "Assamese", "Indo-European", "Bengali", 0.64, 0.01);
    add("kha", "Khasi", "Austroasiatic", "Latin", 0.64, 0.001);
    add("oc", "Occitan", "Indo-European", "Latin", 0.91, 0.001);
    add("ms", "Standard Malay", "Austronesian", "Latin", 0.81, 0.3);
    add("dz", "Dzongkha", "Sino-Tibetan", "Tibetan", 0.68, 0.0001);
    add("ti", "Tigrinya", "Afro-Asiatic", "Ethiopic", 0.49, 0.0001);
    return t;
}

LanguageTable LanguageTable::load_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error("langinfo/unreadable", "cannot read " + path.string());
    LanguageTable t;
    std::string line;
    size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (unicode::trim(line).empty()) continue;
        std::vector<std::string> cols;
        std::stringstream ss(line);
        std::string col;
        while (std::getline(ss, col, ',')) cols.push_back(col);
        while (cols.size() < 6) cols.push_back("");
        if (line_no == 1 && cols[0] == "code") continue;  // header
        if (cols[0].empty() || cols[1].empty() || cols[2].empty())
            throw Error("langinfo/bad-row",
                        "line " + std::to_string(line_no) + ": code/name/family required");
        LanguageInfo info;
        info.code = cols[0];
        info.display_name = cols[1];
        info.family = cols[2];
        info.script = cols[3];
        if (!cols[4].empty()) info.hdi = std::stod(cols[4]);
        if (!cols[5].empty()) info.web_share = std::stod(cols[5]);
        t.entries_.push_back(std::move(info));
    }
    if (t.entries_.empty()) throw Error("langinfo/empty", "no rows in " + path.string());
    return t;
}

const LanguageInfo* LanguageTable::find(const std::string& code) const {
    for (const auto& e : entries_)
        if (e.code == code) return &e;
    return nullptr;
}

const LanguageInfo& LanguageTable::require(const std::string& code) const {
    const LanguageInfo* info = find(code);
    if (!info) throw Error("langinfo/unknown-code", "unknown language code: " + code);
    return *info;
}

std::string LanguageTable::display_name(const std::string& code) const {
    return require(code).display_name;
}

bool LanguageTable::is_low_resource(const std::string& code) const {
    const LanguageInfo& info = require(code);
    return info.web_share.has_value() && *info.web_share < 0.1;
}

HdiTier hdi_tier(double hdi) {
    if (hdi >= 0.80) return HdiTier::VERY_HIGH;
    if (hdi >= 0.70) return HdiTier::HIGH;
    if (hdi >= 0.55) return HdiTier::MEDIUM;
    return HdiTier::LOW;
}

std::string to_string(HdiTier tier) {
    switch (tier) {
        case HdiTier::VERY_HIGH: return "VeryHigh";
        case HdiTier::HIGH: return "High";
        case HdiTier::MEDIUM: return "Medium";
        case HdiTier::LOW: return "Low";
    }
    return "Low";
}

}  // namespace lrlforge::langinfo
