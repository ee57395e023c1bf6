#include "lrlforge/unicode.hpp"

#include <unordered_map>

namespace lrlforge::unicode {

std::vector<char32_t> decode(const std::string& utf8) {
    std::vector<char32_t> out;
    out.reserve(utf8.size());
    size_t i = 0;
    const size_t n = utf8.size();
    while (i < n) {
        unsigned char b0 = utf8[i];
        char32_t cp = 0xFFFD;
        size_t len = 1;
        if (b0 < 0x80) {
            cp = b0;
        } else if ((b0 & 0xE0) == 0xC0 && i + 1 < n && (utf8[i + 1] & 0xC0) == 0x80) {
            cp = (b0 & 0x1F) << 6 | (utf8[i + 1] & 0x3F);
            len = 2;
            if (cp < 0x80) cp = 0xFFFD;
        } else if ((b0 & 0xF0) == 0xE0 && i + 2 < n && (utf8[i + 1] & 0xC0) == 0x80 &&
                   (utf8[i + 2] & 0xC0) == 0x80) {
            cp = (b0 & 0x0F) << 12 | (utf8[i + 1] & 0x3F) << 6 | (utf8[i + 2] & 0x3F);
            len = 3;
            if (cp < 0x800 || (cp >= 0xD800 && cp <= 0xDFFF)) cp = 0xFFFD;
        } else if ((b0 & 0xF8) == 0xF0 && i + 3 < n && (utf8[i + 1] & 0xC0) == 0x80 &&
                   (utf8[i + 2] & 0xC0) == 0x80 && (utf8[i + 3] & 0xC0) == 0x80) {
            cp = (b0 & 0x07) << 18 | (utf8[i + 1] & 0x3F) << 12 | (utf8[i + 2] & 0x3F) << 6 |
                 (utf8[i + 3] & 0x3F);
            len = 4;
            if (cp < 0x10000 || cp > 0x10FFFF) cp = 0xFFFD;
        }
        out.push_back(cp);
        i += len;
    }
    return out;
}

void append_utf8(std::string& out, char32_t cp) {
    if (cp < 0x80) {
        out.push_back(static_cast<char>(cp));
    } else if (cp < 0x800) {
        out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    } else if (cp < 0x10000) {
        out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    } else {
        out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    }
}

std::string encode(const std::vector<char32_t>& cps) {
    std::string out;
    out.reserve(cps.size());
    for (char32_t cp : cps) append_utf8(out, cp);
    return out;
}

bool is_space(char32_t cp) {
    switch (cp) {
        case 0x09:
        case 0x0A:
        case 0x0B:
        case 0x0C:
        case 0x0D:
        case 0x20:
        case 0x85:
        case 0xA0:
        case 0x1680:
        case 0x2028:
        case 0x2029:
        case 0x202F:
        case 0x205F:
        case 0x3000:
            return true;
        default:
            return cp >= 0x2000 && cp <= 0x200A;
    }
}

bool is_punct(char32_t cp) {
    if (cp < 0x80) {
        return (cp >= 0x21 && cp <= 0x2F) || (cp >= 0x3A && cp <= 0x40) ||
               (cp >= 0x5B && cp <= 0x60) || (cp >= 0x7B && cp <= 0x7E);
    }
    // Latin-1 punctuation
    if (cp == 0xA1 || cp == 0xA7 || cp == 0xAB || cp == 0xB6 || cp == 0xB7 || cp == 0xBB ||
        cp == 0xBF)
        return true;
    // General Punctuation block (dashes, curly quotes, ellipsis, ...)
    if (cp >= 0x2010 && cp <= 0x2027) return true;
    if (cp >= 0x2030 && cp <= 0x205E) return true;
    // CJK punctuation and fullwidth forms commonly seen in corpora
    if (cp >= 0x3001 && cp <= 0x3011) return true;
    if (cp >= 0xFF01 && cp <= 0xFF0F) return true;
    if (cp >= 0xFF1A && cp <= 0xFF20) return true;
    return false;
}

namespace {

// (base << 32) | combining mark -> precomposed form. Covers the Latin
// alphabets of the supported languages (Luxembourgish, German, French, ...).
const std::unordered_map<uint64_t, char32_t>& composition_table() {
    static const std::unordered_map<uint64_t, char32_t> table = [] {
        std::unordered_map<uint64_t, char32_t> t;
        auto add = [&t](char32_t base, char32_t mark, char32_t composed) {
            t[(static_cast<uint64_t>(base) << 32) | mark] = composed;
        };
        // grave 0300, acute 0301, circumflex 0302, tilde 0303, diaeresis 0308,
        // ring 030A, cedilla 0327
        add(U'A', 0x300, 0xC0); add(U'A', 0x301, 0xC1); add(U'A', 0x302, 0xC2);
        add(U'A', 0x303, 0xC3); add(U'A', 0x308, 0xC4); add(U'A', 0x30A, 0xC5);
        add(U'C', 0x327, 0xC7);
        add(U'E', 0x300, 0xC8); add(U'E', 0x301, 0xC9); add(U'E', 0x302, 0xCA);
        add(U'E', 0x308, 0xCB);
        add(U'I', 0x300, 0xCC); add(U'I', 0x301, 0xCD); add(U'I', 0x302, 0xCE);
        add(U'I', 0x308, 0xCF);
        add(U'N', 0x303, 0xD1);
        add(U'O', 0x300, 0xD2); add(U'O', 0x301, 0xD3); add(U'O', 0x302, 0xD4);
        add(U'O', 0x303, 0xD5); add(U'O', 0x308, 0xD6);
        add(U'U', 0x300, 0xD9); add(U'U', 0x301, 0xDA); add(U'U', 0x302, 0xDB);
        add(U'U', 0x308, 0xDC);
        add(U'Y', 0x301, 0xDD);
        add(U'a', 0x300, 0xE0); add(U'a', 0x301, 0xE1); add(U'a', 0x302, 0xE2);
        add(U'a', 0x303, 0xE3); add(U'a', 0x308, 0xE4); add(U'a', 0x30A, 0xE5);
        add(U'c', 0x327, 0xE7);
        add(U'e', 0x300, 0xE8); add(U'e', 0x301, 0xE9); add(U'e', 0x302, 0xEA);
        add(U'e', 0x308, 0xEB);
        add(U'i', 0x300, 0xEC); add(U'i', 0x301, 0xED); add(U'i', 0x302, 0xEE);
        add(U'i', 0x308, 0xEF);
        add(U'n', 0x303, 0xF1);
        add(U'o', 0x300, 0xF2); add(U'o', 0x301, 0xF3); add(U'o', 0x302, 0xF4);
        add(U'o', 0x303, 0xF5); add(U'o', 0x308, 0xF6);
        add(U'u', 0x300, 0xF9); add(U'u', 0x301, 0xFA); add(U'u', 0x302, 0xFB);
        add(U'u', 0x308, 0xFC);
        add(U'y', 0x301, 0xFD); add(U'y', 0x308, 0xFF);
        return t;
    }();
    return table;
}

}  // namespace

std::string nfc(const std::string& utf8) {
    std::vector<char32_t> cps = decode(utf8);
    std::vector<char32_t> out;
    out.reserve(cps.size());
    const auto& table = composition_table();
    for (char32_t cp : cps) {
        if (!out.empty() && cp >= 0x0300 && cp <= 0x036F) {
            auto it = table.find((static_cast<uint64_t>(out.back()) << 32) | cp);
            if (it != table.end()) {
                out.back() = it->second;
                continue;
            }
        }
        out.push_back(cp);
    }
    return encode(out);
}

std::string trim(const std::string& utf8) {
    std::vector<char32_t> cps = decode(utf8);
    size_t begin = 0;
    size_t end = cps.size();
    while (begin < end && is_space(cps[begin])) ++begin;
    while (end > begin && is_space(cps[end - 1])) --end;
    return encode(std::vector<char32_t>(cps.begin() + begin, cps.begin() + end));
}

}  // namespace lrlforge::unicode
