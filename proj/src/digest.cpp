#include "lrlforge/digest.hpp"

#include <array>

namespace lrlforge::digest {

uint64_t fnv64(const std::string& data) {
    uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : data) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::string to_hex(uint64_t value) {
    static const char* digits = "0123456789abcdef";
    std::array<char, 16> buf;
    for (int i = 15; i >= 0; --i) {
        buf[i] = digits[value & 0xF];
        value >>= 4;
    }
    return std::string(buf.data(), buf.size());
}

}  // namespace lrlforge::digest
