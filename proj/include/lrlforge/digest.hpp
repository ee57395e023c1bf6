#pragma once

#include <cstdint>
#include <string>

namespace lrlforge::digest {

// FNV-1a, 64-bit.
uint64_t fnv64(const std::string& data);

std::string to_hex(uint64_t value);

// Streams per-record digests into an order-independent dataset digest
// (modular sum of record hashes, so re-ingest order does not matter).
class OrderIndependent {
public:
    void add(const std::string& record_key) { sum_ += fnv64(record_key); }
    std::string hex() const { return to_hex(sum_); }

private:
    uint64_t sum_ = 0;
};

}  // namespace lrlforge::digest
