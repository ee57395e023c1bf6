#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <unordered_map>
#include <vector>

#include "lrlforge/corpus.hpp"

namespace lrlforge::bm25 {

struct ScoredDoc {
    std::string entry_id;
    double score = 0.0;
};

// Okapi BM25 over dictionary entries. Document text is the lemma plus
// translations plus example source sentences, word-tokenized and lowercased.
// Immutable after build.
class Bm25Index {
public:
    static Bm25Index build(const std::vector<corpus::DictionaryEntry>& entries, double k1 = 1.5,
                           double b = 0.75);

    // Top-k by BM25, ties broken by ascending entry_id; non-positive scores
    // excluded, so fewer than k results are possible.
    std::vector<ScoredDoc> retrieve(const std::string& query, size_t k) const;

    size_t doc_count() const { return docs_.size(); }
    double avgdl() const { return avgdl_; }
    uint64_t df(const std::string& token) const {
        auto it = df_.find(token);
        return it == df_.end() ? 0 : it->second;
    }

    void save(const std::filesystem::path& path) const;
    static Bm25Index load(const std::filesystem::path& path);

private:
    struct Doc {
        std::string entry_id;
        std::map<std::string, uint64_t> tf;
        uint64_t length = 0;
    };

    std::vector<Doc> docs_;
    std::unordered_map<std::string, uint64_t> df_;
    double avgdl_ = 0.0;
    double k1_ = 1.5;
    double b_ = 0.75;
};

// lowercased word tokens used for both documents and queries
std::vector<std::string> index_tokens(const std::string& text);

}  // namespace lrlforge::bm25
