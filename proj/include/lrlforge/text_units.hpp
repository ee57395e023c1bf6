#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <unordered_set>
#include <vector>

namespace lrlforge::text_units {

enum class Granularity { WORD, CHAR, SUBWORD };

struct TokenSequence {
    std::vector<std::string> tokens;
    Granularity granularity = Granularity::WORD;
};

// n-gram multiset; keys are token tuples of exactly `order` elements.
struct NgramCounts {
    int order = 1;
    std::map<std::vector<std::string>, uint64_t> counts;

    uint64_t total() const {
        uint64_t t = 0;
        for (const auto& [k, v] : counts) t += v;
        return t;
    }
};

// Piece inventory for greedy longest-match subword segmentation. Word
// boundaries carry the "▁" (U+2581) marker fused onto the word-initial
// character, so word-initial matches require a marker-bearing piece.
struct SubwordVocab {
    std::unordered_set<std::string> pieces;
    std::string unk_piece = "<unk>";
    std::string digest;       // hex digest of the vocabulary file
    size_t max_piece_cps = 0;  // longest piece, in scalar values

    static SubwordVocab from_pieces(std::vector<std::string> pieces,
                                    std::string unk = "<unk>");
    static SubwordVocab load(const std::filesystem::path& path);
};

// Splits on Unicode whitespace; each maximal run of punctuation becomes its
// own token.
TokenSequence word_tokenize(const std::string& text);

// n-grams over the scalar sequence with all whitespace removed.
NgramCounts char_ngrams(const std::string& text, int n);

NgramCounts word_ngrams(const TokenSequence& words, int n);

TokenSequence subword_segment(const std::string& text, const SubwordVocab& vocab);

}  // namespace lrlforge::text_units
