#include "lrlforge/text_units.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "lrlforge/digest.hpp"
#include "lrlforge/error.hpp"
#include "lrlforge/unicode.hpp"

namespace lrlforge::text_units {

namespace {

constexpr char32_t kBoundaryMarker = 0x2581;  // ▁

size_t count_codepoints(const std::string& s) { return unicode::decode(s).size(); }

}  // namespace

TokenSequence word_tokenize(const std::string& text) {
    TokenSequence seq;
    seq.granularity = Granularity::WORD;
    auto cps = unicode::decode(text);
    std::string current;
    bool current_is_punct = false;
    auto flush = [&] {
        if (!current.empty()) {
            seq.tokens.push_back(current);
            current.clear();
        }
    };
    for (char32_t cp : cps) {
        if (unicode::is_space(cp)) {
            flush();
            continue;
        }
        bool punct = unicode::is_punct(cp);
        if (!current.empty() && punct != current_is_punct) flush();
        current_is_punct = punct;
        unicode::append_utf8(current, cp);
    }
    flush();
    return seq;
}

NgramCounts char_ngrams(const std::string& text, int n) {
    if (n < 1) throw Error("text_units/bad-order", "n-gram order must be >= 1");
    NgramCounts out;
    out.order = n;
    std::vector<char32_t> cps;
    for (char32_t cp : unicode::decode(text))
        if (!unicode::is_space(cp)) cps.push_back(cp);
    if (cps.size() < static_cast<size_t>(n)) return out;
    for (size_t i = 0; i + n <= cps.size(); ++i) {
        std::vector<std::string> key;
        key.reserve(n);
        for (int k = 0; k < n; ++k) {
            std::string c;
            unicode::append_utf8(c, cps[i + k]);
            key.push_back(std::move(c));
        }
        ++out.counts[key];
    }
    return out;
}

NgramCounts word_ngrams(const TokenSequence& words, int n) {
    if (n < 1) throw Error("text_units/bad-order", "n-gram order must be >= 1");
    NgramCounts out;
    out.order = n;
    const auto& toks = words.tokens;
    if (toks.size() < static_cast<size_t>(n)) return out;
    for (size_t i = 0; i + n <= toks.size(); ++i) {
        std::vector<std::string> key(toks.begin() + i, toks.begin() + i + n);
        ++out.counts[key];
    }
    return out;
}

SubwordVocab SubwordVocab::from_pieces(std::vector<std::string> pieces, std::string unk) {
    SubwordVocab v;
    v.unk_piece = std::move(unk);
    for (auto& p : pieces) {
        if (p.empty()) continue;
        v.max_piece_cps = std::max(v.max_piece_cps, count_codepoints(p));
        v.pieces.insert(std::move(p));
    }
    v.max_piece_cps = std::max(v.max_piece_cps, count_codepoints(v.unk_piece));
    v.pieces.insert(v.unk_piece);
    return v;
}

SubwordVocab SubwordVocab::load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error("text_units/unreadable-vocab", "cannot read " + path.string());
    std::stringstream buf;
    buf << in.rdbuf();
    std::string contents = buf.str();

    std::string unk = "<unk>";
    std::vector<std::string> pieces;
    std::istringstream lines(contents);
    std::string line;
    bool first = true;
    while (std::getline(lines, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (first && line.rfind("#unk=", 0) == 0) {
            unk = line.substr(5);
            first = false;
            continue;
        }
        first = false;
        if (line.empty()) continue;
        pieces.push_back(line);
    }
    SubwordVocab v = from_pieces(std::move(pieces), unk);
    v.digest = digest::to_hex(digest::fnv64(contents));
    return v;
}

TokenSequence subword_segment(const std::string& text, const SubwordVocab& vocab) {
    TokenSequence seq;
    seq.granularity = Granularity::SUBWORD;
    std::string normalized = unicode::nfc(text);

    // whitespace-split words, each prefixed by the boundary marker
    std::vector<std::vector<char32_t>> words;
    {
        std::vector<char32_t> current;
        for (char32_t cp : unicode::decode(normalized)) {
            if (unicode::is_space(cp)) {
                if (!current.empty()) words.push_back(std::move(current));
                current = {};
            } else {
                current.push_back(cp);
            }
        }
        if (!current.empty()) words.push_back(std::move(current));
    }

    std::string marker_utf8;
    unicode::append_utf8(marker_utf8, kBoundaryMarker);

    for (const auto& word : words) {
        std::vector<char32_t> marked;
        marked.reserve(word.size() + 1);
        marked.push_back(kBoundaryMarker);
        marked.insert(marked.end(), word.begin(), word.end());

        size_t pos = 0;
        while (pos < marked.size()) {
            const bool at_word_start = pos == 0;
            size_t remaining = marked.size() - pos;
            size_t longest = std::min(remaining, vocab.max_piece_cps);
            std::string best;
            size_t best_len = 0;
            for (size_t len = longest; len >= 1; --len) {
                std::string candidate;
                for (size_t k = 0; k < len; ++k) unicode::append_utf8(candidate, marked[pos + k]);
                // word-initial matches must carry the marker; interior ones must not
                bool marked_piece = candidate.rfind(marker_utf8, 0) == 0;
                if (marked_piece != at_word_start) continue;
                if (vocab.pieces.count(candidate)) {
                    best = std::move(candidate);
                    best_len = len;
                    break;
                }
            }
            if (best_len > 0) {
                seq.tokens.push_back(best);
                pos += best_len;
            } else {
                seq.tokens.push_back(vocab.unk_piece);
                // the marker is not a scalar of the input: a word-initial unk
                // consumes the marker together with one word scalar
                pos += at_word_start ? 2 : 1;
            }
        }
    }
    return seq;
}

}  // namespace lrlforge::text_units
