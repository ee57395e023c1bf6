#include "lrlforge/bm25.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>

#include <json.hpp>

#include "lrlforge/error.hpp"
#include "lrlforge/text_units.hpp"
#include "lrlforge/unicode.hpp"

using nlohmann::json;

namespace lrlforge::bm25 {

std::vector<std::string> index_tokens(const std::string& text) {
    std::vector<char32_t> cps = unicode::decode(text);
    for (auto& cp : cps) {
        if (cp < 0x80)
            cp = std::tolower(static_cast<int>(cp));
        else if (cp >= 0xC0 && cp <= 0xDE && cp != 0xD7)
            cp = cp + 0x20;
    }
    return text_units::word_tokenize(unicode::encode(cps)).tokens;
}

Bm25Index Bm25Index::build(const std::vector<corpus::DictionaryEntry>& entries, double k1,
                           double b) {
    if (entries.empty()) throw Error("bm25/empty", "cannot build index over zero entries");
    Bm25Index index;
    index.k1_ = k1;
    index.b_ = b;

    uint64_t total_len = 0;
    for (size_t i = 0; i < entries.size(); ++i) {
        const auto& e = entries[i];
        std::string text = e.lemma;
        for (const auto& t : e.translations) text += " " + t;
        for (const auto& [src, tgt] : e.examples) text += " " + src;

        Doc doc;
        doc.entry_id = e.lemma + (e.pos.empty() ? "" : "#" + e.pos);
        for (const auto& tok : index_tokens(text)) {
            ++doc.tf[tok];
            ++doc.length;
        }
        total_len += doc.length;
        for (const auto& [tok, _] : doc.tf) ++index.df_[tok];
        index.docs_.push_back(std::move(doc));
    }
    index.avgdl_ = static_cast<double>(total_len) / entries.size();
    if (index.avgdl_ <= 0.0) throw Error("bm25/empty", "all documents are empty");
    return index;
}

std::vector<ScoredDoc> Bm25Index::retrieve(const std::string& query, size_t k) const {
    if (k < 1) throw Error("bm25/bad-k", "k must be >= 1");
    auto query_tokens = index_tokens(query);
    // dedup query terms, each contributes once per occurrence-free BM25
    std::set<std::string> terms(query_tokens.begin(), query_tokens.end());

    const double n_docs = static_cast<double>(docs_.size());
    std::vector<ScoredDoc> scored;
    for (const auto& doc : docs_) {
        double score = 0.0;
        for (const auto& term : terms) {
            auto it = doc.tf.find(term);
            if (it == doc.tf.end()) continue;
            double tf = static_cast<double>(it->second);
            double dfv = static_cast<double>(df(term));
            double idf = std::log(1.0 + (n_docs - dfv + 0.5) / (dfv + 0.5));
            double norm = k1_ * (1.0 - b_ + b_ * doc.length / avgdl_);
            score += idf * (tf * (k1_ + 1.0)) / (tf + norm);
        }
        if (score > 0.0) scored.push_back({doc.entry_id, score});
    }
    std::stable_sort(scored.begin(), scored.end(), [](const ScoredDoc& a, const ScoredDoc& b) {
        if (a.score != b.score) return a.score > b.score;
        return a.entry_id < b.entry_id;
    });
    if (scored.size() > k) scored.resize(k);
    return scored;
}

void Bm25Index::save(const std::filesystem::path& path) const {
    json docs = json::array();
    for (const auto& doc : docs_) {
        docs.push_back({{"entry_id", doc.entry_id}, {"tf", doc.tf}, {"length", doc.length}});
    }
    json j = {{"docs", docs}, {"df", df_}, {"avgdl", avgdl_}, {"k1", k1_}, {"b", b_}};
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw Error("bm25/write-failure", "cannot write " + path.string());
    out << j.dump() << '\n';
}

Bm25Index Bm25Index::load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error("bm25/unreadable", "cannot read " + path.string());
    json j;
    in >> j;
    Bm25Index index;
    index.k1_ = j.at("k1").get<double>();
    index.b_ = j.at("b").get<double>();
    index.avgdl_ = j.at("avgdl").get<double>();
    index.df_ = j.at("df").get<std::unordered_map<std::string, uint64_t>>();
    for (const auto& d : j.at("docs")) {
        Doc doc;
        doc.entry_id = d.at("entry_id").get<std::string>();
        doc.tf = d.at("tf").get<std::map<std::string, uint64_t>>();
        doc.length = d.at("length").get<uint64_t>();
        index.docs_.push_back(std::move(doc));
    }
    return index;
}

}  // namespace lrlforge::bm25
