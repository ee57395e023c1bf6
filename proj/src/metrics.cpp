#include "lrlforge/metrics.hpp"

#include <algorithm>
#include <set>
#include <cmath>

#include "lrlforge/error.hpp"
#include "lrlforge/unicode.hpp"

namespace lrlforge::metrics {

std::string to_string(MetricName m) {
    switch (m) {
        case MetricName::SPBLEU: return "spbleu";
        case MetricName::CHRF_PP: return "chrfpp";
        case MetricName::JACCARD: return "jaccard";
        case MetricName::LLMAAJ: return "llmaaj";
    }
    return "spbleu";
}

MetricName metric_from_string(const std::string& s) {
    if (s == "spbleu") return MetricName::SPBLEU;
    if (s == "chrfpp" || s == "chrf++") return MetricName::CHRF_PP;
    if (s == "jaccard") return MetricName::JACCARD;
    if (s == "llmaaj") return MetricName::LLMAAJ;
    throw Error("metrics/unknown-metric", "unknown metric: " + s);
}

namespace {

// clipped matches of hyp n-grams against ref n-grams
uint64_t clipped_matches(const text_units::NgramCounts& hyp, const text_units::NgramCounts& ref) {
    uint64_t matches = 0;
    for (const auto& [key, count] : hyp.counts) {
        auto it = ref.counts.find(key);
        if (it != ref.counts.end()) matches += std::min(count, it->second);
    }
    return matches;
}

}  // namespace

MetricValue spbleu(const std::vector<text_units::TokenSequence>& hypotheses,
                   const std::vector<text_units::TokenSequence>& references) {
    if (hypotheses.empty()) throw Error("metrics/empty-corpus", "spbleu needs at least one pair");
    if (hypotheses.size() != references.size())
        throw Error("metrics/length-mismatch", "hypothesis/reference count mismatch");

    constexpr int kMaxOrder = 4;
    uint64_t numer[kMaxOrder] = {0, 0, 0, 0};
    uint64_t denom[kMaxOrder] = {0, 0, 0, 0};
    uint64_t hyp_len = 0;
    uint64_t ref_len = 0;

    for (size_t i = 0; i < hypotheses.size(); ++i) {
        hyp_len += hypotheses[i].tokens.size();
        ref_len += references[i].tokens.size();
        for (int n = 1; n <= kMaxOrder; ++n) {
            auto hyp_ngrams = text_units::word_ngrams(hypotheses[i], n);
            auto ref_ngrams = text_units::word_ngrams(references[i], n);
            numer[n - 1] += clipped_matches(hyp_ngrams, ref_ngrams);
            denom[n - 1] += hyp_ngrams.total();
        }
    }

    double log_precision_sum = 0.0;
    bool zero_score = false;
    for (int n = 1; n <= kMaxOrder; ++n) {
        double num = static_cast<double>(numer[n - 1]);
        double den = static_cast<double>(denom[n - 1]);
        if (n == 1) {
            if (num == 0.0) {
                zero_score = true;
                break;
            }
        } else if (num == 0.0) {
            num += 1.0;
            den += 1.0;
        }
        log_precision_sum += std::log(num / den);
    }

    double score = 0.0;
    if (!zero_score) {
        double bp = 1.0;
        if (hyp_len < ref_len && hyp_len > 0)
            bp = std::exp(1.0 - static_cast<double>(ref_len) / static_cast<double>(hyp_len));
        score = 100.0 * bp * std::exp(log_precision_sum / kMaxOrder);
    }
    return {MetricName::SPBLEU, score, Scale::PERCENT_0_100};
}

MetricValue chrf_pp(const std::string& hypothesis, const std::string& reference) {
    constexpr double kBeta2 = 4.0;  // beta = 2

    if (unicode::trim(hypothesis).empty() && unicode::trim(reference).empty())
        return {MetricName::CHRF_PP, 100.0, Scale::PERCENT_0_100};

    auto hyp_words = text_units::word_tokenize(hypothesis);
    auto ref_words = text_units::word_tokenize(reference);

    double precision_sum = 0.0, recall_sum = 0.0;
    int precision_orders = 0, recall_orders = 0;

    auto accumulate = [&](const text_units::NgramCounts& hyp, const text_units::NgramCounts& ref) {
        uint64_t matches = clipped_matches(hyp, ref);
        uint64_t hyp_total = hyp.total();
        uint64_t ref_total = ref.total();
        if (hyp_total > 0) {
            precision_sum += static_cast<double>(matches) / hyp_total;
            ++precision_orders;
        }
        if (ref_total > 0) {
            recall_sum += static_cast<double>(matches) / ref_total;
            ++recall_orders;
        }
    };

    for (int n = 1; n <= 6; ++n)
        accumulate(text_units::char_ngrams(hypothesis, n), text_units::char_ngrams(reference, n));
    for (int n = 1; n <= 2; ++n)
        accumulate(text_units::word_ngrams(hyp_words, n), text_units::word_ngrams(ref_words, n));

    double p_bar = precision_orders > 0 ? precision_sum / precision_orders : 0.0;
    double r_bar = recall_orders > 0 ? recall_sum / recall_orders : 0.0;
    double score = 0.0;
    if (p_bar + r_bar > 0.0)
        score = 100.0 * (1.0 + kBeta2) * p_bar * r_bar / (kBeta2 * p_bar + r_bar);
    return {MetricName::CHRF_PP, score, Scale::PERCENT_0_100};
}

MetricValue jaccard(const std::string& hypothesis, const std::string& reference) {
    auto lower = [](const std::string& s) {
        std::vector<char32_t> cps = unicode::decode(s);
        for (auto& cp : cps) {
            if (cp < 0x80) {
                cp = std::tolower(static_cast<int>(cp));
            } else if ((cp >= 0xC0 && cp <= 0xDE && cp != 0xD7) ||
                       (cp >= 0x100 && cp <= 0x17F && cp % 2 == 0)) {
                cp = cp < 0x100 ? cp + 0x20 : cp + 1;  // Latin-1 / Latin Extended-A uppercase
            }
        }
        return unicode::encode(cps);
    };
    auto to_set = [&](const std::string& s) {
        auto toks = text_units::word_tokenize(lower(s)).tokens;
        return std::set<std::string>(toks.begin(), toks.end());
    };
    auto a = to_set(hypothesis);
    auto b = to_set(reference);
    if (a.empty() && b.empty()) return {MetricName::JACCARD, 1.0, Scale::UNIT_0_1};
    std::vector<std::string> inter;
    std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(inter));
    size_t uni = a.size() + b.size() - inter.size();
    return {MetricName::JACCARD, static_cast<double>(inter.size()) / uni, Scale::UNIT_0_1};
}

double pearson(const std::vector<double>& xs, const std::vector<double>& ys) {
    if (xs.size() != ys.size()) throw Error("metrics/length-mismatch", "pearson input lengths differ");
    if (xs.size() < 2) throw Error("metrics/too-few", "pearson needs at least 2 points");
    const double n = static_cast<double>(xs.size());
    double mx = 0, my = 0;
    for (size_t i = 0; i < xs.size(); ++i) {
        mx += xs[i];
        my += ys[i];
    }
    mx /= n;
    my /= n;
    double sxy = 0, sxx = 0, syy = 0;
    for (size_t i = 0; i < xs.size(); ++i) {
        double dx = xs[i] - mx, dy = ys[i] - my;
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if (sxx == 0.0 || syy == 0.0)
        throw Error("metrics/degenerate-variance", "pearson input has zero variance");
    return sxy / std::sqrt(sxx * syy);
}

std::vector<CorpusScore> aggregate(const std::vector<ScoredPair>& scores,
                                   const std::vector<std::string>& group_by) {
    if (scores.empty()) throw Error("metrics/empty-corpus", "nothing to aggregate");

    struct Acc {
        double sum = 0;
        uint64_t n = 0;
        MetricValue sample;
        std::map<std::string, std::string> grouping;
    };
    std::map<std::string, Acc> groups;
    for (const auto& sp : scores) {
        std::string key;
        std::map<std::string, std::string> grouping;
        for (const auto& k : group_by) {
            auto it = sp.attrs.find(k);
            if (it == sp.attrs.end())
                throw Error("metrics/unknown-group-key",
                            "pair " + sp.pair_id + " has no attribute '" + k + "'");
            key += it->second + "\x1f";
            grouping[k] = it->second;
        }
        key += to_string(sp.metric.name);
        auto& acc = groups[key];
        acc.sum += sp.metric.value;
        acc.n += 1;
        acc.sample = sp.metric;
        acc.grouping = std::move(grouping);
    }

    std::vector<CorpusScore> out;
    for (auto& [key, acc] : groups) {
        CorpusScore cs;
        cs.metric = acc.sample;
        cs.metric.value = acc.sum / acc.n;
        cs.n_pairs = acc.n;
        cs.grouping = std::move(acc.grouping);
        out.push_back(std::move(cs));
    }
    return out;
}

}  // namespace lrlforge::metrics
