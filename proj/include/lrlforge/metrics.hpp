#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "lrlforge/text_units.hpp"

namespace lrlforge::metrics {

enum class MetricName { SPBLEU, CHRF_PP, JACCARD, LLMAAJ };
enum class Scale { PERCENT_0_100, UNIT_0_1 };

std::string to_string(MetricName m);
MetricName metric_from_string(const std::string& s);

struct MetricValue {
    MetricName name;
    double value = 0.0;
    Scale scale = Scale::PERCENT_0_100;
};

struct CorpusScore {
    MetricValue metric;
    uint64_t n_pairs = 0;
    std::map<std::string, std::string> grouping;
    std::optional<std::string> subword_digest;
};

// Corpus-level BLEU over subword tokens: pooled modified n-gram precisions
// n=1..4, uniform geometric mean, brevity penalty exp(1 - r/c) for c < r.
// Zero-count precisions for n >= 2 get add-one smoothing; p1 = 0 scores 0.
MetricValue spbleu(const std::vector<text_units::TokenSequence>& hypotheses,
                   const std::vector<text_units::TokenSequence>& references);

// chrF++: char n-grams 1..6 plus word n-grams 1..2, beta = 2, macro-averaged
// precision/recall over orders with at least one n-gram on the relevant side.
MetricValue chrf_pp(const std::string& hypothesis, const std::string& reference);

// |A∩B| / |A∪B| over lowercased word-token sets; both empty -> 1.
MetricValue jaccard(const std::string& hypothesis, const std::string& reference);

double pearson(const std::vector<double>& xs, const std::vector<double>& ys);

struct ScoredPair {
    std::string pair_id;
    std::map<std::string, std::string> attrs;  // direction, teacher, family, ...
    MetricValue metric;
};

// Arithmetic mean per group (SPBLEU groups are recomputed corpus-level by the
// eval harness from pooled counts, not through this path).
std::vector<CorpusScore> aggregate(const std::vector<ScoredPair>& scores,
                                   const std::vector<std::string>& group_by);

}  // namespace lrlforge::metrics
