#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "lrlforge/corpus.hpp"
#include "lrlforge/gateway.hpp"
#include "lrlforge/judge.hpp"
#include "lrlforge/langinfo.hpp"
#include "lrlforge/metrics.hpp"
#include "lrlforge/text_units.hpp"

namespace lrlforge::eval {

struct PairScore {
    std::string pair_id;
    std::map<std::string, std::string> attrs;   // src_lang, tgt_lang, direction, teacher
    std::map<std::string, double> values;       // metric name -> value
    std::string hypothesis;
    std::optional<corpus::RejectReason> sanitize_flag;
    bool gap = false;  // endpoint failed for this pair
};

struct EvalRun {
    std::string run_id;
    std::string eval_dataset;
    std::string endpoint;
    gateway::GenerationParams params;
    std::vector<PairScore> per_pair;
    std::map<std::string, double> corpus;  // spbleu, chrfpp, jaccard, llmaaj, good_rate
    std::string subword_digest;
    size_t judge_unparsed = 0;
    size_t gap_count = 0;
    std::string started_at;
    std::string finished_at;
};

struct EvalOptions {
    std::vector<metrics::MetricName> metrics_requested;
    const text_units::SubwordVocab* vocab = nullptr;  // required for SPBLEU
    const gateway::EndpointProfile* judge_profile = nullptr;  // required for LLMaaJ
    gateway::GenerationParams judge_params;
};

// Translates every source through the endpoint, sanitizes, and scores the
// requested metrics. Endpoint failures leave per-pair gaps rather than
// aborting (gap_count reports them).
EvalRun run_eval(const corpus::Store& store, gateway::Gateway& gw,
                 const gateway::EndpointProfile& profile, const std::string& eval_dataset,
                 const std::pair<std::string, std::string>& direction,
                 const gateway::GenerationParams& params, const EvalOptions& options,
                 const langinfo::LanguageTable& langs);

// Per-family means for every metric carried by the run.
std::vector<metrics::CorpusScore> group_by_family(const EvalRun& run,
                                                  const langinfo::LanguageTable& langs);

struct HdiAnalysis {
    double r = 0.0;
    std::map<std::string, double> tier_means;   // tier name -> mean score
    std::map<std::string, size_t> tier_counts;
};

HdiAnalysis hdi_correlation(const std::vector<std::pair<std::string, double>>& per_language_scores,
                            const langinfo::LanguageTable& langs);

void save_run(const EvalRun& run, const std::filesystem::path& path);
EvalRun load_run(const std::filesystem::path& path);

// Deterministic per-pair score export (CSV): pair_id, metric, value,
// direction, teacher, subword_digest.
void emit_scores_csv(const EvalRun& run, const std::filesystem::path& path);

// Table-shaped comparison across labelled runs, Markdown + CSV.
void emit_comparison(const std::vector<std::pair<std::string, EvalRun>>& runs,
                     const std::filesystem::path& markdown_path,
                     const std::filesystem::path& csv_path);

struct CurvePoint {
    double ratio = 1.0;
    std::map<std::string, double> values;
};

// Plot-data CSV for data-size curves: ratio, metric, value.
void emit_curve_csv(const std::vector<CurvePoint>& points, const std::filesystem::path& path);

// Plot-data CSV for family bars: family, metric, value, n_pairs.
void emit_family_csv(const std::vector<metrics::CorpusScore>& scores,
                     const std::filesystem::path& path);

}  // namespace lrlforge::eval
