#include "lrlforge/eval.hpp"

#include <algorithm>
#include <fstream>
#include <set>

#include <json.hpp>

#include "lrlforge/digest.hpp"
#include "lrlforge/distill.hpp"
#include "lrlforge/error.hpp"
#include "lrlforge/unicode.hpp"

using nlohmann::json;
namespace fs = std::filesystem;

namespace lrlforge::eval {

namespace {

bool requested(const EvalOptions& options, metrics::MetricName m) {
    return std::find(options.metrics_requested.begin(), options.metrics_requested.end(), m) !=
           options.metrics_requested.end();
}

}  // namespace

EvalRun run_eval(const corpus::Store& store, gateway::Gateway& gw,
                 const gateway::EndpointProfile& profile, const std::string& eval_dataset,
                 const std::pair<std::string, std::string>& direction,
                 const gateway::GenerationParams& params, const EvalOptions& options,
                 const langinfo::LanguageTable& langs) {
    auto refs = store.load_pairs(eval_dataset);
    if (refs.empty()) throw Error("eval/missing-references", "eval set is empty: " + eval_dataset);
    for (const auto& p : refs)
        if (p.tgt_text.empty())
            throw Error("eval/missing-references", "pair " + p.src.id + " has no reference");

    const bool want_spbleu = requested(options, metrics::MetricName::SPBLEU);
    const bool want_chrf = requested(options, metrics::MetricName::CHRF_PP);
    const bool want_jaccard = requested(options, metrics::MetricName::JACCARD);
    const bool want_judge = requested(options, metrics::MetricName::LLMAAJ);
    if (want_spbleu && !options.vocab)
        throw Error("eval/no-vocab", "SPBLEU requested without a subword vocabulary");
    if (want_judge && !options.judge_profile)
        throw Error("eval/no-judge", "LLMaaJ requested without a judge profile");

    EvalRun run;
    run.eval_dataset = eval_dataset;
    run.endpoint = profile.name;
    run.params = params;
    run.started_at = corpus::now_utc_iso8601();
    if (options.vocab) run.subword_digest = options.vocab->digest;

    std::vector<std::string> prompts;
    prompts.reserve(refs.size());
    for (const auto& p : refs)
        prompts.push_back(distill::render_translation_prompt(p.src, direction, langs));
    auto exchanges = gw.complete_batch(profile, prompts, params);

    std::vector<text_units::TokenSequence> hyp_subwords, ref_subwords;
    std::vector<judge::JudgeItem> judge_items;
    std::vector<size_t> judge_index;

    run.per_pair.resize(refs.size());
    for (size_t i = 0; i < refs.size(); ++i) {
        const auto& ref = refs[i];
        PairScore& row = run.per_pair[i];
        row.pair_id = ref.src.id;
        row.attrs["src_lang"] = ref.direction.first;
        row.attrs["tgt_lang"] = ref.direction.second;
        row.attrs["direction"] = ref.direction.first + "-" + ref.direction.second;
        row.attrs["teacher"] = corpus::to_string(ref.teacher);

        if (!exchanges[i].ok()) {
            row.gap = true;
            ++run.gap_count;
            continue;
        }
        auto verdict = distill::sanitize(exchanges[i].response_text,
                                         unicode::decode(ref.src.text).size());
        // rejected outputs are scored as-is so the score reflects the failure
        row.hypothesis = verdict.accepted ? verdict.cleaned_text : exchanges[i].response_text;
        row.sanitize_flag = verdict.reason;

        if (want_chrf)
            row.values["chrfpp"] = metrics::chrf_pp(row.hypothesis, ref.tgt_text).value;
        if (want_jaccard)
            row.values["jaccard"] = metrics::jaccard(row.hypothesis, ref.tgt_text).value;
        if (want_spbleu) {
            hyp_subwords.push_back(text_units::subword_segment(row.hypothesis, *options.vocab));
            ref_subwords.push_back(text_units::subword_segment(ref.tgt_text, *options.vocab));
        }
        if (want_judge) {
            judge_items.push_back({ref.src.id, ref.tgt_text, row.hypothesis});
            judge_index.push_back(i);
        }
    }

    if (want_chrf || want_jaccard) {
        for (const char* name : {"chrfpp", "jaccard"}) {
            double sum = 0;
            size_t n = 0;
            for (const auto& row : run.per_pair) {
                auto it = row.values.find(name);
                if (it != row.values.end()) {
                    sum += it->second;
                    ++n;
                }
            }
            if (n > 0) run.corpus[name] = sum / n;
        }
    }
    if (want_spbleu && !hyp_subwords.empty())
        run.corpus["spbleu"] = metrics::spbleu(hyp_subwords, ref_subwords).value;

    if (want_judge && !judge_items.empty()) {
        auto result = judge::judge_batch(gw, *options.judge_profile, judge_items,
                                         options.judge_params);
        run.judge_unparsed = result.unparsed;
        size_t good = 0, scored = 0;
        for (size_t k = 0; k < result.verdicts.size(); ++k) {
            const auto& v = result.verdicts[k];
            if (!v.parse_ok) continue;
            run.per_pair[judge_index[k]].values["llmaaj"] = v.score;
            ++scored;
            if (v.good()) ++good;
        }
        if (scored > 0) {
            run.corpus["llmaaj"] = result.mean_score;
            run.corpus["good_rate"] = 100.0 * static_cast<double>(good) / scored;
        }
    }

    run.finished_at = corpus::now_utc_iso8601();
    run.run_id = run.eval_dataset + "-" + profile.name + "-" +
                 digest::to_hex(digest::fnv64(run.started_at + run.eval_dataset + profile.name));
    return run;
}

std::vector<metrics::CorpusScore> group_by_family(const EvalRun& run,
                                                  const langinfo::LanguageTable& langs) {
    std::vector<metrics::ScoredPair> scored;
    for (const auto& row : run.per_pair) {
        auto lang_it = row.attrs.find("src_lang");
        if (lang_it == row.attrs.end())
            throw Error("eval/unmapped-language", "pair " + row.pair_id + " has no src_lang");
        const auto* info = langs.find(lang_it->second);
        if (!info)
            throw Error("eval/unmapped-language",
                        "language code not in table: " + lang_it->second);
        for (const auto& [name, value] : row.values) {
            metrics::ScoredPair sp;
            sp.pair_id = row.pair_id;
            sp.attrs["family"] = info->family;
            sp.metric = {metrics::metric_from_string(name), value,
                         name == "jaccard" || name == "llmaaj" ? metrics::Scale::UNIT_0_1
                                                               : metrics::Scale::PERCENT_0_100};
            scored.push_back(std::move(sp));
        }
    }
    if (scored.empty()) throw Error("eval/empty-run", "run carries no scores to group");
    return metrics::aggregate(scored, {"family"});
}

HdiAnalysis hdi_correlation(const std::vector<std::pair<std::string, double>>& per_language_scores,
                            const langinfo::LanguageTable& langs) {
    std::vector<double> hdis, scores;
    std::map<std::string, double> tier_sums;
    std::map<std::string, size_t> tier_counts;
    for (const auto& [code, score] : per_language_scores) {
        const auto& info = langs.require(code);
        if (!info.hdi) continue;
        hdis.push_back(*info.hdi);
        scores.push_back(score);
        std::string tier = to_string(langinfo::hdi_tier(*info.hdi));
        tier_sums[tier] += score;
        tier_counts[tier] += 1;
    }
    if (hdis.size() < 2)
        throw Error("eval/too-few-languages", "need at least 2 languages with HDI data");

    HdiAnalysis out;
    out.r = metrics::pearson(hdis, scores);
    for (const auto& [tier, sum] : tier_sums) out.tier_means[tier] = sum / tier_counts[tier];
    out.tier_counts = tier_counts;
    return out;
}

void save_run(const EvalRun& run, const fs::path& path) {
    json rows = json::array();
    for (const auto& row : run.per_pair) {
        json r = {{"pair_id", row.pair_id}, {"attrs", row.attrs}, {"values", row.values},
                  {"hypothesis", row.hypothesis}, {"gap", row.gap}};
        if (row.sanitize_flag) r["sanitize_flag"] = corpus::to_string(*row.sanitize_flag);
        rows.push_back(std::move(r));
    }
    json j = {{"run_id", run.run_id},
              {"eval_dataset", run.eval_dataset},
              {"endpoint", run.endpoint},
              {"params", {{"temperature", run.params.temperature},
                          {"top_p", run.params.top_p},
                          {"max_new_tokens", run.params.max_new_tokens}}},
              {"per_pair", rows},
              {"corpus", run.corpus},
              {"subword_digest", run.subword_digest},
              {"judge_unparsed", run.judge_unparsed},
              {"gap_count", run.gap_count},
              {"started_at", run.started_at},
              {"finished_at", run.finished_at}};
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw Error("eval/write-failure", "cannot write " + path.string());
    out << j.dump(2) << '\n';
}

EvalRun load_run(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw Error("eval/unreadable", "cannot read run file " + path.string());
    json j;
    in >> j;
    EvalRun run;
    run.run_id = j.value("run_id", "");
    run.eval_dataset = j.value("eval_dataset", "");
    run.endpoint = j.value("endpoint", "");
    if (j.contains("params")) {
        run.params.temperature = j["params"].value("temperature", 0.1);
        run.params.top_p = j["params"].value("top_p", 0.9);
        run.params.max_new_tokens = j["params"].value("max_new_tokens", 512);
    }
    for (const auto& r : j.value("per_pair", json::array())) {
        PairScore row;
        row.pair_id = r.value("pair_id", "");
        row.attrs = r.value("attrs", std::map<std::string, std::string>{});
        row.values = r.value("values", std::map<std::string, double>{});
        row.hypothesis = r.value("hypothesis", "");
        row.gap = r.value("gap", false);
        if (r.contains("sanitize_flag"))
            row.sanitize_flag = corpus::reject_reason_from_string(r["sanitize_flag"]);
        run.per_pair.push_back(std::move(row));
    }
    run.corpus = j.value("corpus", std::map<std::string, double>{});
    run.subword_digest = j.value("subword_digest", "");
    run.judge_unparsed = j.value("judge_unparsed", 0);
    run.gap_count = j.value("gap_count", 0);
    run.started_at = j.value("started_at", "");
    run.finished_at = j.value("finished_at", "");
    return run;
}

namespace {

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.6g", v);
    return buf;
}

}  // namespace

void emit_scores_csv(const EvalRun& run, const fs::path& path) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw Error("eval/write-failure", "cannot write " + path.string());
    out << "pair_id,metric,value,direction,teacher,subword_digest\n";
    for (const auto& row : run.per_pair) {
        for (const auto& [name, value] : row.values) {
            out << row.pair_id << ',' << name << ',' << fmt(value) << ','
                << row.attrs.at("direction") << ',' << row.attrs.at("teacher") << ','
                << (name == "spbleu" ? run.subword_digest : "") << '\n';
        }
    }
}

void emit_comparison(const std::vector<std::pair<std::string, EvalRun>>& runs,
                     const fs::path& markdown_path, const fs::path& csv_path) {
    if (runs.empty()) throw Error("eval/empty-report", "no runs to report");

    std::set<std::string> metric_names;
    for (const auto& [label, run] : runs)
        for (const auto& [name, _] : run.corpus) metric_names.insert(name);

    std::ofstream md(markdown_path, std::ios::trunc);
    std::ofstream csv(csv_path, std::ios::trunc);
    if (!md || !csv) throw Error("eval/write-failure", "cannot write report files");

    md << "| Method |";
    for (const auto& name : metric_names) md << ' ' << name << " |";
    md << "\n|---|";
    for (size_t i = 0; i < metric_names.size(); ++i) md << "---|";
    md << '\n';
    csv << "method";
    for (const auto& name : metric_names) csv << ',' << name;
    csv << '\n';

    for (const auto& [label, run] : runs) {
        md << "| " << label << " |";
        csv << label;
        for (const auto& name : metric_names) {
            auto it = run.corpus.find(name);
            std::string cell = it == run.corpus.end() ? "" : fmt(it->second);
            md << ' ' << cell << " |";
            csv << ',' << cell;
        }
        md << '\n';
        csv << '\n';
    }
}

void emit_curve_csv(const std::vector<CurvePoint>& points, const fs::path& path) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw Error("eval/write-failure", "cannot write " + path.string());
    out << "ratio,metric,value\n";
    for (const auto& p : points)
        for (const auto& [name, value] : p.values)
            out << fmt(p.ratio) << ',' << name << ',' << fmt(value) << '\n';
}

void emit_family_csv(const std::vector<metrics::CorpusScore>& scores, const fs::path& path) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw Error("eval/write-failure", "cannot write " + path.string());
    out << "family,metric,value,n_pairs\n";
    for (const auto& cs : scores) {
        out << cs.grouping.at("family") << ',' << metrics::to_string(cs.metric.name) << ','
            << fmt(cs.metric.value) << ',' << cs.n_pairs << '\n';
    }
}

}  // namespace lrlforge::eval
