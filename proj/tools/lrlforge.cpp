// lrlforge: distillation-data and translation-evaluation toolkit CLI.
// Pure dispatch; all behavior lives in the library modules.

#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>

#include "lrlforge/bm25.hpp"
#include "lrlforge/config.hpp"
#include "lrlforge/corpus.hpp"
#include "lrlforge/distill.hpp"
#include "lrlforge/error.hpp"
#include "lrlforge/eval.hpp"
#include "lrlforge/judge.hpp"
#include "lrlforge/sft.hpp"

namespace {

constexpr const char* kVersion = "lrlforge 0.1.0";

std::pair<std::string, std::string> parse_direction(const std::string& s) {
    auto dash = s.find('-');
    if (dash == std::string::npos || dash == 0 || dash + 1 == s.size())
        throw lrlforge::UsageError("cli/bad-direction", "expected <src>-<tgt>, got: " + s);
    return {s.substr(0, dash), s.substr(dash + 1)};
}

std::vector<std::string> split_csv(const std::string& s) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ','))
        if (!item.empty()) out.push_back(item);
    return out;
}

lrlforge::langinfo::LanguageTable lang_table(const lrlforge::config::AppConfig& cfg) {
    if (!cfg.lang_table_path.empty())
        return lrlforge::langinfo::LanguageTable::load_csv(cfg.lang_table_path);
    return lrlforge::langinfo::LanguageTable::builtin();
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Teacher-distilled parallel-data and translation-evaluation toolkit"};
    app.require_subcommand(1);

    std::optional<std::filesystem::path> config_path;
    bool verbose = false;
    bool dry_run = false;
    app.add_option("--config", config_path, "Config file (JSON); overrides LRLFORGE_CONFIG");
    app.add_flag("--verbose", verbose, "Verbose progress output");
    app.add_flag("--dry-run", dry_run, "Render prompts and plans without network calls");

    // version
    app.add_subcommand("version", "Print version and exit");

    // ingest
    auto* ingest = app.add_subcommand("ingest", "Ingest a corpus, dictionary, or eval set");
    std::string in_path, in_name, in_kind = "mono", in_lang, in_tag = "ingest";
    std::string in_src_lang, in_tgt_lang;
    ingest->add_option("--path", in_path, "Input file")->required();
    ingest->add_option("--name", in_name, "Dataset name")->required();
    ingest->add_option("--kind", in_kind, "mono|dict|eval")->check(CLI::IsMember({"mono", "dict", "eval"}));
    ingest->add_option("--lang", in_lang, "Language code (mono)");
    ingest->add_option("--source-tag", in_tag, "Provenance tag (mono)");
    ingest->add_option("--src-lang", in_src_lang, "Source language code (eval)");
    ingest->add_option("--tgt-lang", in_tgt_lang, "Target language code (eval)");

    // index-dict
    auto* index_dict = app.add_subcommand("index-dict", "Build a BM25 index over a dictionary dataset");
    std::string ix_dataset, ix_out;
    double ix_k1 = 1.5, ix_b = 0.75;
    index_dict->add_option("--dataset", ix_dataset, "Dictionary dataset name")->required();
    index_dict->add_option("--out", ix_out, "Index output path (JSON)")->required();
    index_dict->add_option("--k1", ix_k1, "BM25 k1");
    index_dict->add_option("--b", ix_b, "BM25 b");

    // distill
    auto* distill_cmd = app.add_subcommand("distill", "Generate fake targets from a monolingual dataset");
    std::string d_dataset, d_direction, d_teacher, d_profile, d_index, d_resume, d_out;
    int d_dict_k = 3;
    bool d_dict_k_set = false;
    distill_cmd->add_option("--dataset", d_dataset, "Monolingual dataset")->required();
    distill_cmd->add_option("--direction", d_direction, "e.g. en-lb")->required();
    distill_cmd->add_option("--teacher", d_teacher, "DN|DL|DG|DGDC")
        ->required()
        ->check(CLI::IsMember({"DN", "DL", "DG", "DGDC"}));
    distill_cmd->add_option("--profile", d_profile, "Endpoint profile name")->required();
    distill_cmd->add_option("--dict-index", d_index, "BM25 index path (DGDC)");
    distill_cmd->add_option("--dict-k", d_dict_k, "Dictionary entries per prompt (DGDC)")
        ->each([&](const std::string&) { d_dict_k_set = true; });
    distill_cmd->add_option("--resume", d_resume, "Resume token from a halted job");
    distill_cmd->add_option("--out", d_out, "Output dataset name");
    std::string d_dict_dataset;
    distill_cmd->add_option("--dict-dataset", d_dict_dataset, "Dictionary dataset (DGDC prompt text)");

    // audit
    auto* audit = app.add_subcommand("audit", "Sample pairs for review or import verdicts");
    std::string a_dataset, a_out, a_import;
    size_t a_size = 50;
    uint64_t a_seed = 3407;
    audit->add_option("--dataset", a_dataset, "Parallel dataset");
    audit->add_option("--sample-size", a_size, "Sample size");
    audit->add_option("--seed", a_seed, "Sampling seed");
    audit->add_option("--out", a_out, "Reviewer CSV to write");
    audit->add_option("--import", a_import, "Reviewed CSV to score");

    // build-sft
    auto* build_sft = app.add_subcommand("build-sft", "Emit SFT records and training manifest");
    std::string s_dataset, s_out;
    double s_ratio = 1.0;
    uint64_t s_seed = 3407;
    build_sft->add_option("--dataset", s_dataset, "Parallel dataset")->required();
    build_sft->add_option("--ratio", s_ratio, "Subsample ratio in (0,1]");
    build_sft->add_option("--seed", s_seed, "Sampling seed");
    build_sft->add_option("--out", s_out, "Output JSONL path")->required();

    // evaluate
    auto* evaluate = app.add_subcommand("evaluate", "Run a translation endpoint over an eval set");
    std::string e_set, e_profile, e_direction, e_metrics = "chrfpp,jaccard", e_judge, e_out = "run.json";
    std::string e_csv;
    evaluate->add_option("--eval-set", e_set, "Eval dataset")->required();
    evaluate->add_option("--profile", e_profile, "Translation endpoint profile")->required();
    evaluate->add_option("--direction", e_direction, "e.g. lb-en")->required();
    evaluate->add_option("--metrics", e_metrics, "Comma list: spbleu,chrfpp,jaccard,llmaaj");
    evaluate->add_option("--judge-profile", e_judge, "Judge endpoint profile (llmaaj)");
    evaluate->add_option("--out", e_out, "Run output path (JSON)");
    evaluate->add_option("--scores-csv", e_csv, "Per-pair scores CSV path");

    // judge
    auto* judge_cmd = app.add_subcommand("judge", "Judge hypotheses against an eval set");
    std::string j_set, j_hyp, j_profile, j_out = "verdicts.jsonl";
    judge_cmd->add_option("--eval-set", j_set, "Eval dataset (references)")->required();
    judge_cmd->add_option("--hyp-file", j_hyp, "Hypotheses, one per line")->required();
    judge_cmd->add_option("--profile", j_profile, "Judge endpoint profile")->required();
    judge_cmd->add_option("--out", j_out, "Verdicts JSONL path");

    // report
    auto* report = app.add_subcommand("report", "Render comparison tables from saved runs");
    std::string r_runs, r_labels, r_md = "report.md", r_csv = "report.csv", r_family;
    report->add_option("--runs", r_runs, "Comma list of run JSON files")->required();
    report->add_option("--labels", r_labels, "Comma list of row labels");
    report->add_option("--out-md", r_md, "Markdown output path");
    report->add_option("--out-csv", r_csv, "CSV output path");
    report->add_option("--family-csv", r_family, "Per-family bar-data CSV (first run)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 2;
    }

    try {
        auto cfg = lrlforge::config::resolve(config_path);
        lrlforge::corpus::Store store(cfg.data_root);
        auto langs = lang_table(cfg);

        if (app.got_subcommand("version")) {
            std::cout << kVersion << '\n';
            return 0;
        }

        if (app.got_subcommand(ingest)) {
            lrlforge::corpus::DatasetManifest m;
            if (in_kind == "mono") {
                if (in_lang.empty())
                    throw lrlforge::UsageError("cli/missing-flag", "--lang required for mono ingest");
                m = store.ingest_monolingual(in_path, in_lang, in_tag, in_name);
            } else if (in_kind == "dict") {
                m = store.ingest_dictionary(in_path, in_name);
            } else {
                if (in_src_lang.empty() || in_tgt_lang.empty())
                    throw lrlforge::UsageError("cli/missing-flag",
                                               "--src-lang and --tgt-lang required for eval ingest");
                m = store.ingest_eval_set(in_path, in_src_lang, in_tgt_lang, in_name);
            }
            std::cout << "ingested " << m.name << ": " << m.record_count
                      << " records, digest " << m.content_digest << '\n';
            return 0;
        }

        if (app.got_subcommand(index_dict)) {
            auto entries = store.load_dictionary(ix_dataset);
            auto index = lrlforge::bm25::Bm25Index::build(entries, ix_k1, ix_b);
            index.save(ix_out);
            std::cout << "indexed " << index.doc_count() << " entries -> " << ix_out << '\n';
            return 0;
        }

        if (app.got_subcommand(distill_cmd)) {
            lrlforge::distill::DistillJob job;
            job.dataset = d_dataset;
            job.direction = parse_direction(d_direction);
            job.teacher = lrlforge::corpus::teacher_from_string(d_teacher);
            job.profile = lrlforge::config::require_profile(cfg, d_profile);
            job.params = cfg.default_params;
            if (job.teacher == lrlforge::corpus::Teacher::DGDC || d_dict_k_set)
                job.dict_k = d_dict_k;
            if (!d_resume.empty()) job.resume_token = d_resume;
            job.output_name = d_out;

            std::optional<lrlforge::bm25::Bm25Index> index;
            std::vector<lrlforge::corpus::DictionaryEntry> dict_entries;
            if (!d_index.empty()) {
                index = lrlforge::bm25::Bm25Index::load(d_index);
                if (!d_dict_dataset.empty()) dict_entries = store.load_dictionary(d_dict_dataset);
            }

            if (dry_run) {
                auto segments = store.load_segments(job.dataset);
                size_t shown = 0;
                for (const auto& seg : segments) {
                    if (shown++ >= 3) break;
                    std::cout << lrlforge::distill::render_translation_prompt(seg, job.direction,
                                                                              langs)
                              << "\n---\n";
                }
                std::cout << "dry run: " << segments.size() << " segments planned\n";
                return 0;
            }

            lrlforge::gateway::Gateway gw;
            gw.set_audit_log(store.root() / "audit.jsonl");
            auto m = lrlforge::distill::run_distill(store, job, gw, langs,
                                                    index ? &*index : nullptr,
                                                    dict_entries.empty() ? nullptr : &dict_entries);
            std::cout << "distilled " << m.name << ": " << m.accepted_count << " accepted, "
                      << m.rejected_count << " rejected\n";
            return 0;
        }

        if (app.got_subcommand(audit)) {
            if (!a_import.empty()) {
                auto r = lrlforge::distill::audit_import(a_import);
                std::cout << r.fully_correct << "/" << r.total
                          << " fully correct, fraction " << r.fraction_correct << '\n';
            } else {
                if (a_dataset.empty() || a_out.empty())
                    throw lrlforge::UsageError("cli/missing-flag",
                                               "--dataset and --out required to sample");
                auto ids = lrlforge::distill::audit_sample(store, a_dataset, a_size, a_seed, a_out);
                std::cout << "sampled " << ids.size() << " pairs -> " << a_out << '\n';
            }
            return 0;
        }

        if (app.got_subcommand(build_sft)) {
            auto pairs = store.load_pairs(s_dataset);
            std::optional<lrlforge::text_units::SubwordVocab> vocab;
            if (!cfg.subword_vocab_path.empty())
                vocab = lrlforge::text_units::SubwordVocab::load(cfg.subword_vocab_path);
            auto m = lrlforge::sft::emit_training_set(pairs, s_ratio, s_seed, s_out, langs,
                                                      vocab ? &*vocab : nullptr);
            std::cout << "emitted " << m.record_count << " records (" << m.overlong_count
                      << " overlong flagged) -> " << s_out << '\n';
            return 0;
        }

        if (app.got_subcommand(evaluate)) {
            lrlforge::eval::EvalOptions options;
            for (const auto& name : split_csv(e_metrics))
                options.metrics_requested.push_back(lrlforge::metrics::metric_from_string(name));
            std::optional<lrlforge::text_units::SubwordVocab> vocab;
            if (!cfg.subword_vocab_path.empty()) {
                vocab = lrlforge::text_units::SubwordVocab::load(cfg.subword_vocab_path);
                options.vocab = &*vocab;
            }
            std::optional<lrlforge::gateway::EndpointProfile> judge_profile;
            if (!e_judge.empty()) {
                judge_profile = lrlforge::config::require_profile(cfg, e_judge);
                options.judge_profile = &*judge_profile;
                options.judge_params = cfg.default_params;
            }
            auto direction = parse_direction(e_direction);

            if (dry_run) {
                auto pairs = store.load_pairs(e_set);
                size_t shown = 0;
                for (const auto& p : pairs) {
                    if (shown++ >= 3) break;
                    std::cout << lrlforge::distill::render_translation_prompt(p.src, direction,
                                                                              langs)
                              << "\n---\n";
                }
                std::cout << "dry run: " << pairs.size() << " pairs planned\n";
                return 0;
            }

            lrlforge::gateway::Gateway gw;
            gw.set_audit_log(store.root() / "audit.jsonl");
            auto run = lrlforge::eval::run_eval(store, gw,
                                                lrlforge::config::require_profile(cfg, e_profile),
                                                e_set, direction, cfg.default_params, options,
                                                langs);
            lrlforge::eval::save_run(run, e_out);
            if (!e_csv.empty()) lrlforge::eval::emit_scores_csv(run, e_csv);
            for (const auto& [name, value] : run.corpus)
                std::cout << name << " = " << value << '\n';
            if (run.gap_count > 0)
                std::cout << "warning: " << run.gap_count << " pairs have endpoint gaps\n";
            return 0;
        }

        if (app.got_subcommand(judge_cmd)) {
            auto pairs = store.load_pairs(j_set);
            std::ifstream hyp_in(j_hyp);
            if (!hyp_in)
                throw lrlforge::Error("cli/unreadable", "cannot read hypotheses " + j_hyp);
            std::vector<lrlforge::judge::JudgeItem> items;
            std::string line;
            size_t i = 0;
            while (std::getline(hyp_in, line) && i < pairs.size()) {
                items.push_back({pairs[i].src.id, pairs[i].tgt_text, line});
                ++i;
            }
            if (items.size() != pairs.size())
                throw lrlforge::Error("cli/misaligned", "hypothesis count != eval set size");

            if (dry_run) {
                std::cout << lrlforge::judge::render_judge_prompt(items[0].golden,
                                                                  items[0].hypothesis)
                          << '\n';
                return 0;
            }
            lrlforge::gateway::Gateway gw;
            gw.set_audit_log(store.root() / "audit.jsonl");
            auto result = lrlforge::judge::judge_batch(
                gw, lrlforge::config::require_profile(cfg, j_profile), items, cfg.default_params);
            std::ofstream out(j_out, std::ios::trunc);
            for (const auto& v : result.verdicts)
                out << lrlforge::judge::verdict_to_jsonl(v) << '\n';
            std::cout << "mean " << result.mean_score << ", unparsed " << result.unparsed << '\n';
            return 0;
        }

        if (app.got_subcommand(report)) {
            std::vector<std::pair<std::string, lrlforge::eval::EvalRun>> runs;
            auto paths = split_csv(r_runs);
            auto labels = split_csv(r_labels);
            for (size_t i = 0; i < paths.size(); ++i) {
                auto run = lrlforge::eval::load_run(paths[i]);
                std::string label = i < labels.size() ? labels[i] : run.endpoint;
                runs.emplace_back(label, std::move(run));
            }
            lrlforge::eval::emit_comparison(runs, r_md, r_csv);
            if (!r_family.empty() && !runs.empty()) {
                auto family = lrlforge::eval::group_by_family(runs.front().second, langs);
                lrlforge::eval::emit_family_csv(family, r_family);
            }
            std::cout << "wrote " << r_md << " and " << r_csv << '\n';
            return 0;
        }
    } catch (const lrlforge::UsageError& e) {
        std::cerr << e.what() << '\n';
        return 2;
    } catch (const lrlforge::Error& e) {
        std::cerr << e.what() << '\n';
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
