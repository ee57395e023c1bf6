#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <map>
#include <sstream>

#include "lrlforge/eval.hpp"

using namespace lrlforge;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    REQUIRE(in.good());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

struct TempStore {
    fs::path dir;
    corpus::Store store;
    TempStore(const std::string& tag)
        : dir(fs::temp_directory_path() / ("lrlforge_eval_" + tag)), store([&] {
              fs::remove_all(dir);
              fs::create_directories(dir);
              return dir / "data";
          }()) {}
    ~TempStore() { fs::remove_all(dir); }
};

// TSV eval set with distinct references so echoing them is detectable
std::map<std::string, std::string> make_eval_set(corpus::Store& store, const fs::path& dir,
                                                 const std::string& name, int n) {
    std::map<std::string, std::string> ref_by_src;
    auto f = dir / (name + ".tsv");
    std::ofstream out(f);
    for (int i = 0; i < n; ++i) {
        std::string src = "English sentence number " + std::to_string(i) + " here.";
        std::string ref = "Lëtzebuergesche Saz nummer " + std::to_string(i) + " hei.";
        out << src << "\t" << ref << "\n";
        ref_by_src[src] = ref;
    }
    out.close();
    store.ingest_eval_set(f, "en", "lb", name);
    return ref_by_src;
}

gateway::EndpointProfile profile(const std::string& name) {
    gateway::EndpointProfile p;
    p.name = name;
    p.base_url = "http://localhost:9";
    p.model_id = name;
    p.auth_env_var = "LRLFORGE_TEST_TOKEN";
    p.max_concurrency = 4;
    return p;
}

gateway::HttpResponse reply(const std::string& text) {
    json j = {{"choices", {{{"message", {{"role", "assistant"}, {"content", text}}},
                           {"finish_reason", "stop"}}}}};
    return {200, j.dump()};
}

std::string prompt_of(const std::string& body) {
    return json::parse(body)["messages"][0]["content"].get<std::string>();
}

// answers translation prompts with the matching reference, judge prompts with [[1.0]]
gateway::Transport perfect_transport(const std::map<std::string, std::string>& ref_by_src) {
    return [ref_by_src](const std::string&, const std::string& body, const std::string&) {
        auto prompt = prompt_of(body);
        if (prompt.rfind("Your task is to assess", 0) == 0) return reply("[[1.0]]");
        auto pos = prompt.rfind("Input: ");
        auto src = prompt.substr(pos + 7);
        auto it = ref_by_src.find(src);
        if (it == ref_by_src.end()) return gateway::HttpResponse{404, "unknown src"};
        return reply(it->second);
    };
}

}  // namespace

TEST_CASE("echo endpoint scores perfectly on every metric") {
    TempStore ts("echo");
    auto refs = make_eval_set(ts.store, ts.dir, "val", 20);
    gateway::Gateway gw(perfect_transport(refs));
    gw.set_sleep([](double) {});
    auto table = langinfo::LanguageTable::builtin();
    auto vocab = text_units::SubwordVocab::from_pieces({"<unk>"});

    eval::EvalOptions opts;
    opts.metrics_requested = {metrics::MetricName::SPBLEU, metrics::MetricName::CHRF_PP,
                              metrics::MetricName::JACCARD, metrics::MetricName::LLMAAJ};
    opts.vocab = &vocab;
    auto jp = profile("judge");
    opts.judge_profile = &jp;

    auto run = eval::run_eval(ts.store, gw, profile("model"), "val", {"en", "lb"}, {}, opts, table);
    CHECK(run.per_pair.size() == 20);
    CHECK(run.gap_count == 0);
    CHECK(run.corpus.at("spbleu") == doctest::Approx(100.0));
    CHECK(run.corpus.at("chrfpp") == doctest::Approx(100.0));
    CHECK(run.corpus.at("jaccard") == doctest::Approx(1.0));
    CHECK(run.corpus.at("llmaaj") == doctest::Approx(1.0));
    CHECK(run.corpus.at("good_rate") == doctest::Approx(100.0));
    for (const auto& ps : run.per_pair) {
        CHECK(ps.values.at("chrfpp") == doctest::Approx(100.0));
        CHECK_FALSE(ps.gap);
    }
}

TEST_CASE("empty model outputs score zero chrF++ per pair") {
    TempStore ts("empty");
    make_eval_set(ts.store, ts.dir, "val", 5);
    gateway::Gateway gw([](const std::string&, const std::string& body, const std::string&) {
        return reply("x");  // sanitizer keeps it; disjoint from every reference
    });
    gw.set_sleep([](double) {});
    auto table = langinfo::LanguageTable::builtin();

    eval::EvalOptions opts;
    opts.metrics_requested = {metrics::MetricName::CHRF_PP, metrics::MetricName::JACCARD};
    auto run = eval::run_eval(ts.store, gw, profile("model"), "val", {"en", "lb"}, {}, opts, table);
    for (const auto& ps : run.per_pair) {
        CHECK(ps.values.at("chrfpp") == doctest::Approx(0.0));
        CHECK(ps.values.at("jaccard") == doctest::Approx(0.0));
    }
}

TEST_CASE("endpoint failures leave gaps without aborting") {
    TempStore ts("gaps");
    auto refs = make_eval_set(ts.store, ts.dir, "val", 10);
    int call = 0;
    std::mutex mu;
    gateway::Gateway gw([&](const std::string&, const std::string& body, const std::string&) {
        auto prompt = prompt_of(body);
        auto src = prompt.substr(prompt.rfind("Input: ") + 7);
        {
            std::lock_guard<std::mutex> lk(mu);
            ++call;
        }
        if (src.find("number 3 ") != std::string::npos ||
            src.find("number 7 ") != std::string::npos)
            return gateway::HttpResponse{404, "gone"};
        return reply(refs.at(src));
    });
    gw.set_sleep([](double) {});
    auto table = langinfo::LanguageTable::builtin();

    eval::EvalOptions opts;
    opts.metrics_requested = {metrics::MetricName::CHRF_PP};
    auto run = eval::run_eval(ts.store, gw, profile("model"), "val", {"en", "lb"}, {}, opts, table);
    CHECK(run.per_pair.size() == 10);
    CHECK(run.gap_count == 2);
    size_t gaps = 0;
    for (const auto& ps : run.per_pair)
        if (ps.gap) ++gaps;
    CHECK(gaps == 2);
}

TEST_CASE("family grouping averages per family") {
    eval::EvalRun run;
    auto add = [&](std::string id, std::string lang, double v) {
        eval::PairScore ps;
        ps.pair_id = std::move(id);
        ps.attrs["src_lang"] = std::move(lang);
        ps.attrs["tgt_lang"] = "en";
        ps.attrs["direction"] = ps.attrs["src_lang"] + "-en";
        ps.attrs["teacher"] = "HUMAN";
        ps.values["chrfpp"] = v;
        run.per_pair.push_back(std::move(ps));
    };
    add("1", "lb", 40.0);   // Indo-European
    add("2", "de", 60.0);   // Indo-European
    add("3", "ms", 80.0);   // Austronesian
    add("4", "dz", 90.0);   // Sino-Tibetan
    add("5", "kha", 10.0);  // Austroasiatic

    auto table = langinfo::LanguageTable::builtin();
    auto groups = eval::group_by_family(run, table);
    std::map<std::string, double> by_family;
    std::map<std::string, uint64_t> counts;
    for (const auto& g : groups) {
        by_family[g.grouping.at("family")] = g.metric.value;
        counts[g.grouping.at("family")] = g.n_pairs;
    }
    CHECK(by_family.at("Indo-European") == doctest::Approx(50.0));
    CHECK(by_family.at("Austronesian") == doctest::Approx(80.0));
    CHECK(by_family.at("Sino-Tibetan") == doctest::Approx(90.0));
    CHECK(by_family.at("Austroasiatic") == doctest::Approx(10.0));
    CHECK(counts.at("Indo-European") == 2);
    CHECK(counts.at("Austroasiatic") == 1);
}

TEST_CASE("HDI tier binning at the boundaries") {
    auto dir = fs::temp_directory_path() / "lrlforge_hdi";
    fs::create_directories(dir);
    auto csv = dir / "langs.csv";
    {
        std::ofstream out(csv);
        out << "code,display_name,family,script,hdi,web_share\n"
               "aa,LangA,F,Latn,0.80,0.5\n"
               "bb,LangB,F,Latn,0.70,0.5\n"
               "cc,LangC,F,Latn,0.55,0.5\n"
               "dd,LangD,F,Latn,0.5499,0.5\n"
               "ee,LangE,F,Latn,0.95,0.5\n";
    }
    auto table = langinfo::LanguageTable::load_csv(csv);
    std::vector<std::pair<std::string, double>> scores = {
        {"aa", 0.9}, {"bb", 0.7}, {"cc", 0.5}, {"dd", 0.3}, {"ee", 0.95}};
    auto a = eval::hdi_correlation(scores, table);
    CHECK(a.tier_counts.at("VeryHigh") == 2);  // 0.80 and 0.95
    CHECK(a.tier_counts.at("High") == 1);      // 0.70
    CHECK(a.tier_counts.at("Medium") == 1);    // 0.55
    CHECK(a.tier_counts.at("Low") == 1);       // 0.5499
    CHECK(a.r > 0.9);  // monotone data correlates strongly
    fs::remove_all(dir);
}

TEST_CASE("pearson boundary cases via hdi_correlation") {
    auto table = langinfo::LanguageTable::builtin();
    // two languages make a degenerate but defined correlation input
    std::vector<std::pair<std::string, double>> scores = {{"lb", 0.2}, {"de", 0.8}, {"fr", 0.5}};
    auto a = eval::hdi_correlation(scores, table);
    CHECK(a.r >= -1.0);
    CHECK(a.r <= 1.0);
}

TEST_CASE("run save/load round trip and deterministic CSV export") {
    TempStore ts("save");
    auto refs = make_eval_set(ts.store, ts.dir, "val", 6);
    gateway::Gateway gw(perfect_transport(refs));
    gw.set_sleep([](double) {});
    auto table = langinfo::LanguageTable::builtin();

    eval::EvalOptions opts;
    opts.metrics_requested = {metrics::MetricName::CHRF_PP, metrics::MetricName::JACCARD};
    auto run = eval::run_eval(ts.store, gw, profile("model"), "val", {"en", "lb"}, {}, opts, table);

    auto path = ts.dir / "run.json";
    eval::save_run(run, path);
    auto loaded = eval::load_run(path);
    CHECK(loaded.per_pair.size() == run.per_pair.size());
    CHECK(loaded.corpus.at("chrfpp") == doctest::Approx(run.corpus.at("chrfpp")));
    CHECK(loaded.eval_dataset == run.eval_dataset);

    auto csv1 = ts.dir / "scores1.csv";
    auto csv2 = ts.dir / "scores2.csv";
    eval::emit_scores_csv(run, csv1);
    eval::emit_scores_csv(loaded, csv2);
    CHECK(slurp(csv1) == slurp(csv2));
    CHECK(slurp(csv1).rfind("pair_id,metric,value,direction,teacher,subword_digest", 0) == 0);
}

TEST_CASE("comparison, curve, and family exports are written") {
    TempStore ts("reports");
    auto refs = make_eval_set(ts.store, ts.dir, "val", 4);
    gateway::Gateway gw(perfect_transport(refs));
    gw.set_sleep([](double) {});
    auto table = langinfo::LanguageTable::builtin();

    eval::EvalOptions opts;
    opts.metrics_requested = {metrics::MetricName::CHRF_PP};
    auto run = eval::run_eval(ts.store, gw, profile("model"), "val", {"en", "lb"}, {}, opts, table);

    eval::emit_comparison({{"base", run}, {"tuned", run}}, ts.dir / "cmp.md", ts.dir / "cmp.csv");
    auto md = slurp(ts.dir / "cmp.md");
    CHECK(md.find("base") != std::string::npos);
    CHECK(md.find("tuned") != std::string::npos);
    CHECK(md.find("|") != std::string::npos);

    eval::emit_curve_csv({{0.1, {{"spbleu", 10.0}}}, {1.0, {{"spbleu", 20.0}}}},
                         ts.dir / "curve.csv");
    auto curve = slurp(ts.dir / "curve.csv");
    CHECK(curve.find("0.1") != std::string::npos);
    CHECK(curve.find("spbleu") != std::string::npos);

    auto groups = eval::group_by_family(run, table);
    eval::emit_family_csv(groups, ts.dir / "family.csv");
    CHECK(slurp(ts.dir / "family.csv").find("Indo-European") != std::string::npos);
}
