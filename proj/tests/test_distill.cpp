#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <atomic>
#include <filesystem>
#include <fstream>
#include <json.hpp>

#include "lrlforge/distill.hpp"

using namespace lrlforge;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

// Case-study exemplar: translation with a trailing explanatory note.
const std::string kNoteOutput =
    "Dëi gouf och gesäftlech gesëtt datt ``si si och net an Obergrenzen vum ieren "
    "Entwéckelungsschatz, Responsabilität a Fähigkeeten uerecht bestallt.'' (Note: Please keep in "
    "mind that Luxembourgish is a complex and nuanced language, and translations may vary "
    "depending on regional dialects and contexts. This translation is provided in standard "
    "Luxembourgish)";

const std::string kNoteGroundTruth =
    "Hien huet bäigefüügt, datt ``se awer net opgefuerdert sollte ginn, Verflichtungen ze "
    "iwwerhuelen, déi iwwer hiren Entwécklungsniveau, hir Verantwortung a Fäegkeeten "
    "erausginn.''";

// Case-study exemplar: runaway repetitive generation.
const std::string kRepetitionOutput =
    "Here is the translation: D'United States Strategic Command vum ustrategeschen vum "
    "ustrategeschen Ufuerderungsbüro vum ustrategeschen Ufuerderungsbüro vum ustrategeschen "
    "Ufuerderungsbüro vum ustrategeschen Ufuerderungsbüro vum ustrategeschen Ufuerderungsbüro "
    "vum ustrategeschen ...";

const std::string kRepetitionGroundTruth =
    "D'US Strategic Command vum amerikanesche Verdeedegungsministère verfollegt den Schrott.";

struct TempStore {
    fs::path dir;
    corpus::Store store;
    TempStore(const std::string& tag)
        : dir(fs::temp_directory_path() / ("lrlforge_distill_" + tag)), store([&] {
              fs::remove_all(dir);
              fs::create_directories(dir);
              return dir / "data";
          }()) {}
    ~TempStore() { fs::remove_all(dir); }
};

void ingest_numbered(corpus::Store& store, const fs::path& dir, const std::string& name, int n) {
    auto f = dir / (name + ".txt");
    std::ofstream out(f);
    for (int i = 0; i < n; ++i) out << "Saz nummer " << i << " am Text.\n";
    out.close();
    store.ingest_monolingual(f, "en", "synthetic", name);
}

gateway::Transport echo_transport() {
    return [](const std::string&, const std::string& body, const std::string&) {
        auto prompt = json::parse(body)["messages"][0]["content"].get<std::string>();
        auto pos = prompt.rfind("Input: ");
        std::string text = pos == std::string::npos ? prompt : prompt.substr(pos + 7);
        json j = {{"choices",
                   {{{"message", {{"role", "assistant"}, {"content", text}}},
                     {"finish_reason", "stop"}}}}};
        return gateway::HttpResponse{200, j.dump()};
    };
}

gateway::EndpointProfile profile() {
    gateway::EndpointProfile p;
    p.name = "mock";
    p.base_url = "http://localhost:9";
    p.model_id = "mock-teacher";
    p.auth_env_var = "LRLFORGE_TEST_TOKEN";
    p.max_concurrency = 4;
    return p;
}

}  // namespace

TEST_CASE("translation prompt renders the pinned instruction wording") {
    corpus::Segment seg{"s1", "Hello.", "en", "t", ""};
    auto table = langinfo::LanguageTable::builtin();
    auto prompt = distill::render_translation_prompt(seg, {"en", "lb"}, table);
    CHECK(prompt ==
          "Translate the following English input text into Luxembourgish. Do not include any "
          "additional information or unrelated content.\n"
          "Input: Hello.");
}

TEST_CASE("translation prompt with dictionary entries lists them in order") {
    corpus::Segment seg{"s1", "the house", "en", "t", ""};
    auto table = langinfo::LanguageTable::builtin();
    std::vector<corpus::DictionaryEntry> entries = {
        {"Haus", "noun", {"house", "home"}, {}},
        {"Gaart", "noun", {"garden"}, {}},
    };
    auto prompt = distill::render_translation_prompt(seg, {"en", "lb"}, table, &entries);
    auto haus = prompt.find("- Haus: house, home");
    auto gaart = prompt.find("- Gaart: garden");
    REQUIRE(haus != std::string::npos);
    REQUIRE(gaart != std::string::npos);
    CHECK(haus < gaart);
    CHECK(prompt.find("Dictionary entries:") < haus);
    CHECK(prompt.rfind("Input: the house") == prompt.size() - std::string("Input: the house").size());
}

TEST_CASE("translation prompt rejects mismatched segment language") {
    corpus::Segment seg{"s1", "Hello.", "fr", "t", ""};
    auto table = langinfo::LanguageTable::builtin();
    CHECK_THROWS(distill::render_translation_prompt(seg, {"en", "lb"}, table));
}

TEST_CASE("sanitize accepts the note-bearing exemplar with the note stripped") {
    auto v = distill::sanitize(kNoteOutput);
    CHECK(v.accepted);
    REQUIRE(v.reason.has_value());
    CHECK(*v.reason == corpus::RejectReason::EXTRANEOUS_NOTE);
    CHECK(v.cleaned_text.find("(Note:") == std::string::npos);
    CHECK(v.cleaned_text.find("Responsabilität a Fähigkeeten uerecht bestallt.") !=
          std::string::npos);
}

TEST_CASE("sanitize rejects the repetition exemplar") {
    auto v = distill::sanitize(kRepetitionOutput);
    CHECK_FALSE(v.accepted);
    REQUIRE(v.reason.has_value());
    CHECK(*v.reason == corpus::RejectReason::REPETITION);
}

TEST_CASE("sanitize passes both ground-truth sentences untouched") {
    for (const auto& text : {kNoteGroundTruth, kRepetitionGroundTruth}) {
        auto v = distill::sanitize(text);
        CHECK(v.accepted);
        CHECK_FALSE(v.reason.has_value());
        CHECK(v.cleaned_text == text);
    }
}

TEST_CASE("sanitize strips the assistant preamble") {
    auto v = distill::sanitize("Here is the translation: Moien Welt.");
    CHECK(v.accepted);
    CHECK(v.cleaned_text == "Moien Welt.");
}

TEST_CASE("sanitize rejects empty and whitespace-only remainders") {
    CHECK(*distill::sanitize("").reason == corpus::RejectReason::EMPTY);
    CHECK(*distill::sanitize("Here is the translation:   ").reason ==
          corpus::RejectReason::EMPTY);
}

TEST_CASE("sanitize flags runaway length when a source length is known") {
    std::string raw(100, 'x');
    auto v = distill::sanitize(raw, 10);
    CHECK_FALSE(v.accepted);
    CHECK(*v.reason == corpus::RejectReason::LENGTH_OVERFLOW);
    // disabled when the source length is unknown
    CHECK(distill::sanitize(raw).accepted);
    // within 4x passes
    CHECK(distill::sanitize(std::string(40, 'x'), 10).accepted);
}

TEST_CASE("sanitize is idempotent on accepted output") {
    for (const auto& text : {kNoteOutput, kRepetitionGroundTruth,
                             std::string("Here is the translation: Moien.")}) {
        auto v = distill::sanitize(text);
        if (!v.accepted) continue;
        auto again = distill::sanitize(v.cleaned_text);
        CHECK(again.accepted);
        CHECK(again.cleaned_text == v.cleaned_text);
    }
}

TEST_CASE("echo teacher distills every segment as accepted") {
    TempStore ts("echo");
    ingest_numbered(ts.store, ts.dir, "mono", 100);
    gateway::Gateway gw(echo_transport());
    gw.set_sleep([](double) {});

    distill::DistillJob job;
    job.dataset = "mono";
    job.direction = {"en", "lb"};
    job.teacher = corpus::Teacher::DG;
    job.profile = profile();
    job.output_name = "mono-dg";

    auto table = langinfo::LanguageTable::builtin();
    auto manifest = distill::run_distill(ts.store, job, gw, table);
    CHECK(manifest.record_count == 100);
    CHECK(manifest.accepted_count == 100);
    CHECK(manifest.rejected_count == 0);

    auto pairs = ts.store.load_pairs("mono-dg");
    REQUIRE(pairs.size() == 100);
    for (const auto& p : pairs) {
        CHECK(p.tgt_text == p.src.text);
        CHECK(p.teacher == corpus::Teacher::DG);
        CHECK(p.sanitized);
        CHECK(p.accepted());
    }
}

TEST_CASE("repetition loops are rejected but still persisted") {
    TempStore ts("rep");
    ingest_numbered(ts.store, ts.dir, "mono", 100);
    std::atomic<int> call{0};
    gateway::Gateway gw([&](const std::string&, const std::string&, const std::string&) {
        int i = call++;
        std::string text = i % 20 == 0 ? kRepetitionOutput : "Eng propper Iwwersetzung " +
                                                                 std::to_string(i) + ".";
        json j = {{"choices",
                   {{{"message", {{"role", "assistant"}, {"content", text}}},
                     {"finish_reason", "stop"}}}}};
        return gateway::HttpResponse{200, j.dump()};
    });
    gw.set_sleep([](double) {});

    distill::DistillJob job;
    job.dataset = "mono";
    job.direction = {"en", "lb"};
    job.teacher = corpus::Teacher::DN;
    job.profile = profile();
    job.output_name = "mono-dn";

    auto table = langinfo::LanguageTable::builtin();
    auto manifest = distill::run_distill(ts.store, job, gw, table);
    CHECK(manifest.record_count == 100);
    CHECK(manifest.accepted_count == 95);
    CHECK(manifest.rejected_count == 5);
}

TEST_CASE("kill-and-resume reproduces the uninterrupted digest") {
    TempStore ts("resume");
    ingest_numbered(ts.store, ts.dir, "mono", 1000);
    auto table = langinfo::LanguageTable::builtin();

    auto base_job = [&](std::string out) {
        distill::DistillJob job;
        job.dataset = "mono";
        job.direction = {"en", "lb"};
        job.teacher = corpus::Teacher::DG;
        job.profile = profile();
        job.output_name = std::move(out);
        job.checkpoint_every = 100;
        return job;
    };

    // uninterrupted reference run
    gateway::Gateway gw1(echo_transport());
    gw1.set_sleep([](double) {});
    auto full = distill::run_distill(ts.store, base_job("full"), gw1, table);

    // run that dies permanently at call 500
    std::atomic<int> calls{0};
    gateway::Gateway dying([&](const std::string& url, const std::string& body,
                               const std::string& tok) {
        if (calls++ >= 500) return gateway::HttpResponse{401, "token expired"};
        auto prompt = json::parse(body)["messages"][0]["content"].get<std::string>();
        auto pos = prompt.rfind("Input: ");
        json j = {{"choices",
                   {{{"message",
                      {{"role", "assistant"}, {"content", prompt.substr(pos + 7)}}},
                     {"finish_reason", "stop"}}}}};
        return gateway::HttpResponse{200, j.dump()};
    });
    dying.set_sleep([](double) {});

    std::string resume_token;
    try {
        distill::run_distill(ts.store, base_job("resumed"), dying, table);
        FAIL("expected halt");
    } catch (const distill::HaltedError& e) {
        resume_token = e.resume_token();
    }
    REQUIRE_FALSE(resume_token.empty());

    gateway::Gateway gw2(echo_transport());
    gw2.set_sleep([](double) {});
    auto job = base_job("resumed");
    job.resume_token = resume_token;
    auto resumed = distill::run_distill(ts.store, job, gw2, table);

    CHECK(resumed.record_count == full.record_count);
    CHECK(resumed.accepted_count == full.accepted_count);
    CHECK(resumed.content_digest == full.content_digest);
}

TEST_CASE("DGDC requires dict_k and dict_k requires DGDC") {
    TempStore ts("dgdc");
    ingest_numbered(ts.store, ts.dir, "mono", 5);
    gateway::Gateway gw(echo_transport());
    gw.set_sleep([](double) {});
    auto table = langinfo::LanguageTable::builtin();

    distill::DistillJob job;
    job.dataset = "mono";
    job.direction = {"en", "lb"};
    job.teacher = corpus::Teacher::DGDC;
    job.profile = profile();
    job.output_name = "bad";
    CHECK_THROWS(distill::run_distill(ts.store, job, gw, table));  // dict_k unset

    job.teacher = corpus::Teacher::DG;
    job.dict_k = 3;
    CHECK_THROWS(distill::run_distill(ts.store, job, gw, table));  // dict_k without DGDC
}

TEST_CASE("audit sample is deterministic and re-import computes the fraction") {
    TempStore ts("audit");
    ingest_numbered(ts.store, ts.dir, "mono", 80);
    gateway::Gateway gw(echo_transport());
    gw.set_sleep([](double) {});
    auto table = langinfo::LanguageTable::builtin();

    distill::DistillJob job;
    job.dataset = "mono";
    job.direction = {"en", "lb"};
    job.teacher = corpus::Teacher::DG;
    job.profile = profile();
    job.output_name = "mono-dg";
    distill::run_distill(ts.store, job, gw, table);

    auto csv1 = ts.dir / "audit1.csv";
    auto csv2 = ts.dir / "audit2.csv";
    auto ids1 = distill::audit_sample(ts.store, "mono-dg", 50, 3407, csv1);
    auto ids2 = distill::audit_sample(ts.store, "mono-dg", 50, 3407, csv2);
    CHECK(ids1 == ids2);
    CHECK(ids1.size() == 50);

    CHECK_THROWS(distill::audit_sample(ts.store, "mono-dg", 0, 1, csv1));
    CHECK_THROWS(distill::audit_sample(ts.store, "mono-dg", 81, 1, csv1));

    // fill verdicts: first 46 correct, remaining 4 wrong
    std::ifstream in(csv1);
    std::string header, line;
    std::getline(in, header);
    std::vector<std::string> rows;
    while (std::getline(in, line)) rows.push_back(line);
    in.close();
    REQUIRE(rows.size() == 50);
    std::ofstream out(csv1);
    out << header << "\n";
    for (size_t i = 0; i < rows.size(); ++i)
        out << rows[i] << (i < 46 ? "correct" : "wrong") << "\n";
    out.close();

    auto result = distill::audit_import(csv1);
    CHECK(result.total == 50);
    CHECK(result.fully_correct == 46);
    CHECK(result.fraction_correct == doctest::Approx(0.92));
}
