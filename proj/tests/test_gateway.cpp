#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <atomic>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <random>
#include <thread>

#include "lrlforge/gateway.hpp"

using namespace lrlforge;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

gateway::EndpointProfile test_profile(int concurrency = 4) {
    gateway::EndpointProfile p;
    p.name = "test";
    p.base_url = "http://localhost:9";
    p.model_id = "test-model";
    p.auth_env_var = "LRLFORGE_TEST_TOKEN";
    p.max_concurrency = concurrency;
    return p;
}

std::string ok_body(const std::string& text) {
    json j = {{"choices", {{{"message", {{"role", "assistant"}, {"content", text}}},
                           {"finish_reason", "stop"}}}}};
    return j.dump();
}

}  // namespace

TEST_CASE("request body carries model, prompt, and sampling params") {
    auto profile = test_profile();
    gateway::GenerationParams params;
    auto body = json::parse(gateway::Gateway::build_request_body(profile, "Moien", params));
    CHECK(body["model"] == "test-model");
    CHECK(body["messages"][0]["role"] == "user");
    CHECK(body["messages"][0]["content"] == "Moien");
    CHECK(body["temperature"] == doctest::Approx(0.1));
    CHECK(body["top_p"] == doctest::Approx(0.9));
    CHECK(body["max_tokens"] == 512);
}

TEST_CASE("success on first attempt") {
    gateway::Gateway gw([](const std::string&, const std::string&, const std::string&) {
        return gateway::HttpResponse{200, ok_body("Hello")};
    });
    gw.set_sleep([](double) {});
    auto ex = gw.complete(test_profile(), "hi", {});
    CHECK(ex.ok());
    CHECK(ex.response_text == "Hello");
    CHECK(ex.attempt == 1);
    CHECK(ex.status == 200);
}

TEST_CASE("transient failures retry with bounded exponential backoff") {
    int calls = 0;
    gateway::Gateway gw([&](const std::string&, const std::string&, const std::string&) {
        ++calls;
        if (calls <= 3) return gateway::HttpResponse{calls == 1 ? 0 : (calls == 2 ? 429 : 503), ""};
        return gateway::HttpResponse{200, ok_body("done")};
    });
    std::vector<double> delays;
    gw.set_sleep([&](double s) { delays.push_back(s); });
    gw.set_jitter_seed(99);
    auto ex = gw.complete(test_profile(), "hi", {});
    CHECK(ex.ok());
    CHECK(ex.attempt == 4);
    REQUIRE(delays.size() == 3);
    // full jitter: each delay uniform in [0, base * factor^(attempt-1)]
    for (size_t i = 0; i < delays.size(); ++i) {
        CHECK(delays[i] >= 0.0);
        CHECK(delays[i] <= 1.0 * std::pow(2.0, static_cast<double>(i)) + 1e-12);
    }
}

TEST_CASE("gives up after max attempts") {
    int calls = 0;
    gateway::Gateway gw([&](const std::string&, const std::string&, const std::string&) {
        ++calls;
        return gateway::HttpResponse{500, "boom"};
    });
    gw.set_sleep([](double) {});
    auto ex = gw.complete(test_profile(), "hi", {});
    CHECK_FALSE(ex.ok());
    CHECK(calls == 5);
    CHECK(ex.status == 500);
}

TEST_CASE("permanent 4xx does not retry") {
    int calls = 0;
    gateway::Gateway gw([&](const std::string&, const std::string&, const std::string&) {
        ++calls;
        return gateway::HttpResponse{400, "bad request"};
    });
    gw.set_sleep([](double) { FAIL("no sleep expected on permanent failure"); });
    auto ex = gw.complete(test_profile(), "hi", {});
    CHECK_FALSE(ex.ok());
    CHECK(calls == 1);
    CHECK(ex.status == 400);
}

TEST_CASE("malformed success body is an error, not a crash") {
    gateway::Gateway gw([](const std::string&, const std::string&, const std::string&) {
        return gateway::HttpResponse{200, "not json"};
    });
    gw.set_sleep([](double) {});
    auto ex = gw.complete(test_profile(), "hi", {});
    CHECK_FALSE(ex.ok());
    CHECK_FALSE(ex.error.empty());
}

TEST_CASE("batch preserves input order under randomized latency") {
    std::mt19937 rng(31);
    gateway::Gateway gw([&](const std::string&, const std::string& body, const std::string&) {
        std::this_thread::sleep_for(std::chrono::microseconds(100 + rng() % 900));
        auto prompt = json::parse(body)["messages"][0]["content"].get<std::string>();
        return gateway::HttpResponse{200, ok_body("echo:" + prompt)};
    });
    gw.set_sleep([](double) {});
    std::vector<std::string> prompts;
    for (int i = 0; i < 64; ++i) prompts.push_back("p" + std::to_string(i));
    auto out = gw.complete_batch(test_profile(8), prompts, {});
    REQUIRE(out.size() == prompts.size());
    for (size_t i = 0; i < prompts.size(); ++i) {
        CHECK(out[i].ok());
        CHECK(out[i].response_text == "echo:" + prompts[i]);
    }
}

TEST_CASE("batch never exceeds the concurrency ceiling") {
    std::atomic<int> in_flight{0};
    std::atomic<int> peak{0};
    gateway::Gateway gw([&](const std::string&, const std::string&, const std::string&) {
        int cur = ++in_flight;
        int prev = peak.load();
        while (cur > prev && !peak.compare_exchange_weak(prev, cur)) {}
        std::this_thread::sleep_for(std::chrono::milliseconds(2));
        --in_flight;
        return gateway::HttpResponse{200, ok_body("x")};
    });
    gw.set_sleep([](double) {});
    std::vector<std::string> prompts(40, "p");
    auto out = gw.complete_batch(test_profile(3), prompts, {});
    CHECK(out.size() == 40);
    CHECK(peak.load() <= 3);
    CHECK(peak.load() >= 1);
}

TEST_CASE("per-item batch failures do not abort the batch") {
    std::atomic<int> calls{0};
    gateway::Gateway gw([&](const std::string&, const std::string& body, const std::string&) {
        auto prompt = json::parse(body)["messages"][0]["content"].get<std::string>();
        ++calls;
        if (prompt == "bad") return gateway::HttpResponse{404, ""};
        return gateway::HttpResponse{200, ok_body(prompt)};
    });
    gw.set_sleep([](double) {});
    auto out = gw.complete_batch(test_profile(2), {"a", "bad", "c"}, {});
    REQUIRE(out.size() == 3);
    CHECK(out[0].ok());
    CHECK_FALSE(out[1].ok());
    CHECK(out[2].ok());
}

TEST_CASE("audit log appends one JSONL entry per exchange") {
    auto dir = fs::temp_directory_path() / "lrlforge_gw_audit";
    fs::create_directories(dir);
    auto log = dir / "audit.jsonl";
    fs::remove(log);

    gateway::Gateway gw([](const std::string&, const std::string&, const std::string&) {
        return gateway::HttpResponse{200, ok_body("out")};
    });
    gw.set_sleep([](double) {});
    gw.set_audit_log(log);
    gw.complete(test_profile(), "one", {});
    gw.complete(test_profile(), "two", {});

    std::ifstream in(log);
    std::string line;
    int n = 0;
    while (std::getline(in, line)) {
        auto j = json::parse(line);
        CHECK(j.contains("request_digest"));
        CHECK(j.contains("latency_ms"));
        CHECK(j.contains("attempt"));
        CHECK(j.contains("finish_reason"));
        ++n;
    }
    CHECK(n == 2);
    fs::remove_all(dir);
}

TEST_CASE("request digest is stable and prompt-sensitive") {
    auto p = test_profile();
    gateway::GenerationParams params;
    auto a = gateway::Gateway::request_digest(p, "x", params);
    auto b = gateway::Gateway::request_digest(p, "x", params);
    auto c = gateway::Gateway::request_digest(p, "y", params);
    CHECK(a == b);
    CHECK(a != c);
}
