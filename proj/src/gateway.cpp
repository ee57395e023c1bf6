#include "lrlforge/gateway.hpp"

#include <atomic>
#include <chrono>
#include <cstdlib>
#include <fstream>
#include <random>
#include <thread>

#include <httplib.h>
#include <json.hpp>

#include "lrlforge/digest.hpp"
#include "lrlforge/error.hpp"

using nlohmann::json;

namespace lrlforge::gateway {

namespace {

bool transient(int status) {
    return status == 0 || status == 429 || (status >= 500 && status < 600);
}

// Splits "http://host:port/path" for httplib.
std::pair<std::string, std::string> split_url(const std::string& url) {
    auto scheme_end = url.find("://");
    size_t host_begin = scheme_end == std::string::npos ? 0 : scheme_end + 3;
    auto path_begin = url.find('/', host_begin);
    if (path_begin == std::string::npos)
        return {url, "/v1/chat/completions"};
    return {url.substr(0, path_begin), url.substr(path_begin)};
}

Transport default_transport() {
    return [](const std::string& url, const std::string& body, const std::string& token) {
        auto [base, path] = split_url(url);
        httplib::Client client(base);
        client.set_read_timeout(120, 0);
        httplib::Headers headers;
        if (!token.empty()) headers.emplace("Authorization", "Bearer " + token);
        auto res = client.Post(path, headers, body, "application/json");
        if (!res) return HttpResponse{0, ""};
        return HttpResponse{res->status, res->body};
    };
}

}  // namespace

Gateway::Gateway() : Gateway(default_transport()) {}

Gateway::Gateway(Transport transport)
    : transport_(std::move(transport)),
      sleep_([](double s) { std::this_thread::sleep_for(std::chrono::duration<double>(s)); }) {}

std::string Gateway::build_request_body(const EndpointProfile& profile, const std::string& prompt,
                                        const GenerationParams& params) {
    json j = {{"model", profile.model_id},
              {"messages", json::array({{{"role", "user"}, {"content", prompt}}})},
              {"temperature", params.temperature},
              {"top_p", params.top_p},
              {"max_tokens", params.max_new_tokens}};
    if (!params.stop_sequences.empty()) j["stop"] = params.stop_sequences;
    return j.dump();
}

std::string Gateway::request_digest(const EndpointProfile& profile, const std::string& prompt,
                                    const GenerationParams& params) {
    return digest::to_hex(
        digest::fnv64(profile.name + "\x1f" + profile.model_id + "\x1f" +
                      build_request_body(profile, prompt, params)));
}

ChatExchange Gateway::complete(const EndpointProfile& profile, const std::string& prompt,
                               const GenerationParams& params) {
    ChatExchange ex;
    ex.prompt = prompt;
    ex.request_digest = request_digest(profile, prompt, params);
    if (prompt.empty()) {
        ex.finish_reason = FinishReason::ERROR;
        ex.error = "gateway/empty-prompt";
        audit(ex);
        return ex;
    }

    const std::string token = [&] {
        if (profile.auth_env_var.empty()) return std::string();
        const char* v = std::getenv(profile.auth_env_var.c_str());
        return v ? std::string(v) : std::string();
    }();
    const std::string body = build_request_body(profile, prompt, params);

    std::mt19937_64 rng(jitter_seed_ ^ digest::fnv64(ex.request_digest));
    for (int attempt = 1; attempt <= retry_.max_attempts; ++attempt) {
        ex.attempt = attempt;
        auto t0 = std::chrono::steady_clock::now();
        HttpResponse res = transport_(profile.base_url, body, token);
        ex.latency_ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                            std::chrono::steady_clock::now() - t0)
                            .count();
        ex.status = res.status;

        if (res.status == 200) {
            try {
                json j = json::parse(res.body);
                const auto& choice = j.at("choices").at(0);
                ex.response_text = choice.at("message").at("content").get<std::string>();
                std::string fr = choice.value("finish_reason", "stop");
                ex.finish_reason = fr == "length" ? FinishReason::LENGTH : FinishReason::STOP;
            } catch (const json::exception& e) {
                ex.finish_reason = FinishReason::ERROR;
                ex.error = std::string("gateway/bad-response: ") + e.what();
            }
            audit(ex);
            return ex;
        }
        if (!transient(res.status)) {
            ex.finish_reason = FinishReason::ERROR;
            ex.error = "gateway/permanent-failure: status " + std::to_string(res.status);
            audit(ex);
            return ex;
        }
        if (attempt < retry_.max_attempts) {
            // full jitter: uniform in [0, base * factor^(attempt-1)]
            double cap = retry_.base_delay_s;
            for (int i = 1; i < attempt; ++i) cap *= retry_.factor;
            std::uniform_real_distribution<double> dist(0.0, cap);
            sleep_(dist(rng));
        }
    }
    ex.finish_reason = FinishReason::ERROR;
    ex.error = "gateway/retries-exhausted: last status " + std::to_string(ex.status);
    audit(ex);
    return ex;
}

std::vector<ChatExchange> Gateway::complete_batch(const EndpointProfile& profile,
                                                  const std::vector<std::string>& prompts,
                                                  const GenerationParams& params) {
    if (prompts.empty()) throw Error("gateway/empty-batch", "no prompts given");
    std::vector<ChatExchange> results(prompts.size());
    const int workers = std::max(1, std::min<int>(profile.max_concurrency, prompts.size()));

    std::atomic<size_t> next{0};
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (int w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
            while (true) {
                size_t i = next.fetch_add(1);
                if (i >= prompts.size()) break;
                results[i] = complete(profile, prompts[i], params);
            }
        });
    }
    for (auto& t : pool) t.join();
    return results;
}

void Gateway::audit(const ChatExchange& ex) {
    if (!audit_path_) return;
    json j = {{"request_digest", ex.request_digest},
              {"prompt", ex.prompt},
              {"response_text", ex.response_text},
              {"latency_ms", ex.latency_ms},
              {"attempt", ex.attempt},
              {"finish_reason", ex.finish_reason == FinishReason::STOP     ? "STOP"
                                : ex.finish_reason == FinishReason::LENGTH ? "LENGTH"
                                                                           : "ERROR"},
              {"status", ex.status}};
    if (!ex.error.empty()) j["error"] = ex.error;
    std::lock_guard<std::mutex> lock(audit_mutex_);
    std::ofstream out(*audit_path_, std::ios::app);
    out << j.dump() << '\n';
}

}  // namespace lrlforge::gateway
