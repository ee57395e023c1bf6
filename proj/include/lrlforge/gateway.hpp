#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

namespace lrlforge::gateway {

struct GenerationParams {
    double temperature = 0.1;
    double top_p = 0.9;
    int max_new_tokens = 512;
    std::vector<std::string> stop_sequences;
};

struct EndpointProfile {
    std::string name;
    std::string base_url;
    std::string model_id;
    std::string auth_env_var;  // secrets come from the environment only
    int max_concurrency = 4;
    double timeout_s = 60.0;
};

enum class FinishReason { STOP, LENGTH, ERROR };

struct ChatExchange {
    std::string request_digest;
    std::string prompt;
    std::string response_text;
    uint64_t latency_ms = 0;
    int attempt = 1;
    FinishReason finish_reason = FinishReason::STOP;
    std::string error;  // set when finish_reason == ERROR
    int status = 0;

    bool ok() const { return finish_reason != FinishReason::ERROR; }
};

struct HttpResponse {
    int status = 0;  // 0 = transport failure (timeout, refused, ...)
    std::string body;
};

// Pluggable transport: (url, request-body-json, auth token) -> response. The
// default implementation posts over HTTP; tests inject failure/latency mocks.
using Transport = std::function<HttpResponse(const std::string& url, const std::string& body,
                                             const std::string& auth_token)>;
using SleepFn = std::function<void(double seconds)>;

struct RetryPolicy {
    int max_attempts = 5;
    double base_delay_s = 1.0;
    double factor = 2.0;  // exponential backoff with full jitter
};

class Gateway {
public:
    Gateway();
    explicit Gateway(Transport transport);

    void set_retry_policy(RetryPolicy policy) { retry_ = policy; }
    void set_sleep(SleepFn sleep) { sleep_ = std::move(sleep); }
    void set_jitter_seed(uint64_t seed) { jitter_seed_ = seed; }
    void set_audit_log(std::filesystem::path path) { audit_path_ = std::move(path); }

    // Single blocking completion with retry on transient failures (timeout,
    // 429, 5xx). Permanent 4xx failures do not retry.
    ChatExchange complete(const EndpointProfile& profile, const std::string& prompt,
                          const GenerationParams& params);

    // Results in input order; at most profile.max_concurrency in flight.
    // Per-item failures are reported in the item, never abort the batch.
    std::vector<ChatExchange> complete_batch(const EndpointProfile& profile,
                                             const std::vector<std::string>& prompts,
                                             const GenerationParams& params);

    static std::string request_digest(const EndpointProfile& profile, const std::string& prompt,
                                      const GenerationParams& params);
    static std::string build_request_body(const EndpointProfile& profile, const std::string& prompt,
                                          const GenerationParams& params);

private:
    void audit(const ChatExchange& ex);

    Transport transport_;
    RetryPolicy retry_;
    SleepFn sleep_;
    uint64_t jitter_seed_ = 0x5eed;
    std::optional<std::filesystem::path> audit_path_;
    std::mutex audit_mutex_;
};

}  // namespace lrlforge::gateway
