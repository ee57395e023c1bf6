#pragma once

#include <optional>
#include <string>
#include <vector>

#include "lrlforge/gateway.hpp"

namespace lrlforge::judge {

// Score threshold marking a translation as good.
inline constexpr double kGoodThreshold = 0.8;

struct JudgeVerdict {
    std::string pair_id;
    double score = 0.0;  // in {0.0, 0.1, ..., 1.0}; valid only when parse_ok
    std::string raw_response;
    bool parse_ok = false;

    bool good() const { return parse_ok && score >= kGoodThreshold; }
};

std::string render_judge_prompt(const std::string& golden, const std::string& model_translation);

// Extracts the LAST "[[x]]" occurrence; clamps to [0,1] and rounds to the
// nearest 0.1 (ties away from zero). parse_ok=false when no bracket found.
JudgeVerdict parse_score(const std::string& response);

struct JudgeItem {
    std::string pair_id;
    std::string golden;
    std::string hypothesis;
};

struct BatchResult {
    std::vector<JudgeVerdict> verdicts;  // one per input, in order
    size_t unparsed = 0;
    double mean_score = 0.0;  // over parse_ok verdicts only
};

// Unparseable responses are retried once with the same prompt.
BatchResult judge_batch(gateway::Gateway& gw, const gateway::EndpointProfile& profile,
                        const std::vector<JudgeItem>& items,
                        const gateway::GenerationParams& params);

std::string verdict_to_jsonl(const JudgeVerdict& v);

}  // namespace lrlforge::judge
