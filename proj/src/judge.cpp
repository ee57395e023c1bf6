#include "lrlforge/judge.hpp"

#include <cmath>
#include <cstdlib>

#include <json.hpp>

#include "lrlforge/error.hpp"

using nlohmann::json;

namespace lrlforge::judge {

std::string render_judge_prompt(const std::string& golden, const std::string& model_translation) {
    if (golden.empty()) throw Error("judge/empty-input", "golden translation is empty");
    if (model_translation.empty()) throw Error("judge/empty-input", "model translation is empty");
    return
        "Your task is to assess the accuracy, clarity, and fidelity of the model's translation "
        "to the golden translation.\n"
        "\n"
        "You will be provided the golden translation, and the model's translation. Your task is "
        "to judge how correct the model's translation is based on the golden translation, and "
        "then give a correctness score. The correctness score should be one of the below "
        "numbers: 0.0 (totally wrong), 0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, or 1.0 "
        "(totally right). You should give the correctness score directly. The correctness score "
        "must strictly follow this format: \"[[score]]\", e.g., \"The correctness score: "
        "[[0.5]].\n"
        "Golden Translation: " + golden + "\n"
        "\n"
        "Model Translation: " + model_translation + "\n";
}

JudgeVerdict parse_score(const std::string& response) {
    JudgeVerdict v;
    v.raw_response = response;

    size_t pos = 0;
    std::optional<double> last;
    while ((pos = response.find("[[", pos)) != std::string::npos) {
        size_t close = response.find("]]", pos + 2);
        if (close == std::string::npos) break;
        std::string inner = response.substr(pos + 2, close - pos - 2);
        char* end = nullptr;
        double val = std::strtod(inner.c_str(), &end);
        if (end != inner.c_str() && end == inner.c_str() + inner.size() && !inner.empty())
            last = val;
        pos = close + 2;
    }
    if (!last) return v;

    double score = std::clamp(*last, 0.0, 1.0);
    v.score = std::round(score * 10.0) / 10.0;  // ties away from zero
    v.parse_ok = true;
    return v;
}

BatchResult judge_batch(gateway::Gateway& gw, const gateway::EndpointProfile& profile,
                        const std::vector<JudgeItem>& items,
                        const gateway::GenerationParams& params) {
    if (items.empty()) throw Error("judge/empty-batch", "no pairs to judge");

    std::vector<std::string> prompts;
    prompts.reserve(items.size());
    for (const auto& item : items)
        prompts.push_back(render_judge_prompt(item.golden, item.hypothesis));

    auto exchanges = gw.complete_batch(profile, prompts, params);

    BatchResult result;
    result.verdicts.resize(items.size());
    double sum = 0.0;
    size_t scored = 0;
    for (size_t i = 0; i < items.size(); ++i) {
        if (!exchanges[i].ok())
            throw Error("judge/endpoint-failure",
                        "pair " + items[i].pair_id + ": " + exchanges[i].error);
        JudgeVerdict v = parse_score(exchanges[i].response_text);
        if (!v.parse_ok) {
            // one retry with the identical prompt
            auto retry = gw.complete(profile, prompts[i], params);
            if (retry.ok()) v = parse_score(retry.response_text);
        }
        v.pair_id = items[i].pair_id;
        if (v.parse_ok) {
            sum += v.score;
            ++scored;
        } else {
            ++result.unparsed;
        }
        result.verdicts[i] = std::move(v);
    }
    if (scored > 0) result.mean_score = sum / scored;
    return result;
}

std::string verdict_to_jsonl(const JudgeVerdict& v) {
    json j = {{"pair_id", v.pair_id}, {"parse_ok", v.parse_ok}, {"good", v.good()}};
    if (v.parse_ok) j["score"] = v.score;
    return j.dump();
}

}  // namespace lrlforge::judge
