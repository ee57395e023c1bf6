#include "lrlforge/sft.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <random>
#include <unordered_set>

#include <json.hpp>

#include "lrlforge/digest.hpp"
#include "lrlforge/error.hpp"

using nlohmann::json;

namespace lrlforge::sft {

SftRecord render_sft(const corpus::ParallelPair& pair, const langinfo::LanguageTable& langs) {
    if (!pair.accepted())
        throw Error("sft/rejected-pair", "pair " + pair.src.id + " is rejected (" +
                                             corpus::to_string(*pair.rejected_reason) + ")");
    const std::string src_name = langs.display_name(pair.direction.first);
    const std::string tgt_name = langs.display_name(pair.direction.second);

    SftRecord rec;
    rec.prompt =
        "Below is an instruction that describes a task, paired with an input that provides "
        "further context. Write a response that appropriately completes the request.\n\n"
        "### Instruction:\n"
        "Translate the following " + src_name + " input text into " + tgt_name +
        ". Do not include any additional information or unrelated content.\n\n"
        "### Input:\n" + pair.src.text + "\n\n"
        "### Response:\n";
    rec.response = "Here is the translation: " + pair.tgt_text;
    rec.pair_id = pair.src.id;
    rec.direction = pair.direction;
    return rec;
}

std::string sft_record_to_jsonl(const SftRecord& rec) {
    json j = {{"prompt", rec.prompt},
              {"response", rec.response},
              {"pair_id", rec.pair_id},
              {"direction", {rec.direction.first, rec.direction.second}}};
    return j.dump();
}

SftRecord sft_record_from_jsonl(const std::string& line) {
    json j = json::parse(line);
    SftRecord rec;
    rec.prompt = j.at("prompt").get<std::string>();
    rec.response = j.at("response").get<std::string>();
    rec.pair_id = j.at("pair_id").get<std::string>();
    auto dir = j.at("direction");
    rec.direction = {dir.at(0).get<std::string>(), dir.at(1).get<std::string>()};
    return rec;
}

std::vector<std::string> subsample_ids(std::vector<std::string> ids, double ratio, uint64_t seed) {
    if (ratio <= 0.0 || ratio > 1.0)
        throw Error("sft/bad-ratio", "ratio must be in (0, 1]");
    if (ids.empty()) throw Error("sft/empty-dataset", "nothing to subsample");
    if (ratio == 1.0) return ids;

    std::sort(ids.begin(), ids.end());
    const size_t take = static_cast<size_t>(
        std::floor(ratio * static_cast<double>(ids.size())));
    std::mt19937_64 rng(seed);
    for (size_t i = 0; i < take; ++i) {
        std::uniform_int_distribution<size_t> dist(i, ids.size() - 1);
        std::swap(ids[i], ids[dist(rng)]);
    }
    ids.resize(take);
    std::sort(ids.begin(), ids.end());
    return ids;
}

std::vector<corpus::ParallelPair> subsample(const std::vector<corpus::ParallelPair>& pairs,
                                            double ratio, uint64_t seed) {
    if (ratio == 1.0 && !pairs.empty()) return pairs;  // identity, original order
    std::vector<std::string> ids;
    ids.reserve(pairs.size());
    for (const auto& p : pairs) ids.push_back(p.src.id);
    auto chosen = subsample_ids(std::move(ids), ratio, seed);
    std::unordered_set<std::string> keep(chosen.begin(), chosen.end());

    std::vector<corpus::ParallelPair> out;
    out.reserve(keep.size());
    for (const auto& p : pairs)
        if (keep.count(p.src.id)) out.push_back(p);
    std::sort(out.begin(), out.end(),
              [](const auto& a, const auto& b) { return a.src.id < b.src.id; });
    return out;
}

TrainManifest emit_training_set(const std::vector<corpus::ParallelPair>& pairs, double ratio,
                                uint64_t seed, const std::filesystem::path& out_path,
                                const langinfo::LanguageTable& langs,
                                const text_units::SubwordVocab* vocab) {
    std::vector<corpus::ParallelPair> accepted;
    for (const auto& p : pairs)
        if (p.accepted()) accepted.push_back(p);
    if (accepted.empty()) throw Error("sft/empty-dataset", "no accepted pairs to emit");

    auto selected = subsample(accepted, ratio, seed);

    TrainManifest manifest;
    manifest.seed = static_cast<int64_t>(seed);
    manifest.ratio = ratio;

    digest::OrderIndependent dig;
    std::ofstream out(out_path, std::ios::trunc);
    if (!out) throw Error("sft/write-failure", "cannot write " + out_path.string());
    for (const auto& p : selected) {
        SftRecord rec = render_sft(p, langs);
        if (vocab) {
            size_t tokens = text_units::subword_segment(rec.prompt, *vocab).tokens.size() +
                            text_units::subword_segment(rec.response, *vocab).tokens.size();
            if (tokens > static_cast<size_t>(manifest.max_seq_len)) ++manifest.overlong_count;
        }
        out << sft_record_to_jsonl(rec) << '\n';
        dig.add(rec.pair_id + "\x1f" + p.src.text + "\x1f" + p.tgt_text);
        ++manifest.record_count;
    }
    manifest.dataset_digest = dig.hex();

    json mj = {{"seed", manifest.seed},
               {"max_seq_len", manifest.max_seq_len},
               {"warmup_ratio", manifest.warmup_ratio},
               {"max_grad_norm", manifest.max_grad_norm},
               {"weight_decay", manifest.weight_decay},
               {"epochs", manifest.epochs},
               {"dataset_digest", manifest.dataset_digest},
               {"ratio", manifest.ratio},
               {"record_count", manifest.record_count},
               {"overlong_count", manifest.overlong_count},
               {"sampling", "independent-per-ratio"}};
    if (manifest.lora_rank) mj["lora_rank"] = *manifest.lora_rank;
    std::ofstream mout(out_path.string() + ".manifest.json", std::ios::trunc);
    mout << mj.dump(2) << '\n';
    return manifest;
}

}  // namespace lrlforge::sft
