#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "lrlforge/corpus.hpp"
#include "lrlforge/langinfo.hpp"
#include "lrlforge/text_units.hpp"

namespace lrlforge::sft {

struct SftRecord {
    std::string prompt;    // instruction template ending in "### Response:\n"
    std::string response;  // always prefixed "Here is the translation: "
    std::string pair_id;
    std::pair<std::string, std::string> direction;
};

struct TrainManifest {
    int64_t seed = 3407;
    int max_seq_len = 512;
    double warmup_ratio = 0.5;
    double max_grad_norm = 0.3;
    double weight_decay = 0.01;
    int epochs = 1;
    std::string dataset_digest;
    double ratio = 1.0;
    uint64_t record_count = 0;
    uint64_t overlong_count = 0;  // flagged, never truncated here
    std::optional<int> lora_rank;
};

SftRecord render_sft(const corpus::ParallelPair& pair, const langinfo::LanguageTable& langs);

std::string sft_record_to_jsonl(const SftRecord& rec);
SftRecord sft_record_from_jsonl(const std::string& line);

// floor(ratio * N) pairs via seeded uniform sampling without replacement over
// sorted pair ids; ratio == 1 returns the input unchanged.
std::vector<corpus::ParallelPair> subsample(const std::vector<corpus::ParallelPair>& pairs,
                                            double ratio, uint64_t seed);

// Deterministic id selection used by subsample (exposed for size checks on
// synthetic id sets without materializing pairs).
std::vector<std::string> subsample_ids(std::vector<std::string> ids, double ratio, uint64_t seed);

// Writes accepted pairs as SFT JSON Lines plus a TrainManifest sidecar
// (<out_path>.manifest.json). Overlong records (prompt+response subword
// tokens > max_seq_len) are counted, not cut.
TrainManifest emit_training_set(const std::vector<corpus::ParallelPair>& pairs, double ratio,
                                uint64_t seed, const std::filesystem::path& out_path,
                                const langinfo::LanguageTable& langs,
                                const text_units::SubwordVocab* vocab = nullptr);

}  // namespace lrlforge::sft
