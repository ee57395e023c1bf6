#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "lrlforge/bm25.hpp"
#include "lrlforge/corpus.hpp"
#include "lrlforge/error.hpp"
#include "lrlforge/gateway.hpp"
#include "lrlforge/langinfo.hpp"

namespace lrlforge::distill {

std::string render_translation_prompt(const corpus::Segment& segment,
                                      const std::pair<std::string, std::string>& direction,
                                      const langinfo::LanguageTable& langs,
                                      const std::vector<corpus::DictionaryEntry>* dict_entries =
                                          nullptr);

struct SanitizeConfig {
    int ngram_order = 4;          // word n-gram size for the repetition check
    int ngram_repeat_min = 4;     // reject when any n-gram occurs this often
    int tail_window = 10;         // tokens inspected for a trailing cycle
    int max_cycle_period = 5;
    double max_length_ratio = 4.0;  // cleaned chars vs source chars
};

struct SanitizeVerdict {
    bool accepted = false;
    std::optional<corpus::RejectReason> reason;
    std::string cleaned_text;
};

// Cleaning pipeline: strip the assistant preamble, drop a trailing "(Note:"
// parenthetical (flagged EXTRANEOUS_NOTE but still accepted), reject
// repetition loops, empty remainders, and runaway-length outputs.
// src_char_count == 0 disables the length check.
SanitizeVerdict sanitize(const std::string& raw, size_t src_char_count = 0,
                         const SanitizeConfig& config = {});

struct DistillJob {
    std::string dataset;
    std::pair<std::string, std::string> direction;
    corpus::Teacher teacher = corpus::Teacher::DG;
    gateway::EndpointProfile profile;
    gateway::GenerationParams params;
    std::optional<int> dict_k;  // DGDC only
    std::optional<std::string> resume_token;
    std::string output_name;  // defaults to "<dataset>-<teacher>"
    size_t checkpoint_every = 1000;
};

// Distills every monolingual segment into a ParallelPair via the teacher
// endpoint, checkpointing so an interrupted job resumes without duplicates.
// Halts with a resumable error on permanent gateway failure.
corpus::DatasetManifest run_distill(corpus::Store& store, const DistillJob& job,
                                    gateway::Gateway& gw, const langinfo::LanguageTable& langs,
                                    const bm25::Bm25Index* dict_index = nullptr,
                                    const std::vector<corpus::DictionaryEntry>* dict_entries =
                                        nullptr);

// Error thrown when a job halts mid-run; carries the resume token.
class HaltedError : public Error {
public:
    HaltedError(const std::string& message, std::string resume_token)
        : Error("distill/halted", message), resume_token_(std::move(resume_token)) {}
    const std::string& resume_token() const { return resume_token_; }

private:
    std::string resume_token_;
};

// Seeded sample without replacement, written as a reviewer CSV
// (id, src, tgt, verdict) with the verdict column left blank.
std::vector<std::string> audit_sample(const corpus::Store& store, const std::string& dataset,
                                      size_t sample_size, uint64_t seed,
                                      const std::filesystem::path& out_csv);

struct AuditResult {
    size_t total = 0;
    size_t fully_correct = 0;
    double fraction_correct = 0.0;
};

// Re-imports a reviewer CSV; verdict values "correct" / "yes" / "1" count as
// fully correct.
AuditResult audit_import(const std::filesystem::path& csv_path);

}  // namespace lrlforge::distill
