#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace lrlforge::corpus {

enum class Teacher { DN, DL, DG, DGDC, HUMAN, NONE };
enum class RejectReason { REPETITION, EXTRANEOUS_NOTE, EMPTY, LENGTH_OVERFLOW };
enum class DatasetKind { MONOLINGUAL, PARALLEL, DICTIONARY, EVAL };

std::string to_string(Teacher t);
Teacher teacher_from_string(const std::string& s);
std::string to_string(RejectReason r);
RejectReason reject_reason_from_string(const std::string& s);
std::string to_string(DatasetKind k);
DatasetKind kind_from_string(const std::string& s);

struct Segment {
    std::string id;
    std::string text;  // stored NFC-normalized
    std::string lang;
    std::string source_tag;
    std::string created_at;  // UTC, ISO-8601
};

struct ParallelPair {
    Segment src;
    std::string tgt_text;
    std::pair<std::string, std::string> direction;  // (src_lang, tgt_lang)
    Teacher teacher = Teacher::NONE;
    bool sanitized = false;
    std::optional<RejectReason> rejected_reason;

    bool accepted() const { return !rejected_reason.has_value(); }
};

struct DictionaryEntry {
    std::string lemma;
    std::string pos;
    std::vector<std::string> translations;
    std::vector<std::pair<std::string, std::string>> examples;  // (src, tgt)
};

struct DatasetManifest {
    std::string name;
    DatasetKind kind = DatasetKind::MONOLINGUAL;
    uint64_t record_count = 0;
    std::string content_digest;  // order-independent over record ids+texts
    int schema_version = 1;
    uint64_t accepted_count = 0;  // parallel datasets only
    uint64_t rejected_count = 0;
};

std::string now_utc_iso8601();

// JSON Lines (de)serialization for single records.
std::string segment_to_jsonl(const Segment& s);
Segment segment_from_jsonl(const std::string& line);
std::string pair_to_jsonl(const ParallelPair& p);
ParallelPair pair_from_jsonl(const std::string& line);
std::string dict_entry_to_jsonl(const DictionaryEntry& e);
DictionaryEntry dict_entry_from_jsonl(const std::string& line);

// Versioned on-disk datasets: <root>/<name>/records.jsonl + manifest.json.
// Ingest is single-writer; loaded datasets are immutable snapshots.
class Store {
public:
    explicit Store(std::filesystem::path root);

    const std::filesystem::path& root() const { return root_; }

    DatasetManifest ingest_monolingual(const std::filesystem::path& path, const std::string& lang,
                                       const std::string& source_tag, const std::string& name);
    DatasetManifest ingest_dictionary(const std::filesystem::path& path, const std::string& name);
    DatasetManifest ingest_eval_set(const std::filesystem::path& path, const std::string& src_lang,
                                    const std::string& tgt_lang, const std::string& name);

    bool exists(const std::string& name) const;
    DatasetManifest load_manifest(const std::string& name) const;
    std::vector<Segment> load_segments(const std::string& name) const;
    std::vector<ParallelPair> load_pairs(const std::string& name) const;
    std::vector<DictionaryEntry> load_dictionary(const std::string& name) const;

    DatasetManifest write_pairs(const std::string& name, const std::vector<ParallelPair>& pairs) const;

    std::filesystem::path dataset_dir(const std::string& name) const { return root_ / name; }

private:
    std::filesystem::path root_;
};

DatasetManifest manifest_for_pairs(const std::string& name, DatasetKind kind,
                                   const std::vector<ParallelPair>& pairs);

}  // namespace lrlforge::corpus
