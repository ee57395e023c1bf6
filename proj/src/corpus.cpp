#include "lrlforge/corpus.hpp"

#include <chrono>
#include <ctime>
#include <fstream>
#include <unordered_set>

#include <json.hpp>

#include "lrlforge/digest.hpp"
#include "lrlforge/error.hpp"
#include "lrlforge/unicode.hpp"

using nlohmann::json;
namespace fs = std::filesystem;

namespace lrlforge::corpus {

std::string to_string(Teacher t) {
    switch (t) {
        case Teacher::DN: return "DN";
        case Teacher::DL: return "DL";
        case Teacher::DG: return "DG";
        case Teacher::DGDC: return "DGDC";
        case Teacher::HUMAN: return "HUMAN";
        case Teacher::NONE: return "NONE";
    }
    return "NONE";
}

Teacher teacher_from_string(const std::string& s) {
    if (s == "DN") return Teacher::DN;
    if (s == "DL") return Teacher::DL;
    if (s == "DG") return Teacher::DG;
    if (s == "DGDC") return Teacher::DGDC;
    if (s == "HUMAN") return Teacher::HUMAN;
    if (s == "NONE" || s.empty()) return Teacher::NONE;
    throw Error("corpus/bad-teacher", "unknown teacher tag: " + s);
}

std::string to_string(RejectReason r) {
    switch (r) {
        case RejectReason::REPETITION: return "REPETITION";
        case RejectReason::EXTRANEOUS_NOTE: return "EXTRANEOUS_NOTE";
        case RejectReason::EMPTY: return "EMPTY";
        case RejectReason::LENGTH_OVERFLOW: return "LENGTH_OVERFLOW";
    }
    return "EMPTY";
}

RejectReason reject_reason_from_string(const std::string& s) {
    if (s == "REPETITION") return RejectReason::REPETITION;
    if (s == "EXTRANEOUS_NOTE") return RejectReason::EXTRANEOUS_NOTE;
    if (s == "EMPTY") return RejectReason::EMPTY;
    if (s == "LENGTH_OVERFLOW") return RejectReason::LENGTH_OVERFLOW;
    throw Error("corpus/bad-reason", "unknown reject reason: " + s);
}

std::string to_string(DatasetKind k) {
    switch (k) {
        case DatasetKind::MONOLINGUAL: return "MONOLINGUAL";
        case DatasetKind::PARALLEL: return "PARALLEL";
        case DatasetKind::DICTIONARY: return "DICTIONARY";
        case DatasetKind::EVAL: return "EVAL";
    }
    return "MONOLINGUAL";
}

DatasetKind kind_from_string(const std::string& s) {
    if (s == "MONOLINGUAL") return DatasetKind::MONOLINGUAL;
    if (s == "PARALLEL") return DatasetKind::PARALLEL;
    if (s == "DICTIONARY") return DatasetKind::DICTIONARY;
    if (s == "EVAL") return DatasetKind::EVAL;
    throw Error("corpus/bad-kind", "unknown dataset kind: " + s);
}

std::string now_utc_iso8601() {
    auto now = std::chrono::system_clock::now();
    std::time_t t = std::chrono::system_clock::to_time_t(now);
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

std::string segment_to_jsonl(const Segment& s) {
    json j = {{"id", s.id}, {"text", s.text}, {"lang", s.lang}, {"source_tag", s.source_tag},
              {"created_at", s.created_at}};
    return j.dump();
}

Segment segment_from_jsonl(const std::string& line) {
    json j = json::parse(line);
    Segment s;
    s.id = j.at("id").get<std::string>();
    s.text = j.at("text").get<std::string>();
    s.lang = j.at("lang").get<std::string>();
    s.source_tag = j.value("source_tag", "");
    s.created_at = j.value("created_at", "");
    return s;
}

std::string pair_to_jsonl(const ParallelPair& p) {
    json j = {{"id", p.src.id},
              {"src", p.src.text},
              {"tgt", p.tgt_text},
              {"src_lang", p.direction.first},
              {"tgt_lang", p.direction.second},
              {"teacher", to_string(p.teacher)},
              {"sanitized", p.sanitized},
              {"source_tag", p.src.source_tag}};
    if (p.rejected_reason) j["rejected_reason"] = to_string(*p.rejected_reason);
    return j.dump();
}

ParallelPair pair_from_jsonl(const std::string& line) {
    json j = json::parse(line);
    ParallelPair p;
    p.src.id = j.at("id").get<std::string>();
    p.src.text = j.at("src").get<std::string>();
    p.tgt_text = j.at("tgt").get<std::string>();
    p.direction = {j.at("src_lang").get<std::string>(), j.at("tgt_lang").get<std::string>()};
    p.src.lang = p.direction.first;
    p.src.source_tag = j.value("source_tag", "");
    p.teacher = teacher_from_string(j.value("teacher", "NONE"));
    p.sanitized = j.value("sanitized", false);
    if (j.contains("rejected_reason"))
        p.rejected_reason = reject_reason_from_string(j["rejected_reason"].get<std::string>());
    return p;
}

std::string dict_entry_to_jsonl(const DictionaryEntry& e) {
    json examples = json::array();
    for (const auto& [src, tgt] : e.examples) examples.push_back({{"src", src}, {"tgt", tgt}});
    json j = {{"lemma", e.lemma}, {"pos", e.pos}, {"translations", e.translations},
              {"examples", examples}};
    return j.dump();
}

DictionaryEntry dict_entry_from_jsonl(const std::string& line) {
    json j = json::parse(line);
    DictionaryEntry e;
    e.lemma = j.at("lemma").get<std::string>();
    e.pos = j.value("pos", "");
    if (j.contains("translations")) e.translations = j["translations"].get<std::vector<std::string>>();
    for (const auto& ex : j.value("examples", json::array()))
        e.examples.emplace_back(ex.value("src", ""), ex.value("tgt", ""));
    return e;
}

namespace {

json manifest_to_json(const DatasetManifest& m) {
    return {{"name", m.name},
            {"kind", to_string(m.kind)},
            {"record_count", m.record_count},
            {"content_digest", m.content_digest},
            {"schema_version", m.schema_version},
            {"accepted_count", m.accepted_count},
            {"rejected_count", m.rejected_count}};
}

DatasetManifest manifest_from_json(const json& j) {
    DatasetManifest m;
    m.name = j.at("name").get<std::string>();
    m.kind = kind_from_string(j.at("kind").get<std::string>());
    m.record_count = j.at("record_count").get<uint64_t>();
    m.content_digest = j.at("content_digest").get<std::string>();
    m.schema_version = j.value("schema_version", 1);
    m.accepted_count = j.value("accepted_count", 0);
    m.rejected_count = j.value("rejected_count", 0);
    return m;
}

void write_dataset(const fs::path& dir, const std::vector<std::string>& lines,
                   const DatasetManifest& manifest) {
    fs::create_directories(dir);
    {
        std::ofstream out(dir / "records.jsonl", std::ios::trunc);
        if (!out) throw Error("corpus/write-failure", "cannot write " + (dir / "records.jsonl").string());
        for (const auto& line : lines) out << line << '\n';
    }
    std::ofstream mout(dir / "manifest.json", std::ios::trunc);
    mout << manifest_to_json(manifest).dump(2) << '\n';
}

std::vector<std::string> read_lines(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw Error("corpus/unreadable", "cannot read " + path.string());
    std::vector<std::string> lines;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        lines.push_back(line);
    }
    return lines;
}

bool looks_structured(const std::vector<std::string>& lines) {
    for (const auto& line : lines) {
        std::string t = unicode::trim(line);
        if (t.empty()) continue;
        return t.front() == '{';
    }
    return false;
}

}  // namespace

Store::Store(fs::path root) : root_(std::move(root)) { fs::create_directories(root_); }

DatasetManifest Store::ingest_monolingual(const fs::path& path, const std::string& lang,
                                          const std::string& source_tag, const std::string& name) {
    auto lines = read_lines(path);
    const bool structured = looks_structured(lines);
    const std::string created = now_utc_iso8601();

    std::vector<std::string> records;
    digest::OrderIndependent dig;
    std::unordered_set<std::string> seen_texts;
    std::unordered_set<std::string> seen_ids;
    uint64_t count = 0;
    size_t line_no = 0;
    for (const auto& raw : lines) {
        ++line_no;
        Segment seg;
        if (structured) {
            std::string t = unicode::trim(raw);
            if (t.empty()) continue;
            try {
                json j = json::parse(t);
                seg.id = j.at("id").get<std::string>();
                seg.text = j.at("text").get<std::string>();
                seg.lang = j.value("lang", lang);
                seg.source_tag = j.value("source_tag", source_tag);
            } catch (const json::exception& e) {
                throw Error("corpus/malformed-line",
                            "line " + std::to_string(line_no) + ": " + e.what());
            }
        } else {
            seg.text = raw;
            seg.lang = lang;
            seg.source_tag = source_tag;
        }
        seg.text = unicode::trim(unicode::nfc(seg.text));
        if (seg.text.empty()) continue;
        if (seg.lang.empty())
            throw Error("corpus/malformed-line", "line " + std::to_string(line_no) + ": empty lang");
        if (!seen_texts.insert(seg.text).second) continue;  // exact-dup drop
        if (seg.id.empty()) {
            seg.id = "seg-" + std::to_string(count + 1);
        }
        if (!seen_ids.insert(seg.id).second)
            throw Error("corpus/duplicate-id", "line " + std::to_string(line_no) + ": id " + seg.id);
        seg.created_at = created;
        dig.add(seg.id + "\x1f" + seg.text);
        records.push_back(segment_to_jsonl(seg));
        ++count;
    }
    if (count == 0) throw Error("corpus/zero-records", "zero surviving records in " + path.string());

    DatasetManifest m{name, DatasetKind::MONOLINGUAL, count, dig.hex(), 1, 0, 0};
    write_dataset(dataset_dir(name), records, m);
    return m;
}

DatasetManifest Store::ingest_dictionary(const fs::path& path, const std::string& name) {
    auto lines = read_lines(path);
    // lemma+pos collapses duplicates with merged translations
    std::vector<DictionaryEntry> entries;
    std::unordered_set<std::string> keys;
    size_t line_no = 0;
    for (const auto& raw : lines) {
        ++line_no;
        std::string t = unicode::trim(raw);
        if (t.empty()) continue;
        DictionaryEntry e;
        try {
            e = dict_entry_from_jsonl(t);
        } catch (const json::exception& ex) {
            throw Error("corpus/schema-violation",
                        "line " + std::to_string(line_no) + ": " + ex.what());
        }
        e.lemma = unicode::nfc(e.lemma);
        if (unicode::trim(e.lemma).empty())
            throw Error("corpus/schema-violation",
                        "line " + std::to_string(line_no) + ": field lemma is empty");
        if (e.translations.empty() && e.examples.empty())
            throw Error("corpus/schema-violation",
                        "line " + std::to_string(line_no) +
                            ": field translations empty with no examples");
        std::string key = e.lemma + "\x1f" + e.pos;
        if (!keys.insert(key).second) {
            for (auto& existing : entries) {
                if (existing.lemma == e.lemma && existing.pos == e.pos) {
                    for (const auto& tr : e.translations) {
                        if (std::find(existing.translations.begin(), existing.translations.end(),
                                      tr) == existing.translations.end())
                            existing.translations.push_back(tr);
                    }
                    for (const auto& ex : e.examples) existing.examples.push_back(ex);
                    break;
                }
            }
            continue;
        }
        entries.push_back(std::move(e));
    }
    if (entries.empty()) throw Error("corpus/zero-records", "no dictionary entries in " + path.string());

    std::vector<std::string> records;
    digest::OrderIndependent dig;
    for (const auto& e : entries) {
        records.push_back(dict_entry_to_jsonl(e));
        dig.add(e.lemma + "\x1f" + e.pos + "\x1f" + records.back());
    }
    DatasetManifest m{name, DatasetKind::DICTIONARY, entries.size(), dig.hex(), 1, 0, 0};
    write_dataset(dataset_dir(name), records, m);
    return m;
}

DatasetManifest Store::ingest_eval_set(const fs::path& path, const std::string& src_lang,
                                       const std::string& tgt_lang, const std::string& name) {
    auto lines = read_lines(path);
    const bool structured = looks_structured(lines);
    const std::string created = now_utc_iso8601();

    std::vector<ParallelPair> pairs;
    size_t line_no = 0;
    for (const auto& raw : lines) {
        ++line_no;
        std::string t = structured ? unicode::trim(raw) : raw;
        if (t.empty()) continue;
        ParallelPair p;
        if (structured) {
            try {
                json j = json::parse(t);
                p.src.id = j.value("id", "");
                p.src.text = j.at("src").get<std::string>();
                p.tgt_text = j.at("tgt").get<std::string>();
                p.direction = {j.value("src_lang", src_lang), j.value("tgt_lang", tgt_lang)};
            } catch (const json::exception& e) {
                throw Error("corpus/malformed-line",
                            "line " + std::to_string(line_no) + ": " + e.what());
            }
        } else {
            // plain format: source TAB reference
            auto tab = raw.find('\t');
            if (tab == std::string::npos)
                throw Error("corpus/misaligned",
                            "line " + std::to_string(line_no) + ": missing reference column");
            p.src.text = raw.substr(0, tab);
            p.tgt_text = raw.substr(tab + 1);
            p.direction = {src_lang, tgt_lang};
        }
        p.src.text = unicode::trim(unicode::nfc(p.src.text));
        p.tgt_text = unicode::trim(unicode::nfc(p.tgt_text));
        if (p.src.text.empty())
            throw Error("corpus/misaligned", "line " + std::to_string(line_no) + ": empty source");
        if (p.tgt_text.empty())
            throw Error("corpus/empty-reference",
                        "line " + std::to_string(line_no) + ": empty reference");
        if (p.src.id.empty()) p.src.id = "pair-" + std::to_string(pairs.size() + 1);
        p.src.lang = p.direction.first;
        p.src.source_tag = "eval";
        p.src.created_at = created;
        p.teacher = Teacher::HUMAN;  // references
        pairs.push_back(std::move(p));
    }
    if (pairs.empty()) throw Error("corpus/zero-records", "no eval pairs in " + path.string());

    DatasetManifest m = manifest_for_pairs(name, DatasetKind::EVAL, pairs);
    std::vector<std::string> records;
    records.reserve(pairs.size());
    for (const auto& p : pairs) records.push_back(pair_to_jsonl(p));
    write_dataset(dataset_dir(name), records, m);
    return m;
}

bool Store::exists(const std::string& name) const {
    return fs::exists(dataset_dir(name) / "manifest.json");
}

DatasetManifest Store::load_manifest(const std::string& name) const {
    fs::path p = dataset_dir(name) / "manifest.json";
    std::ifstream in(p);
    if (!in) throw Error("corpus/missing-dataset", "no manifest at " + p.string());
    json j;
    in >> j;
    return manifest_from_json(j);
}

std::vector<Segment> Store::load_segments(const std::string& name) const {
    std::vector<Segment> out;
    for (const auto& line : read_lines(dataset_dir(name) / "records.jsonl")) {
        if (unicode::trim(line).empty()) continue;
        out.push_back(segment_from_jsonl(line));
    }
    return out;
}

std::vector<ParallelPair> Store::load_pairs(const std::string& name) const {
    std::vector<ParallelPair> out;
    for (const auto& line : read_lines(dataset_dir(name) / "records.jsonl")) {
        if (unicode::trim(line).empty()) continue;
        out.push_back(pair_from_jsonl(line));
    }
    return out;
}

std::vector<DictionaryEntry> Store::load_dictionary(const std::string& name) const {
    std::vector<DictionaryEntry> out;
    for (const auto& line : read_lines(dataset_dir(name) / "records.jsonl")) {
        if (unicode::trim(line).empty()) continue;
        out.push_back(dict_entry_from_jsonl(line));
    }
    return out;
}

DatasetManifest Store::write_pairs(const std::string& name,
                                   const std::vector<ParallelPair>& pairs) const {
    DatasetManifest m = manifest_for_pairs(name, DatasetKind::PARALLEL, pairs);
    std::vector<std::string> records;
    records.reserve(pairs.size());
    for (const auto& p : pairs) records.push_back(pair_to_jsonl(p));
    write_dataset(dataset_dir(name), records, m);
    return m;
}

DatasetManifest manifest_for_pairs(const std::string& name, DatasetKind kind,
                                   const std::vector<ParallelPair>& pairs) {
    digest::OrderIndependent dig;
    uint64_t accepted = 0;
    for (const auto& p : pairs) {
        dig.add(p.src.id + "\x1f" + p.src.text + "\x1f" + p.tgt_text);
        if (p.accepted()) ++accepted;
    }
    DatasetManifest m;
    m.name = name;
    m.kind = kind;
    m.record_count = pairs.size();
    m.content_digest = dig.hex();
    m.accepted_count = accepted;
    m.rejected_count = pairs.size() - accepted;
    return m;
}

}  // namespace lrlforge::corpus
