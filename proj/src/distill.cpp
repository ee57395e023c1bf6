#include "lrlforge/distill.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <random>
#include <sstream>

#include "lrlforge/text_units.hpp"
#include "lrlforge/unicode.hpp"

namespace fs = std::filesystem;

namespace lrlforge::distill {

std::string render_translation_prompt(const corpus::Segment& segment,
                                      const std::pair<std::string, std::string>& direction,
                                      const langinfo::LanguageTable& langs,
                                      const std::vector<corpus::DictionaryEntry>* dict_entries) {
    if (segment.lang != direction.first)
        throw Error("distill/direction-mismatch",
                    "segment lang " + segment.lang + " != direction src " + direction.first);
    const std::string src_name = langs.display_name(direction.first);
    const std::string tgt_name = langs.display_name(direction.second);

    std::string prompt = "Translate the following " + src_name + " input text into " + tgt_name +
                         ". Do not include any additional information or unrelated content.\n";
    if (dict_entries && !dict_entries->empty()) {
        prompt += "Dictionary entries:\n";
        for (const auto& e : *dict_entries) {
            prompt += "- " + e.lemma + ": ";
            for (size_t i = 0; i < e.translations.size(); ++i) {
                if (i) prompt += ", ";
                prompt += e.translations[i];
            }
            prompt += "\n";
        }
    }
    prompt += "Input: " + segment.text;
    return prompt;
}

namespace {

std::string strip_preamble(std::string text) {
    static const std::string kPrefix = "Here is the translation:";
    text = unicode::trim(text);
    if (text.rfind(kPrefix, 0) == 0) text = unicode::trim(text.substr(kPrefix.size()));
    return text;
}

// Removes a trailing "(Note: ...)" parenthetical. Returns true when stripped.
bool strip_trailing_note(std::string& text) {
    auto start = text.rfind("(Note:");
    if (start == std::string::npos) return false;
    int depth = 0;
    size_t end = std::string::npos;
    for (size_t i = start; i < text.size(); ++i) {
        if (text[i] == '(') ++depth;
        else if (text[i] == ')') {
            if (--depth == 0) {
                end = i;
                break;
            }
        }
    }
    size_t after = end == std::string::npos ? text.size() : end + 1;
    if (!unicode::trim(text.substr(after)).empty()) return false;  // not trailing
    text = unicode::trim(text.substr(0, start));
    return true;
}

bool has_repetition(const std::string& text, const SanitizeConfig& cfg) {
    auto tokens = text_units::word_tokenize(text).tokens;
    const size_t n = static_cast<size_t>(cfg.ngram_order);
    if (tokens.size() >= n) {
        std::map<std::vector<std::string>, int> counts;
        for (size_t i = 0; i + n <= tokens.size(); ++i) {
            std::vector<std::string> key(tokens.begin() + i, tokens.begin() + i + n);
            if (++counts[key] >= cfg.ngram_repeat_min) return true;
        }
    }
    // trailing cycle of short period
    const size_t w = static_cast<size_t>(cfg.tail_window);
    if (tokens.size() >= w) {
        std::vector<std::string> tail(tokens.end() - w, tokens.end());
        for (int p = 1; p <= cfg.max_cycle_period; ++p) {
            bool cyclic = true;
            for (size_t i = 0; i + p < tail.size(); ++i) {
                if (tail[i] != tail[i + p]) {
                    cyclic = false;
                    break;
                }
            }
            if (cyclic) return true;
        }
    }
    return false;
}

}  // namespace

SanitizeVerdict sanitize(const std::string& raw, size_t src_char_count,
                         const SanitizeConfig& config) {
    SanitizeVerdict verdict;
    std::string text = strip_preamble(raw);
    bool note_stripped = strip_trailing_note(text);

    if (has_repetition(text, config)) {
        verdict.reason = corpus::RejectReason::REPETITION;
        return verdict;
    }
    if (text.empty()) {
        verdict.reason = corpus::RejectReason::EMPTY;
        return verdict;
    }
    if (src_char_count > 0) {
        size_t cleaned_count = unicode::decode(text).size();
        if (static_cast<double>(cleaned_count) >
            config.max_length_ratio * static_cast<double>(src_char_count)) {
            verdict.reason = corpus::RejectReason::LENGTH_OVERFLOW;
            return verdict;
        }
    }
    verdict.accepted = true;
    verdict.cleaned_text = text;
    if (note_stripped) verdict.reason = corpus::RejectReason::EXTRANEOUS_NOTE;
    return verdict;
}

namespace {

std::string output_name_for(const DistillJob& job) {
    if (!job.output_name.empty()) return job.output_name;
    std::string t = corpus::to_string(job.teacher);
    std::transform(t.begin(), t.end(), t.begin(), ::tolower);
    return job.dataset + "-" + t;
}

// Reads checkpointed pairs, discarding a possibly torn final line.
std::vector<std::string> read_checkpointed_lines(const fs::path& records) {
    std::vector<std::string> lines;
    std::ifstream in(records);
    if (!in) return lines;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        try {
            corpus::pair_from_jsonl(line);
        } catch (...) {
            break;  // torn tail from an interrupted write
        }
        lines.push_back(line);
    }
    return lines;
}

}  // namespace

corpus::DatasetManifest run_distill(corpus::Store& store, const DistillJob& job,
                                    gateway::Gateway& gw, const langinfo::LanguageTable& langs,
                                    const bm25::Bm25Index* dict_index,
                                    const std::vector<corpus::DictionaryEntry>* dict_entries) {
    const bool dgdc = job.teacher == corpus::Teacher::DGDC;
    if (dgdc != job.dict_k.has_value())
        throw Error("distill/bad-job", "dict_k must be set exactly for teacher DGDC");
    if (job.direction.first == job.direction.second)
        throw Error("distill/bad-job", "direction languages must be distinct");
    if (dgdc && !dict_index)
        throw Error("distill/missing-index", "DGDC requires a dictionary index");
    if (!store.exists(job.dataset))
        throw Error("distill/missing-dataset", "dataset not found: " + job.dataset);

    const std::string out_name = output_name_for(job);
    const fs::path out_dir = store.dataset_dir(out_name);
    const fs::path records_path = out_dir / "records.jsonl";
    fs::create_directories(out_dir);

    std::vector<std::string> done_lines;
    if (job.resume_token) {
        if (*job.resume_token != out_name)
            throw Error("distill/bad-resume", "resume token does not match job output: " +
                                                  *job.resume_token);
        done_lines = read_checkpointed_lines(records_path);
    }

    auto segments = store.load_segments(job.dataset);
    if (done_lines.size() > segments.size())
        throw Error("distill/bad-resume", "checkpoint larger than input dataset");

    // rewrite the verified prefix so a torn tail never survives
    {
        std::ofstream out(records_path, std::ios::trunc);
        for (const auto& line : done_lines) out << line << '\n';
    }

    std::vector<corpus::ParallelPair> pairs;
    pairs.reserve(segments.size());
    for (const auto& line : done_lines) pairs.push_back(corpus::pair_from_jsonl(line));

    size_t cursor = done_lines.size();
    while (cursor < segments.size()) {
        size_t batch_end = std::min(cursor + job.checkpoint_every, segments.size());

        // entry ids follow the lemma[#pos] convention used by Bm25Index::build
        std::map<std::string, const corpus::DictionaryEntry*> by_id;
        if (dgdc && dict_entries) {
            for (const auto& e : *dict_entries)
                by_id[e.lemma + (e.pos.empty() ? "" : "#" + e.pos)] = &e;
        }

        std::vector<std::string> prompts;
        prompts.reserve(batch_end - cursor);
        for (size_t i = cursor; i < batch_end; ++i) {
            const auto& seg = segments[i];
            if (dgdc) {
                std::vector<corpus::DictionaryEntry> retrieved;
                for (const auto& hit :
                     dict_index->retrieve(seg.text, static_cast<size_t>(*job.dict_k))) {
                    auto it = by_id.find(hit.entry_id);
                    if (it != by_id.end()) {
                        retrieved.push_back(*it->second);
                    } else {
                        corpus::DictionaryEntry e;
                        e.lemma = hit.entry_id.substr(0, hit.entry_id.find('#'));
                        retrieved.push_back(std::move(e));
                    }
                }
                prompts.push_back(render_translation_prompt(seg, job.direction, langs, &retrieved));
            } else {
                prompts.push_back(render_translation_prompt(seg, job.direction, langs));
            }
        }

        auto exchanges = gw.complete_batch(job.profile, prompts, job.params);

        std::ofstream out(records_path, std::ios::app);
        for (size_t i = 0; i < exchanges.size(); ++i) {
            const auto& seg = segments[cursor + i];
            const auto& ex = exchanges[i];
            if (!ex.ok()) {
                out.flush();
                throw HaltedError("gateway failure at segment " + seg.id + ": " + ex.error,
                                  out_name);
            }
            auto verdict = sanitize(ex.response_text, unicode::decode(seg.text).size());
            corpus::ParallelPair pair;
            pair.src = seg;
            pair.direction = job.direction;
            pair.teacher = job.teacher;
            pair.sanitized = true;
            if (verdict.accepted) {
                pair.tgt_text = verdict.cleaned_text;
            } else {
                pair.tgt_text = ex.response_text;  // rejects kept for audit
                pair.rejected_reason = verdict.reason;
            }
            out << corpus::pair_to_jsonl(pair) << '\n';
            pairs.push_back(std::move(pair));
        }
        out.flush();
        cursor = batch_end;
    }

    return store.write_pairs(out_name, pairs);
}

namespace {

std::string csv_escape(const std::string& field) {
    if (field.find_first_of(",\"\n") == std::string::npos) return field;
    std::string out = "\"";
    for (char c : field) {
        if (c == '"') out += "\"\"";
        else out += c;
    }
    out += "\"";
    return out;
}

std::vector<std::string> csv_split(const std::string& line) {
    std::vector<std::string> fields;
    std::string cur;
    bool quoted = false;
    for (size_t i = 0; i < line.size(); ++i) {
        char c = line[i];
        if (quoted) {
            if (c == '"') {
                if (i + 1 < line.size() && line[i + 1] == '"') {
                    cur += '"';
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                cur += c;
            }
        } else if (c == '"') {
            quoted = true;
        } else if (c == ',') {
            fields.push_back(cur);
            cur.clear();
        } else {
            cur += c;
        }
    }
    fields.push_back(cur);
    return fields;
}

}  // namespace

std::vector<std::string> audit_sample(const corpus::Store& store, const std::string& dataset,
                                      size_t sample_size, uint64_t seed,
                                      const fs::path& out_csv) {
    auto pairs = store.load_pairs(dataset);
    if (pairs.empty()) throw Error("distill/empty-dataset", "dataset has no pairs: " + dataset);
    if (sample_size == 0) throw Error("distill/bad-sample", "sample_size must be positive");
    if (sample_size > pairs.size())
        throw Error("distill/bad-sample", "sample_size exceeds dataset size");

    std::sort(pairs.begin(), pairs.end(),
              [](const auto& a, const auto& b) { return a.src.id < b.src.id; });

    std::vector<size_t> indices(pairs.size());
    for (size_t i = 0; i < indices.size(); ++i) indices[i] = i;
    std::mt19937_64 rng(seed);
    for (size_t i = 0; i < sample_size; ++i) {
        std::uniform_int_distribution<size_t> dist(i, indices.size() - 1);
        std::swap(indices[i], indices[dist(rng)]);
    }
    indices.resize(sample_size);

    std::ofstream out(out_csv, std::ios::trunc);
    if (!out) throw Error("distill/write-failure", "cannot write " + out_csv.string());
    out << "id,src,tgt,verdict\n";
    std::vector<std::string> ids;
    for (size_t idx : indices) {
        const auto& p = pairs[idx];
        out << csv_escape(p.src.id) << ',' << csv_escape(p.src.text) << ','
            << csv_escape(p.tgt_text) << ",\n";
        ids.push_back(p.src.id);
    }
    return ids;
}

AuditResult audit_import(const fs::path& csv_path) {
    std::ifstream in(csv_path);
    if (!in) throw Error("distill/unreadable", "cannot read " + csv_path.string());
    AuditResult result;
    std::string line;
    bool first = true;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        if (first) {
            first = false;
            if (line.rfind("id,", 0) == 0) continue;
        }
        auto fields = csv_split(line);
        if (fields.size() < 4) continue;
        ++result.total;
        std::string v = fields[3];
        std::transform(v.begin(), v.end(), v.begin(), ::tolower);
        if (v == "correct" || v == "yes" || v == "1" || v == "fully-correct")
            ++result.fully_correct;
    }
    if (result.total > 0)
        result.fraction_correct =
            static_cast<double>(result.fully_correct) / static_cast<double>(result.total);
    return result;
}

}  // namespace lrlforge::distill
