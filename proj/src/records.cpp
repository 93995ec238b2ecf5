#include "uqeval/records.hpp"

#include <cctype>
#include <cmath>
#include <fstream>
#include <sstream>
#include <unordered_set>

#include <json.hpp>

#include "uqeval/errors.hpp"

namespace uqeval {

using nlohmann::json;

double GeneratedAnswer::sequence_logprob() const {
    double sum = 0.0;
    for (const auto& t : tokens) sum += t.logprob;
    return sum;
}

std::string normalize_text(const std::string& s) {
    std::string cleaned;
    cleaned.reserve(s.size());
    for (unsigned char c : s) {
        if (c < 0x80 && std::ispunct(c)) continue;
        cleaned.push_back(c < 0x80 ? static_cast<char>(std::tolower(c)) : static_cast<char>(c));
    }
    std::istringstream words(cleaned);
    std::string word;
    std::string out;
    while (words >> word) {
        if (word == "a" || word == "an" || word == "the") continue;
        if (!out.empty()) out.push_back(' ');
        out += word;
    }
    return out;
}

std::vector<std::string> tokenize_for_overlap(const std::string& s) {
    std::istringstream words(normalize_text(s));
    std::vector<std::string> tokens;
    std::string word;
    while (words >> word) tokens.push_back(word);
    return tokens;
}

namespace {

const json& require_field(const json& obj, const char* name) {
    auto it = obj.find(name);
    if (it == obj.end()) {
        throw SchemaError(name, std::string("missing mandatory field: ") + name);
    }
    return *it;
}

TokenObservation parse_token(const json& j) {
    if (!j.is_object()) throw SchemaError("tokens", "token entry is not an object");
    TokenObservation tok;
    tok.text = require_field(j, "text").get<std::string>();
    tok.logprob = require_field(j, "logprob").get<double>();
    if (tok.logprob > 0.0) {
        throw InvariantError("token logprob must be <= 0, got " + std::to_string(tok.logprob));
    }
    if (auto it = j.find("entropy"); it != j.end() && !it->is_null()) {
        const double h = it->get<double>();
        if (h < 0.0) throw InvariantError("token entropy must be >= 0, got " + std::to_string(h));
        tok.entropy = h;
    }
    return tok;
}

GeneratedAnswer parse_answer(const json& j, const char* field) {
    if (!j.is_object()) throw SchemaError(field, std::string(field) + " is not an object");
    GeneratedAnswer ans;
    ans.text = require_field(j, "text").get<std::string>();
    const json& toks = require_field(j, "tokens");
    if (!toks.is_array()) throw SchemaError("tokens", "tokens is not an array");
    for (const auto& t : toks) ans.tokens.push_back(parse_token(t));
    if (ans.tokens.empty()) {
        throw InvariantError(std::string(field) + ": token list must be non-empty");
    }
    return ans;
}

// Metric ids whose scores are declared to live in the unit interval.
bool unit_interval_metric(const std::string& id) {
    return id == "bertscore_f1" || id == "alignscore";
}

GenerationRecord parse_one_record(const json& j) {
    if (!j.is_object()) throw SchemaError("record", "record line is not a JSON object");
    GenerationRecord rec;
    rec.id = require_field(j, "id").get<std::string>();
    rec.question = require_field(j, "question").get<std::string>();

    const json& refs = require_field(j, "references");
    if (!refs.is_array()) throw SchemaError("references", "references is not an array");
    for (const auto& r : refs) rec.references.push_back(r.get<std::string>());
    if (rec.references.empty()) throw InvariantError("references must be non-empty");

    rec.greedy = parse_answer(require_field(j, "greedy"), "greedy");

    if (auto it = j.find("samples"); it != j.end() && !it->is_null()) {
        if (!it->is_array()) throw SchemaError("samples", "samples is not an array");
        for (const auto& s : *it) rec.samples.push_back(parse_answer(s, "samples"));
    }

    if (auto it = j.find("embedding"); it != j.end() && !it->is_null()) {
        if (!it->is_array()) throw SchemaError("embedding", "embedding is not an array");
        rec.embedding = it->get<std::vector<double>>();
        for (double v : *rec.embedding) {
            if (!std::isfinite(v)) throw InvariantError("embedding contains a non-finite value");
        }
    }

    if (auto it = j.find("external_scores"); it != j.end() && !it->is_null()) {
        if (!it->is_object()) throw SchemaError("external_scores", "external_scores is not an object");
        for (const auto& [key, value] : it->items()) {
            const double v = value.get<double>();
            if (unit_interval_metric(key) && (v < 0.0 || v > 1.0)) {
                throw InvariantError("external score " + key + " out of [0,1]: " + std::to_string(v));
            }
            rec.external_scores[key] = v;
        }
    }
    return rec;
}

}  // namespace

std::vector<GenerationRecord> parse_records(std::istream& in) {
    std::vector<GenerationRecord> records;
    std::unordered_set<std::string> seen_ids;
    std::optional<std::size_t> embedding_dim;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r\n") == std::string::npos) continue;
        json j;
        try {
            j = json::parse(line);
        } catch (const json::parse_error& e) {
            throw ParseError(line_no, e.what());
        }
        GenerationRecord rec;
        try {
            rec = parse_one_record(j);
        } catch (const json::exception& e) {
            throw ParseError(line_no, e.what());
        }
        if (!seen_ids.insert(rec.id).second) throw DuplicateIdError(rec.id);
        if (rec.embedding) {
            if (embedding_dim && *embedding_dim != rec.embedding->size()) {
                throw InvariantError("embedding dimension mismatch at record " + rec.id + ": " +
                                     std::to_string(rec.embedding->size()) + " vs " +
                                     std::to_string(*embedding_dim));
            }
            embedding_dim = rec.embedding->size();
        }
        records.push_back(std::move(rec));
    }
    return records;
}

std::vector<GenerationRecord> parse_records_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open records file: " + path);
    return parse_records(in);
}

namespace {

json answer_to_json(const GeneratedAnswer& ans) {
    json toks = json::array();
    for (const auto& t : ans.tokens) {
        json jt = {{"text", t.text}, {"logprob", t.logprob}};
        jt["entropy"] = t.entropy ? json(*t.entropy) : json(nullptr);
        toks.push_back(std::move(jt));
    }
    return json{{"text", ans.text}, {"tokens", std::move(toks)}};
}

}  // namespace

std::string serialize_record(const GenerationRecord& rec) {
    json j;
    j["id"] = rec.id;
    j["question"] = rec.question;
    j["references"] = rec.references;
    j["greedy"] = answer_to_json(rec.greedy);
    json samples = json::array();
    for (const auto& s : rec.samples) samples.push_back(answer_to_json(s));
    j["samples"] = std::move(samples);
    j["embedding"] = rec.embedding ? json(*rec.embedding) : json(nullptr);
    if (rec.external_scores.empty()) {
        j["external_scores"] = json(nullptr);
    } else {
        j["external_scores"] = rec.external_scores;
    }
    return j.dump();
}

void serialize_records(const std::vector<GenerationRecord>& records, std::ostream& out) {
    for (const auto& rec : records) out << serialize_record(rec) << '\n';
}

std::vector<HumanAnnotation> parse_annotations(std::istream& in) {
    std::vector<HumanAnnotation> annotations;
    std::unordered_set<std::string> seen;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r\n") == std::string::npos) continue;
        json j;
        try {
            j = json::parse(line);
        } catch (const json::parse_error& e) {
            throw ParseError(line_no, e.what());
        }
        HumanAnnotation ann;
        try {
            ann.record_id = require_field(j, "record_id").get<std::string>();
            ann.annotator_id = require_field(j, "annotator_id").get<std::string>();
            ann.label = require_field(j, "label").get<int>();
        } catch (const json::exception& e) {
            throw ParseError(line_no, e.what());
        }
        if (ann.label != 0 && ann.label != 1) {
            throw InvariantError("annotation label must be 0 or 1, got " + std::to_string(ann.label));
        }
        if (!seen.insert(ann.record_id + "\x1f" + ann.annotator_id).second) {
            throw DuplicateIdError(ann.record_id + "/" + ann.annotator_id);
        }
        annotations.push_back(std::move(ann));
    }
    return annotations;
}

std::vector<HumanAnnotation> parse_annotations_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open annotations file: " + path);
    return parse_annotations(in);
}

}  // namespace uqeval
