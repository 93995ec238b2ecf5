#pragma once

#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

namespace uqeval {

/// One generated token: surface text, natural-log probability assigned by
/// the model, and optionally the full-vocabulary entropy (nats) of the
/// predictive distribution at that position.
struct TokenObservation {
    std::string text;
    double logprob = 0.0;               // always <= 0
    std::optional<double> entropy;      // >= 0 when present

    bool operator==(const TokenObservation&) const = default;
};

struct GeneratedAnswer {
    std::string text;
    std::vector<TokenObservation> tokens;  // non-empty

    /// Sum of token logprobs, i.e. log of the sequence probability.
    double sequence_logprob() const;

    bool operator==(const GeneratedAnswer&) const = default;
};

/// One QA instance from a model-output dump.
struct GenerationRecord {
    std::string id;
    std::string question;
    std::vector<std::string> references;   // non-empty
    GeneratedAnswer greedy;
    std::vector<GeneratedAnswer> samples;  // may be empty
    std::optional<std::vector<double>> embedding;
    std::map<std::string, double> external_scores;

    bool operator==(const GenerationRecord&) const = default;
};

struct HumanAnnotation {
    std::string record_id;
    std::string annotator_id;
    int label = 0;  // 1 = Equivalent, 0 = Not Equivalent

    bool operator==(const HumanAnnotation&) const = default;
};

/// Parses newline-delimited JSON records, validating every invariant.
/// Throws ParseError (with line number), SchemaError (naming the field),
/// DuplicateIdError, or InvariantError.
std::vector<GenerationRecord> parse_records(std::istream& in);
std::vector<GenerationRecord> parse_records_file(const std::string& path);

/// Inverse of parse_records: one JSON object per line, schema-exact.
void serialize_records(const std::vector<GenerationRecord>& records, std::ostream& out);
std::string serialize_record(const GenerationRecord& record);

std::vector<HumanAnnotation> parse_annotations(std::istream& in);
std::vector<HumanAnnotation> parse_annotations_file(const std::string& path);

/// Lowercase, drop English articles, strip punctuation, collapse whitespace.
/// Total and idempotent; ASCII-level (multilingual normalization is out of scope).
std::string normalize_text(const std::string& s);

/// normalize_text then split on whitespace. Never yields empty tokens.
std::vector<std::string> tokenize_for_overlap(const std::string& s);

}  // namespace uqeval
