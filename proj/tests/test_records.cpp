#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>
#include <sstream>

#include "fixtures.hpp"
#include "uqeval/errors.hpp"
#include "uqeval/records.hpp"

using namespace uqeval;

namespace {

const char* kGoodLine =
    R"({"id": "r1", "question": "Q?", "references": ["ref a"], )"
    R"("greedy": {"text": "hello world x", "tokens": [)"
    R"({"text": "hello", "logprob": -0.5, "entropy": 0.2}, )"
    R"({"text": " world", "logprob": -1.0, "entropy": null}, )"
    R"({"text": " x", "logprob": -0.1}]}, )"
    R"("samples": [], "embedding": null, "external_scores": {"alignscore": 0.9}})";

std::vector<GenerationRecord> parse_string(const std::string& text) {
    std::istringstream in(text);
    return parse_records(in);
}

}  // namespace

TEST_CASE("well-formed line round-trips into one record") {
    const auto records = parse_string(kGoodLine);
    REQUIRE(records.size() == 1);
    const auto& rec = records[0];
    CHECK(rec.id == "r1");
    CHECK(rec.greedy.tokens.size() == 3);
    CHECK(rec.greedy.tokens[0].entropy.has_value());
    CHECK_FALSE(rec.greedy.tokens[1].entropy.has_value());
    CHECK(rec.greedy.sequence_logprob() == doctest::Approx(-1.6));
    CHECK(rec.external_scores.at("alignscore") == 0.9);
}

TEST_CASE("empty stream yields empty list") {
    CHECK(parse_string("").empty());
    CHECK(parse_string("\n\n").empty());
}

TEST_CASE("positive logprob is rejected as invariant violation") {
    const std::string line =
        R"({"id": "r1", "question": "Q", "references": ["r"], "greedy": {"text": "t", )"
        R"("tokens": [{"text": "t", "logprob": 0.5}]}})";
    CHECK_THROWS_AS(parse_string(line), InvariantError);
}

TEST_CASE("malformed JSON reports the line number") {
    const std::string text = std::string(kGoodLine) + "\n{not json";
    try {
        parse_string(text);
        FAIL("expected ParseError");
    } catch (const ParseError& e) {
        CHECK(e.line == 2);
    }
}

TEST_CASE("missing mandatory field names the field") {
    const std::string line = R"({"id": "r1", "references": ["r"], "greedy": {"text": "t", )"
                             R"("tokens": [{"text": "t", "logprob": -0.5}]}})";
    try {
        parse_string(line);
        FAIL("expected SchemaError");
    } catch (const SchemaError& e) {
        CHECK(e.field == "question");
    }
}

TEST_CASE("duplicate ids are rejected") {
    const std::string text = std::string(kGoodLine) + "\n" + kGoodLine;
    try {
        parse_string(text);
        FAIL("expected DuplicateIdError");
    } catch (const DuplicateIdError& e) {
        CHECK(e.id == "r1");
    }
}

TEST_CASE("records module rejects other invariant violations") {
    CHECK_THROWS_AS(parse_string(R"({"id": "a", "question": "q", "references": [], )"
                                 R"("greedy": {"text": "t", "tokens": [{"text": "t", "logprob": -1}]}})"),
                    InvariantError);
    CHECK_THROWS_AS(parse_string(R"({"id": "a", "question": "q", "references": ["r"], )"
                                 R"("greedy": {"text": "t", "tokens": []}})"),
                    InvariantError);
    CHECK_THROWS_AS(parse_string(R"({"id": "a", "question": "q", "references": ["r"], )"
                                 R"("greedy": {"text": "t", "tokens": [{"text": "t", "logprob": -1, )"
                                 R"("entropy": -0.1}]}})"),
                    InvariantError);
    // external score declared in [0,1] out of range
    CHECK_THROWS_AS(parse_string(R"({"id": "a", "question": "q", "references": ["r"], )"
                                 R"("greedy": {"text": "t", "tokens": [{"text": "t", "logprob": -1}]}, )"
                                 R"("external_scores": {"alignscore": 1.5}})"),
                    InvariantError);
}

TEST_CASE("embedding dimensions must agree across the dataset") {
    const std::string a = R"({"id": "a", "question": "q", "references": ["r"], )"
                          R"("greedy": {"text": "t", "tokens": [{"text": "t", "logprob": -1}]}, )"
                          R"("embedding": [1.0, 2.0]})";
    const std::string b = R"({"id": "b", "question": "q", "references": ["r"], )"
                          R"("greedy": {"text": "t", "tokens": [{"text": "t", "logprob": -1}]}, )"
                          R"("embedding": [1.0]})";
    CHECK_THROWS_AS(parse_string(a + "\n" + b), InvariantError);
    CHECK(parse_string(a + "\n" + b.substr(0, b.find("[1.0]")) + "[3.0, 4.0]}").size() == 2);
}

TEST_CASE("normalize_text applies the four rules") {
    CHECK(normalize_text("The Cat.") == "cat");
    CHECK(normalize_text("") == "");
    CHECK(normalize_text("An  apple,  a day") == "apple day");
    CHECK(normalize_text("  the   THE the  ") == "");
}

TEST_CASE("tokenize_for_overlap splits normalized text") {
    CHECK(tokenize_for_overlap("the cat sat") == std::vector<std::string>{"cat", "sat"});
    CHECK(tokenize_for_overlap("").empty());
    CHECK(tokenize_for_overlap("Paris, France!") == std::vector<std::string>{"paris", "france"});
}

TEST_CASE("normalize_text is idempotent and tokens are never empty") {
    std::mt19937 rng(7);
    std::uniform_int_distribution<int> len(0, 40);
    std::uniform_int_distribution<int> chr(32, 126);
    for (int trial = 0; trial < 500; ++trial) {
        std::string s;
        const int n = len(rng);
        for (int i = 0; i < n; ++i) s.push_back(static_cast<char>(chr(rng)));
        const std::string once = normalize_text(s);
        CHECK(normalize_text(once) == once);
        for (const auto& tok : tokenize_for_overlap(s)) CHECK_FALSE(tok.empty());
    }
}

TEST_CASE("serialize/parse round-trip preserves record sets") {
    std::mt19937 rng(99);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::uniform_int_distribution<int> small(1, 5);

    std::vector<GenerationRecord> records;
    for (int i = 0; i < 25; ++i) {
        GenerationRecord rec;
        rec.id = "rec-" + std::to_string(i);
        rec.question = "question " + std::to_string(i) + " with \"quotes\" and \n escapes";
        rec.references = {"ref one", "ref \"two\""};
        const int tokens = small(rng);
        for (int t = 0; t < tokens; ++t) {
            TokenObservation tok;
            tok.text = "tok" + std::to_string(t);
            tok.logprob = -3.0 * unit(rng);
            if (unit(rng) < 0.5) tok.entropy = 2.0 * unit(rng);
            rec.greedy.tokens.push_back(tok);
            rec.greedy.text += (t ? " " : "") + tok.text;
        }
        if (unit(rng) < 0.6) {
            for (int s = 0; s < small(rng); ++s) {
                GeneratedAnswer sample;
                sample.text = "sample " + std::to_string(s);
                sample.tokens.push_back({"s", -unit(rng), std::nullopt});
                rec.samples.push_back(sample);
            }
        }
        if (unit(rng) < 0.5) rec.embedding = std::vector<double>{unit(rng), unit(rng), unit(rng)};
        if (unit(rng) < 0.5) rec.external_scores["alignscore"] = unit(rng);
        records.push_back(std::move(rec));
    }

    std::ostringstream out;
    serialize_records(records, out);
    const auto reparsed = parse_string(out.str());
    REQUIRE(reparsed.size() == records.size());
    for (std::size_t i = 0; i < records.size(); ++i) CHECK(reparsed[i] == records[i]);
}

TEST_CASE("annotation parsing validates labels and duplicates") {
    std::istringstream good(
        "{\"record_id\": \"r1\", \"annotator_id\": \"a\", \"label\": 1}\n"
        "{\"record_id\": \"r1\", \"annotator_id\": \"b\", \"label\": 0}\n");
    const auto annotations = parse_annotations(good);
    REQUIRE(annotations.size() == 2);
    CHECK(annotations[0].label == 1);

    std::istringstream dup(
        "{\"record_id\": \"r1\", \"annotator_id\": \"a\", \"label\": 1}\n"
        "{\"record_id\": \"r1\", \"annotator_id\": \"a\", \"label\": 0}\n");
    CHECK_THROWS_AS(parse_annotations(dup), DuplicateIdError);

    std::istringstream bad_label("{\"record_id\": \"r1\", \"annotator_id\": \"a\", \"label\": 2}\n");
    CHECK_THROWS_AS(parse_annotations(bad_label), InvariantError);
}

TEST_CASE("bundled toy corpus parses and satisfies invariants") {
    const auto records = parse_records_file(std::string(UQEVAL_DATA_DIR) + "/toy_corpus.jsonl");
    CHECK(records.size() == 24);
    for (const auto& rec : records) {
        CHECK_FALSE(rec.greedy.tokens.empty());
        CHECK(rec.greedy.sequence_logprob() <= 0.0);
        REQUIRE(rec.embedding.has_value());
        CHECK(rec.embedding->size() == 4);
    }
    const auto annotations =
        parse_annotations_file(std::string(UQEVAL_DATA_DIR) + "/toy_annotations.jsonl");
    CHECK(annotations.size() == 96);
}
