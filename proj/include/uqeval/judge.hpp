#pragma once

#include <condition_variable>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "uqeval/records.hpp"

namespace uqeval {

struct JudgeConfig {
    std::string endpoint_url;  // e.g. http://127.0.0.1:8000/v1/chat/completions
    std::string model;
    std::string template_id = "v1";
    int max_retries = 2;
    double timeout_seconds = 60.0;
    std::optional<std::string> cache_path;
    /// Name of the model that produced the dataset, when known; used only
    /// to warn about judge/generator identity (shared-error hazard).
    std::optional<std::string> generator_model;
};

struct JudgeVerdict {
    std::string record_id;
    int label = 0;  // in {0,1}
    std::string raw_reply;
    bool cached = false;
};

/// Fills the {question} / {reference} / {answer} slots of a versioned
/// template. Byte-deterministic. Throws ConfigError on unknown ids.
std::string build_judge_prompt(const std::string& question, const std::string& reference,
                               const std::string& answer, const std::string& template_id = "v1");

/// System message sent alongside every judging prompt.
const std::string& judge_system_message();

/// Maps a judge reply to a binary verdict: the leading alphabetic token,
/// case-insensitive, must be "yes" or "no". Throws VerdictParseError
/// otherwise, carrying the raw reply.
int parse_verdict(const std::string& reply);

/// Cache key over everything that determines a verdict.
std::uint64_t judge_cache_key(const std::string& question, const std::string& answer,
                              const std::vector<std::string>& references,
                              const std::string& model, const std::string& template_id);

/// Chat-completion judge with a persistent append-only verdict cache.
/// Thread-safe: concurrent judge() calls serialize cache writes, and
/// identical in-flight requests coalesce into one network call.
class JudgeClient {
public:
    explicit JudgeClient(JudgeConfig config);

    /// Judges one record's greedy answer against all of its references
    /// (joined into the single reference slot). Cached verdicts are
    /// returned without any network traffic.
    JudgeVerdict judge(const GenerationRecord& record);

    /// Bidirectional entailment between two answer texts via the
    /// "entail_v1" template: equivalent iff each side entails the other.
    /// Both directed verdicts are cached independently.
    bool judge_equivalence(const std::string& a, const std::string& b);

    const JudgeConfig& config() const { return config_; }
    std::size_t cache_size() const;

private:
    struct Inflight {
        std::condition_variable done;
        bool finished = false;
        std::exception_ptr error;
    };

    /// Cache + single-flight wrapper around one chat-completion call.
    std::pair<int, std::string> cached_verdict(std::uint64_t key, const std::string& prompt,
                                               bool& was_cached);
    std::string post_chat_completion(const std::string& prompt);

    JudgeConfig config_;
    mutable std::mutex mutex_;
    std::map<std::uint64_t, std::pair<int, std::string>> cache_;  // key -> (label, raw reply)
    std::map<std::uint64_t, std::shared_ptr<Inflight>> inflight_;
};

/// Equivalence oracle for semantic clustering backed by a judge endpoint.
/// The client must outlive the returned callable.
std::function<bool(const std::string&, const std::string&)> make_judge_equivalence_oracle(
    JudgeClient& client);

}  // namespace uqeval
