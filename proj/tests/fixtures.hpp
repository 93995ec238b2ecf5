#pragma once

// Shared test fixtures: record builders, the synthetic length-bias corpus,
// and an in-process stub judge server.

#include <atomic>
#include <cmath>
#include <functional>
#include <string>
#include <thread>
#include <vector>

#include <httplib.h>
#include <json.hpp>

#include "uqeval/records.hpp"

namespace fixtures {

inline uqeval::GeneratedAnswer answer_with_logprobs(const std::vector<double>& logprobs,
                                                    std::string text = "answer") {
    uqeval::GeneratedAnswer ans;
    ans.text = std::move(text);
    for (std::size_t i = 0; i < logprobs.size(); ++i) {
        ans.tokens.push_back({"tok" + std::to_string(i), logprobs[i], std::nullopt});
    }
    return ans;
}

inline uqeval::GeneratedAnswer answer_with_entropies(const std::vector<double>& logprobs,
                                                     const std::vector<double>& entropies,
                                                     std::string text = "answer") {
    auto ans = answer_with_logprobs(logprobs, std::move(text));
    for (std::size_t i = 0; i < entropies.size(); ++i) ans.tokens[i].entropy = entropies[i];
    return ans;
}

inline uqeval::GenerationRecord simple_record(const std::string& id, const std::string& answer,
                                              const std::vector<std::string>& references,
                                              const std::vector<double>& logprobs = {-0.1}) {
    uqeval::GenerationRecord rec;
    rec.id = id;
    rec.question = "question for " + id;
    rec.references = references;
    rec.greedy = answer_with_logprobs(logprobs, answer);
    return rec;
}

/// Constant-per-token-probability corpus: record k has k+1 tokens, all at
/// logprob ln(p_k). The per-record probabilities are palindromic across the
/// corpus (p_k == p_{n-1-k}) and independent of length, so Spearman of any
/// length-free monotone function of p against length cancels exactly, while
/// neg_seq_prob stays strictly ordered by length.
inline std::vector<uqeval::GenerationRecord> length_bias_corpus(std::size_t n) {
    std::vector<uqeval::GenerationRecord> records;
    records.reserve(n);
    for (std::size_t k = 0; k < n; ++k) {
        const std::size_t mirror = std::min(k + 1, n - k);
        const double p = 0.5 * (1.0 + 1e-6 * static_cast<double>(mirror));
        const std::size_t tokens = k + 1;
        std::vector<double> logprobs(tokens, std::log(p));
        uqeval::GenerationRecord rec;
        rec.id = "len-" + std::to_string(k);
        rec.question = "q";
        rec.references = {"ref"};
        std::string text(tokens, 'x');  // char length == token length
        rec.greedy = answer_with_logprobs(logprobs, text);
        records.push_back(std::move(rec));
    }
    return records;
}

/// Local chat-completion endpoint. The default rule answers "yes" iff any
/// normalized reference occurs inside the normalized proposed answer, which
/// matches ground truth on the bundled toy corpus.
class StubJudgeServer {
public:
    using Rule = std::function<std::string(const std::string& question,
                                           const std::string& reference,
                                           const std::string& answer)>;

    static std::string contains_reference_rule(const std::string&, const std::string& reference,
                                               const std::string& answer) {
        const std::string norm_answer = uqeval::normalize_text(answer);
        std::size_t start = 0;
        while (true) {
            const auto end = reference.find("; ", start);
            const std::string ref = uqeval::normalize_text(
                reference.substr(start, end == std::string::npos ? end : end - start));
            if (!ref.empty() && norm_answer.find(ref) != std::string::npos) return "yes";
            if (end == std::string::npos) break;
            start = end + 2;
        }
        return "no";
    }

    explicit StubJudgeServer(Rule rule = contains_reference_rule) : rule_(std::move(rule)) {
        server_.Post("/v1/chat/completions",
                     [this](const httplib::Request& req, httplib::Response& res) {
                         ++calls_;
                         handle(req, res);
                     });
        port_ = server_.bind_to_any_port("127.0.0.1");
        thread_ = std::thread([this] { server_.listen_after_bind(); });
        server_.wait_until_ready();
    }

    ~StubJudgeServer() {
        server_.stop();
        if (thread_.joinable()) thread_.join();
    }

    std::string endpoint() const {
        return "http://127.0.0.1:" + std::to_string(port_) + "/v1/chat/completions";
    }

    int calls() const { return calls_.load(); }

private:
    static std::string extract_line(const std::string& prompt, const std::string& prefix) {
        const auto pos = prompt.find(prefix);
        if (pos == std::string::npos) return "";
        const auto start = pos + prefix.size();
        const auto end = prompt.find('\n', start);
        return prompt.substr(start, end == std::string::npos ? end : end - start);
    }

    void handle(const httplib::Request& req, httplib::Response& res) {
        const auto body = nlohmann::json::parse(req.body);
        const std::string prompt = body.at("messages").at(1).at("content").get<std::string>();
        std::string question, reference, answer;
        if (prompt.rfind("Premise: ", 0) == 0) {  // directed entailment template
            reference = extract_line(prompt, "Premise: ");
            answer = extract_line(prompt, "Hypothesis: ");
        } else {
            question = extract_line(prompt, "We are evaluating answers to the question: ");
            reference = extract_line(prompt, "The reference answer is: ");
            answer = extract_line(prompt, "The proposed answer is: ");
        }
        const nlohmann::json reply = {
            {"choices",
             {{{"message", {{"role", "assistant"}, {"content", rule_(question, reference, answer)}}}}}}};
        res.set_content(reply.dump(), "application/json");
    }

    Rule rule_;
    httplib::Server server_;
    std::thread thread_;
    int port_ = 0;
    std::atomic<int> calls_{0};
};

}  // namespace fixtures
