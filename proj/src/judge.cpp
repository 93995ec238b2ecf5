#include "uqeval/judge.hpp"

#include <cctype>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include <httplib.h>
#include <json.hpp>

#include "uqeval/errors.hpp"
#include "uqeval/hash.hpp"

namespace uqeval {

using nlohmann::json;

namespace {

// Versioned prompt templates. Changing a template means adding a new id;
// existing ids are frozen because cached verdicts are keyed on them.
const std::map<std::string, std::string>& prompt_templates() {
    static const std::map<std::string, std::string> templates = {
        {"v1",
         "We are evaluating answers to the question: {question}\n"
         "The reference answer is: {reference}\n"
         "The proposed answer is: {answer}\n"
         "Within the context of the question, does the proposed answer convey the same meaning "
         "as the reference answer? Reply with a single word: yes or no.\n"},
        // Directed entailment used pairwise by the semantic-clustering oracle.
        {"entail_v1",
         "Premise: {reference}\n"
         "Hypothesis: {answer}\n"
         "Does the premise imply the hypothesis, treating both as answers to the same question? "
         "Reply with a single word: yes or no.\n"},
    };
    return templates;
}

void replace_all(std::string& text, const std::string& slot, const std::string& value) {
    std::size_t pos = 0;
    while ((pos = text.find(slot, pos)) != std::string::npos) {
        text.replace(pos, slot.size(), value);
        pos += value.size();
    }
}

std::string join_references(const std::vector<std::string>& references) {
    std::string joined;
    for (std::size_t i = 0; i < references.size(); ++i) {
        if (i > 0) joined += "; ";
        joined += references[i];
    }
    return joined;
}

struct EndpointParts {
    std::string host;
    int port = 80;
    std::string path = "/";
};

EndpointParts parse_endpoint(const std::string& url) {
    EndpointParts parts;
    std::string rest = url;
    if (rest.rfind("http://", 0) == 0) {
        rest = rest.substr(7);
    } else if (rest.rfind("https://", 0) == 0) {
        throw ConfigError("https judge endpoints are not supported by this build; "
                          "use an http endpoint or a local proxy");
    } else {
        throw ConfigError("judge endpoint must start with http://: " + url);
    }
    const auto slash = rest.find('/');
    std::string authority = slash == std::string::npos ? rest : rest.substr(0, slash);
    parts.path = slash == std::string::npos ? "/" : rest.substr(slash);
    const auto colon = authority.find(':');
    if (colon == std::string::npos) {
        parts.host = authority;
    } else {
        parts.host = authority.substr(0, colon);
        parts.port = std::stoi(authority.substr(colon + 1));
    }
    if (parts.host.empty()) throw ConfigError("judge endpoint has no host: " + url);
    return parts;
}

}  // namespace

std::string build_judge_prompt(const std::string& question, const std::string& reference,
                               const std::string& answer, const std::string& template_id) {
    const auto& templates = prompt_templates();
    auto it = templates.find(template_id);
    if (it == templates.end()) throw ConfigError("unknown judge prompt template: " + template_id);
    std::string prompt = it->second;
    replace_all(prompt, "{question}", question);
    replace_all(prompt, "{reference}", reference);
    replace_all(prompt, "{answer}", answer);
    return prompt;
}

const std::string& judge_system_message() {
    static const std::string msg =
        "You are an impartial grader. Answer with a single word: yes or no.";
    return msg;
}

int parse_verdict(const std::string& reply) {
    std::string token;
    for (std::size_t i = 0; i < reply.size(); ++i) {
        const unsigned char c = static_cast<unsigned char>(reply[i]);
        if (std::isalpha(c)) {
            token.push_back(static_cast<char>(std::tolower(c)));
        } else if (!token.empty()) {
            break;
        }
    }
    if (token == "yes") return 1;
    if (token == "no") return 0;
    throw VerdictParseError(reply, "judge reply has no leading yes/no token: \"" + reply + "\"");
}

std::uint64_t judge_cache_key(const std::string& question, const std::string& answer,
                              const std::vector<std::string>& references,
                              const std::string& model, const std::string& template_id) {
    std::string key;
    key.reserve(question.size() + answer.size() + model.size() + template_id.size() + 16);
    key += question;
    key += '\x1f';
    key += answer;
    key += '\x1f';
    for (const auto& ref : references) {
        key += ref;
        key += '\x1e';
    }
    key += '\x1f';
    key += model;
    key += '\x1f';
    key += template_id;
    return fnv1a64(key);
}

JudgeClient::JudgeClient(JudgeConfig config) : config_(std::move(config)) {
    if (config_.max_retries < 0) throw ConfigError("judge max_retries must be >= 0");
    if (config_.timeout_seconds <= 0.0) throw ConfigError("judge timeout must be positive");
    if (!config_.cache_path) return;
    std::ifstream in(*config_.cache_path);
    if (!in) return;  // a fresh cache file is created on first write
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto tab1 = line.find('\t');
        const auto tab2 = line.find('\t', tab1 + 1);
        if (tab1 == std::string::npos || tab2 == std::string::npos) continue;
        const std::uint64_t key = std::stoull(line.substr(0, tab1), nullptr, 16);
        const int label = std::stoi(line.substr(tab1 + 1, tab2 - tab1 - 1));
        std::string reply;
        try {
            reply = json::parse(line.substr(tab2 + 1)).get<std::string>();
        } catch (const json::exception&) {
            continue;  // tolerate a truncated trailing line from an interrupted run
        }
        cache_[key] = {label, reply};
    }
}

std::size_t JudgeClient::cache_size() const {
    std::lock_guard<std::mutex> lock(mutex_);
    return cache_.size();
}

std::string JudgeClient::post_chat_completion(const std::string& prompt) {
    const EndpointParts endpoint = parse_endpoint(config_.endpoint_url);
    const json body = {
        {"model", config_.model},
        {"messages",
         {{{"role", "system"}, {"content", judge_system_message()}},
          {{"role", "user"}, {"content", prompt}}}},
        {"temperature", 0},
    };

    std::string last_error;
    for (int attempt = 0; attempt <= config_.max_retries; ++attempt) {
        httplib::Client client(endpoint.host, endpoint.port);
        const auto timeout = std::chrono::duration<double>(config_.timeout_seconds);
        client.set_connection_timeout(std::chrono::duration_cast<std::chrono::milliseconds>(timeout));
        client.set_read_timeout(std::chrono::duration_cast<std::chrono::milliseconds>(timeout));
        httplib::Headers headers;
        if (const char* key = std::getenv("JUDGE_API_KEY")) {
            headers.emplace("Authorization", std::string("Bearer ") + key);
        }
        auto res = client.Post(endpoint.path, headers, body.dump(), "application/json");
        if (!res) {
            last_error = "connection failed: " + httplib::to_string(res.error());
            continue;
        }
        if (res->status != 200) {
            last_error = "HTTP status " + std::to_string(res->status);
            continue;
        }
        try {
            const json reply = json::parse(res->body);
            return reply.at("choices").at(0).at("message").at("content").get<std::string>();
        } catch (const json::exception& e) {
            last_error = std::string("malformed completion response: ") + e.what();
            continue;
        }
    }
    throw TransportError("judge request failed after " + std::to_string(config_.max_retries + 1) +
                         " attempt(s): " + last_error);
}

std::pair<int, std::string> JudgeClient::cached_verdict(std::uint64_t key,
                                                        const std::string& prompt,
                                                        bool& was_cached) {
    std::shared_ptr<Inflight> flight;
    {
        std::unique_lock<std::mutex> lock(mutex_);
        while (true) {
            auto it = cache_.find(key);
            if (it != cache_.end()) {
                was_cached = true;
                return it->second;
            }
            auto pending = inflight_.find(key);
            if (pending == inflight_.end()) break;
            // another thread owns this request; wait for its outcome
            auto owner = pending->second;
            owner->done.wait(lock, [&] { return owner->finished; });
            if (owner->error) std::rethrow_exception(owner->error);
        }
        flight = std::make_shared<Inflight>();
        inflight_[key] = flight;
    }

    std::pair<int, std::string> verdict;
    try {
        verdict.second = post_chat_completion(prompt);
        verdict.first = parse_verdict(verdict.second);  // refusals surface, never coerced
    } catch (...) {
        std::lock_guard<std::mutex> lock(mutex_);
        flight->error = std::current_exception();
        flight->finished = true;
        flight->done.notify_all();
        inflight_.erase(key);
        throw;
    }

    {
        std::lock_guard<std::mutex> lock(mutex_);
        auto [it, inserted] = cache_.try_emplace(key, verdict);
        if (inserted && config_.cache_path) {
            std::ofstream out(*config_.cache_path, std::ios::app);
            out << to_hex(key) << '\t' << verdict.first << '\t' << json(verdict.second).dump()
                << '\n';
        }
        flight->finished = true;
        flight->done.notify_all();
        inflight_.erase(key);
    }
    was_cached = false;
    return verdict;
}

JudgeVerdict JudgeClient::judge(const GenerationRecord& record) {
    const std::uint64_t key = judge_cache_key(record.question, record.greedy.text,
                                              record.references, config_.model,
                                              config_.template_id);
    const std::string prompt = build_judge_prompt(record.question,
                                                  join_references(record.references),
                                                  record.greedy.text, config_.template_id);
    bool was_cached = false;
    const auto [label, reply] = cached_verdict(key, prompt, was_cached);
    return {record.id, label, reply, was_cached};
}

bool JudgeClient::judge_equivalence(const std::string& a, const std::string& b) {
    auto entails = [&](const std::string& premise, const std::string& hypothesis) {
        const std::uint64_t key =
            judge_cache_key("", hypothesis, {premise}, config_.model, "entail_v1");
        const std::string prompt = build_judge_prompt("", premise, hypothesis, "entail_v1");
        bool was_cached = false;
        return cached_verdict(key, prompt, was_cached).first == 1;
    };
    return entails(a, b) && entails(b, a);
}

std::function<bool(const std::string&, const std::string&)> make_judge_equivalence_oracle(
    JudgeClient& client) {
    return [&client](const std::string& a, const std::string& b) {
        return client.judge_equivalence(a, b);
    };
}

}  // namespace uqeval
