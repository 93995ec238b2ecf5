#include "uqeval/uq.hpp"

#include <cmath>
#include <unordered_map>
#include <unordered_set>

#include "uqeval/errors.hpp"

namespace uqeval {

bool normalized_exact_match(const std::string& a, const std::string& b) {
    return normalize_text(a) == normalize_text(b);
}

UncertaintyScore neg_sequence_probability(const GeneratedAnswer& ans) {
    if (ans.tokens.empty()) throw ContractError("neg_sequence_probability: empty token list");
    return {"neg_seq_prob", -std::exp(ans.sequence_logprob())};
}

UncertaintyScore perplexity(const GeneratedAnswer& ans) {
    if (ans.tokens.empty()) throw ContractError("perplexity: empty token list");
    const double mean = ans.sequence_logprob() / static_cast<double>(ans.tokens.size());
    return {"perplexity", std::exp(-mean)};
}

UncertaintyScore mean_token_entropy(const GeneratedAnswer& ans) {
    if (ans.tokens.empty()) throw ContractError("mean_token_entropy: empty token list");
    double sum = 0.0;
    for (const auto& tok : ans.tokens) {
        if (!tok.entropy) {
            throw EstimatorUnavailableError(
                "mean_token_entropy unavailable: token without entropy field");
        }
        sum += *tok.entropy;
    }
    return {"mean_token_entropy", sum / static_cast<double>(ans.tokens.size())};
}

namespace {

inline double plogp(double p) { return p > 0.0 ? p * std::log(p) : 0.0; }

}  // namespace

UncertaintyScore naive_entropy(std::span<const GeneratedAnswer> samples,
                               const NaiveEntropyOptions& opts) {
    if (samples.empty()) throw ContractError("naive_entropy: empty sample list");
    double sum = 0.0;
    std::unordered_set<std::string> seen;
    for (const auto& sample : samples) {
        if (opts.unique_sequences && !seen.insert(sample.text).second) continue;
        sum -= plogp(std::exp(sample.sequence_logprob()));
    }
    return {"naive_entropy", sum};
}

std::vector<SemanticCluster> cluster_samples(std::span<const GeneratedAnswer> samples,
                                             const EquivalenceOracle& equivalent) {
    if (samples.empty()) throw ContractError("cluster_samples: empty sample list");
    std::vector<SemanticCluster> clusters;
    for (std::size_t i = 0; i < samples.size(); ++i) {
        bool placed = false;
        for (auto& cluster : clusters) {
            const auto& representative = samples[cluster.members.front()].text;
            if (equivalent(samples[i].text, representative)) {
                cluster.members.push_back(i);
                placed = true;
                break;
            }
        }
        if (!placed) clusters.push_back({{i}, 0.0});
    }

    // Mass = sum of sequence probabilities of unique member texts.
    double total = 0.0;
    for (auto& cluster : clusters) {
        cluster.probability = detail_unique_text_mass(cluster, samples, false);
        total += cluster.probability;
    }
    if (total > 0.0) {
        for (auto& cluster : clusters) cluster.probability /= total;
    }
    return clusters;
}

double detail_unique_text_mass(const SemanticCluster& cluster,
                               std::span<const GeneratedAnswer> samples, bool length_normalized) {
    // One contribution per unique text. Should duplicates ever disagree on
    // their logprobs, the maximum is the canonical one, which keeps the
    // mass independent of sample order.
    std::unordered_map<std::string, double> best;
    for (std::size_t idx : cluster.members) {
        const auto& sample = samples[idx];
        double lp = sample.sequence_logprob();
        if (length_normalized) lp /= static_cast<double>(sample.tokens.size());
        auto [it, inserted] = best.try_emplace(sample.text, lp);
        if (!inserted && lp > it->second) it->second = lp;
    }
    double mass = 0.0;
    for (const auto& [text, lp] : best) mass += std::exp(lp);
    return mass;
}

UncertaintyScore semantic_entropy(std::span<const SemanticCluster> clusters,
                                  std::span<const GeneratedAnswer> samples,
                                  const SemanticEntropyOptions& opts) {
    if (clusters.empty()) throw ContractError("semantic_entropy: no clusters");

    // Raw masses are recomputed here so the no-normalization knob sees the
    // unique-sum sequence probabilities, not the already-normalized field.
    std::vector<double> masses;
    masses.reserve(clusters.size());
    for (const auto& cluster : clusters) {
        masses.push_back(detail_unique_text_mass(cluster, samples, opts.length_normalized));
    }

    if (opts.normalize_clusters) {
        double total = 0.0;
        for (double m : masses) total += m;
        if (total > 0.0) {
            for (double& m : masses) m /= total;
        }
    }

    double entropy = 0.0;
    for (double m : masses) entropy -= plogp(m);
    const char* id = opts.length_normalized ? "semantic_entropy_lennorm" : "semantic_entropy";
    return {id, entropy};
}

UncertaintyScore length_baseline(const GeneratedAnswer& ans, LengthUnit unit) {
    if (unit == LengthUnit::Tokens) {
        return {"len_tokens", static_cast<double>(ans.tokens.size())};
    }
    return {"len_chars", static_cast<double>(ans.text.size())};
}

}  // namespace uqeval
