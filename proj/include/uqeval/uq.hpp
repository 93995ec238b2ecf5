#pragma once

#include <functional>
#include <span>
#include <string>
#include <vector>

#include "uqeval/records.hpp"

namespace uqeval {

/// A scalar uncertainty estimate. Convention: higher value = more uncertain,
/// for every method; orientation is normalized here at construction.
struct UncertaintyScore {
    std::string method_id;
    double value = 0.0;
};

/// One meaning-equivalence cluster over the sample list.
struct SemanticCluster {
    std::vector<std::size_t> members;  // indices into the sample list
    double probability = 0.0;
};

/// Symmetric binary predicate on answer texts ("do these mean the same?").
using EquivalenceOracle = std::function<bool(const std::string&, const std::string&)>;

/// Built-in oracle: exact match after normalize_text.
bool normalized_exact_match(const std::string& a, const std::string& b);

/// value = -exp(sum of token logprobs); in [-1, 0).
UncertaintyScore neg_sequence_probability(const GeneratedAnswer& ans);

/// value = exp(-(1/L) * sum of token logprobs); >= 1.
UncertaintyScore perplexity(const GeneratedAnswer& ans);

/// value = (1/L) * sum of per-token entropies, in nats. Throws
/// EstimatorUnavailableError when any token lacks an entropy field.
UncertaintyScore mean_token_entropy(const GeneratedAnswer& ans);

struct NaiveEntropyOptions {
    /// When set, each distinct sample text contributes once.
    bool unique_sequences = false;
};

/// Entropy over sampled sequences' probabilities, summed verbatim over the
/// sample list (no deduplication, no normalization); p log p -> 0 at p = 0.
UncertaintyScore naive_entropy(std::span<const GeneratedAnswer> samples,
                               const NaiveEntropyOptions& opts = {});

/// Greedy clustering: each sample joins the first cluster whose
/// representative it is equivalent to, else founds a new one. Cluster mass
/// sums the sequence probabilities of unique member texts, then normalizes.
std::vector<SemanticCluster> cluster_samples(std::span<const GeneratedAnswer> samples,
                                             const EquivalenceOracle& equivalent);

/// Unnormalized unique-text probability mass of one cluster.
double detail_unique_text_mass(const SemanticCluster& cluster,
                               std::span<const GeneratedAnswer> samples, bool length_normalized);

struct SemanticEntropyOptions {
    bool length_normalized = false;
    /// Renormalize cluster masses to sum to 1 before the entropy
    /// (divergence knob: --no-normalize-clusters disables it).
    bool normalize_clusters = true;
};

/// Shannon entropy of the cluster distribution, in nats.
UncertaintyScore semantic_entropy(std::span<const SemanticCluster> clusters,
                                  std::span<const GeneratedAnswer> samples,
                                  const SemanticEntropyOptions& opts = {});

enum class LengthUnit { Tokens, Chars };

UncertaintyScore length_baseline(const GeneratedAnswer& ans, LengthUnit unit);

}  // namespace uqeval
