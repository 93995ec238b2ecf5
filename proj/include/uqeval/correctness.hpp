#pragma once

#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "uqeval/records.hpp"

namespace uqeval {

/// Outcome of one correctness function on one record.
struct CorrectnessResult {
    std::string metric_id;
    double raw = 0.0;
    std::optional<double> threshold;
    std::optional<int> label;  // present iff threshold present or metric inherently binary
};

struct OverlapScore {
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
};

/// Candidate binarization thresholds per metric id. Defaults mirror the
/// standard UQ evaluation protocols; overridable from a config file.
class ThresholdCatalog {
public:
    static ThresholdCatalog defaults();

    const std::vector<double>& thresholds(const std::string& metric_id) const;
    void set(const std::string& metric_id, std::vector<double> thresholds);
    const std::map<std::string, std::vector<double>>& all() const { return catalog_; }

private:
    std::map<std::string, std::vector<double>> catalog_;
};

/// Length of the longest (possibly non-contiguous) common subsequence.
std::size_t lcs_length(std::span<const std::string> a, std::span<const std::string> b);

/// ROUGE-L precision/recall/F1 on tokenize_for_overlap output.
OverlapScore rouge_l(const std::string& hyp, const std::string& ref);

/// ROUGE-1 with clipped multiset unigram overlap.
OverlapScore rouge_1(const std::string& hyp, const std::string& ref);

/// Bag-of-tokens F1, max over references. Throws ContractError on empty refs.
double squad_f1(const std::string& hyp, std::span<const std::string> refs);

/// Passthrough for precomputed scores (BERTScore, SentenceBERT, AlignScore).
/// Throws LookupError naming the metric and record when absent.
double external_metric(const GenerationRecord& record, const std::string& metric_id);

/// Inclusive comparison: 1 iff raw >= t.
inline int binarize(double raw, double t) { return raw >= t ? 1 : 0; }

/// True for metric ids this module can score (anything but llm_judge).
bool known_metric(const std::string& metric_id);

/// Raw score for one metric on one record; reduction over references is max.
double raw_score(const GenerationRecord& record, const std::string& metric_id);

/// Full correctness evaluation: raw score plus binarized label.
CorrectnessResult score_record(const GenerationRecord& record, const std::string& metric_id,
                               double threshold);

}  // namespace uqeval
