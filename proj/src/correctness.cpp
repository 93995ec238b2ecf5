#include "uqeval/correctness.hpp"

#include <algorithm>
#include <unordered_map>

#include "uqeval/errors.hpp"

namespace uqeval {

ThresholdCatalog ThresholdCatalog::defaults() {
    ThresholdCatalog cat;
    cat.catalog_ = {
        {"rouge1_f1", {0.1}},
        {"rougeL_f1", {0.1, 0.3, 0.5}},
        {"rougeL_recall", {1.0}},
        {"squad_f1", {0.3}},
        {"bertscore_f1", {0.8}},
        {"sentencebert", {0.4, 0.9}},
        {"alignscore", {0.5}},
    };
    return cat;
}

const std::vector<double>& ThresholdCatalog::thresholds(const std::string& metric_id) const {
    auto it = catalog_.find(metric_id);
    if (it == catalog_.end()) throw LookupError("no thresholds catalogued for metric: " + metric_id);
    return it->second;
}

void ThresholdCatalog::set(const std::string& metric_id, std::vector<double> thresholds) {
    catalog_[metric_id] = std::move(thresholds);
}

std::size_t lcs_length(std::span<const std::string> a, std::span<const std::string> b) {
    if (a.empty() || b.empty()) return 0;
    // Two-row DP over the shorter sequence.
    if (b.size() > a.size()) std::swap(a, b);
    std::vector<std::size_t> prev(b.size() + 1, 0), cur(b.size() + 1, 0);
    for (std::size_t i = 1; i <= a.size(); ++i) {
        for (std::size_t j = 1; j <= b.size(); ++j) {
            if (a[i - 1] == b[j - 1]) {
                cur[j] = prev[j - 1] + 1;
            } else {
                cur[j] = std::max(prev[j], cur[j - 1]);
            }
        }
        std::swap(prev, cur);
    }
    return prev[b.size()];
}

namespace {

OverlapScore make_prf(double overlap, std::size_t hyp_len, std::size_t ref_len) {
    OverlapScore s;
    s.precision = hyp_len == 0 ? 0.0 : overlap / static_cast<double>(hyp_len);
    s.recall = ref_len == 0 ? 0.0 : overlap / static_cast<double>(ref_len);
    const double pr = s.precision + s.recall;
    s.f1 = pr == 0.0 ? 0.0 : 2.0 * s.precision * s.recall / pr;
    return s;
}

/// Clipped multiset intersection size of two token bags.
std::size_t bag_overlap(const std::vector<std::string>& a, const std::vector<std::string>& b) {
    std::unordered_map<std::string, std::size_t> counts;
    for (const auto& t : a) ++counts[t];
    std::size_t overlap = 0;
    for (const auto& t : b) {
        auto it = counts.find(t);
        if (it != counts.end() && it->second > 0) {
            --it->second;
            ++overlap;
        }
    }
    return overlap;
}

}  // namespace

OverlapScore rouge_l(const std::string& hyp, const std::string& ref) {
    const auto h = tokenize_for_overlap(hyp);
    const auto r = tokenize_for_overlap(ref);
    const auto lcs = lcs_length(h, r);
    return make_prf(static_cast<double>(lcs), h.size(), r.size());
}

OverlapScore rouge_1(const std::string& hyp, const std::string& ref) {
    const auto h = tokenize_for_overlap(hyp);
    const auto r = tokenize_for_overlap(ref);
    const auto overlap = bag_overlap(h, r);
    return make_prf(static_cast<double>(overlap), h.size(), r.size());
}

double squad_f1(const std::string& hyp, std::span<const std::string> refs) {
    if (refs.empty()) throw ContractError("squad_f1 requires at least one reference");
    const auto h = tokenize_for_overlap(hyp);
    double best = 0.0;
    for (const auto& ref : refs) {
        const auto r = tokenize_for_overlap(ref);
        const auto overlap = bag_overlap(h, r);
        best = std::max(best, make_prf(static_cast<double>(overlap), h.size(), r.size()).f1);
    }
    return best;
}

double external_metric(const GenerationRecord& record, const std::string& metric_id) {
    auto it = record.external_scores.find(metric_id);
    if (it == record.external_scores.end()) {
        throw LookupError("record " + record.id + " has no external score for metric " + metric_id);
    }
    return it->second;
}

bool known_metric(const std::string& metric_id) {
    static const char* ids[] = {"rouge1_f1",    "rougeL_f1",    "rougeL_recall", "rougeL_precision",
                                "squad_f1",     "bertscore_f1", "sentencebert",  "alignscore"};
    return std::any_of(std::begin(ids), std::end(ids),
                       [&](const char* id) { return metric_id == id; });
}

double raw_score(const GenerationRecord& record, const std::string& metric_id) {
    const std::string& hyp = record.greedy.text;
    auto max_over_refs = [&](auto&& per_ref) {
        double best = 0.0;
        bool first = true;
        for (const auto& ref : record.references) {
            const double v = per_ref(ref);
            if (first || v > best) best = v;
            first = false;
        }
        return best;
    };

    if (metric_id == "rouge1_f1") return max_over_refs([&](const std::string& r) { return rouge_1(hyp, r).f1; });
    if (metric_id == "rougeL_f1") return max_over_refs([&](const std::string& r) { return rouge_l(hyp, r).f1; });
    if (metric_id == "rougeL_recall") return max_over_refs([&](const std::string& r) { return rouge_l(hyp, r).recall; });
    if (metric_id == "rougeL_precision") return max_over_refs([&](const std::string& r) { return rouge_l(hyp, r).precision; });
    if (metric_id == "squad_f1") return squad_f1(hyp, record.references);
    if (metric_id == "bertscore_f1" || metric_id == "sentencebert" || metric_id == "alignscore") {
        return external_metric(record, metric_id);
    }
    throw ConfigError("unknown correctness metric: " + metric_id);
}

CorrectnessResult score_record(const GenerationRecord& record, const std::string& metric_id,
                               double threshold) {
    CorrectnessResult result;
    result.metric_id = metric_id;
    result.raw = raw_score(record, metric_id);
    result.threshold = threshold;
    result.label = binarize(result.raw, threshold);
    return result;
}

}  // namespace uqeval
