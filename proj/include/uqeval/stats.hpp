#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <utility>
#include <vector>

namespace uqeval {

/// Conditional confusion rates in the estimated-label convention:
/// tpr = P(h=1 | h_hat=1), tnr = P(h=0 | h_hat=0), fpr = 1-tpr, fnr = 1-tnr.
struct ConfusionRates {
    double tpr = 1.0;
    double fpr = 0.0;
    double tnr = 1.0;
    double fnr = 0.0;

    static ConfusionRates from_tpr_tnr(double tpr, double tnr) {
        return {tpr, 1.0 - tpr, tnr, 1.0 - tnr};
    }
};

struct AurocEstimate {
    double value = 0.0;
    std::size_t n_pos = 0;      // labels == 1
    std::size_t n_neg = 0;      // labels == 0
    std::uint64_t tie_pairs = 0;  // cross-class pairs with equal scores
};

struct ScoredLabel {
    double uncertainty = 0.0;
    int label = 0;
};

/// AUROC in the "lower uncertainty for correct samples" orientation:
/// P(g_i < g_j | label_i=1, label_j=0), ties worth 1/2. Rank-sum based,
/// exactly equal to the all-pairs estimator. Throws UndefinedStatError
/// when only one class is present.
AurocEstimate auroc(std::span<const ScoredLabel> scores);

/// AUROC of g and of -g; without ties these sum to exactly 1.
std::pair<AurocEstimate, AurocEstimate> auroc_complement_check(std::span<const ScoredLabel> scores);

struct KappaResult {
    double value = 0.0;
    /// Set when chance agreement is 1 or either vector is constant;
    /// the statistic is then uninformative and the value is pinned to 0
    /// where the formula is undefined.
    bool degenerate = false;
};

/// Cohen's kappa with marginal-product chance agreement.
KappaResult cohen_kappa(std::span<const int> a, std::span<const int> b);

/// Spearman rank correlation on average ranks (tie-corrected).
/// Throws UndefinedStatError when either vector is constant or n < 2.
double spearman(std::span<const double> x, std::span<const double> y);

/// Permutation p-value for |spearman| >= |observed|; diagnostic only.
double spearman_permutation_pvalue(std::span<const double> x, std::span<const double> y,
                                   std::size_t permutations, std::uint64_t seed);

struct BootstrapInterval {
    double lower = 0.0;
    double upper = 1.0;
    std::size_t resamples_used = 0;  // degenerate single-class resamples are skipped
};

/// Percentile bootstrap interval for AUROC; diagnostic utility, not part
/// of any report contract.
BootstrapInterval auroc_bootstrap_ci(std::span<const ScoredLabel> scores, std::size_t resamples,
                                     double alpha, std::uint64_t seed);

/// Empirical estimated-label-conditioned rates. Throws UndefinedStatError
/// when h_hat is single-class.
ConfusionRates confusion_rates(std::span<const int> h, std::span<const int> h_hat);

/// Average ranks (1-based, ties averaged).
std::vector<double> average_ranks(std::span<const double> values);

}  // namespace uqeval
