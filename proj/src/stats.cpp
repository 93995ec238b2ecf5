#include "uqeval/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "uqeval/errors.hpp"
#include "uqeval/rng.hpp"

namespace uqeval {

std::vector<double> average_ranks(std::span<const double> values) {
    const std::size_t n = values.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
    std::vector<double> ranks(n, 0.0);
    std::size_t i = 0;
    while (i < n) {
        std::size_t j = i;
        while (j + 1 < n && values[order[j + 1]] == values[order[i]]) ++j;
        // Tied block occupies ranks i+1 .. j+1; everyone gets the mean.
        const double rank = static_cast<double>(i + j + 2) / 2.0;
        for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = rank;
        i = j + 1;
    }
    return ranks;
}

AurocEstimate auroc(std::span<const ScoredLabel> scores) {
    AurocEstimate est;
    std::vector<double> values;
    values.reserve(scores.size());
    for (const auto& s : scores) {
        values.push_back(s.uncertainty);
        if (s.label == 1) ++est.n_pos; else ++est.n_neg;
    }
    if (est.n_pos == 0 || est.n_neg == 0) {
        throw UndefinedStatError("AUROC undefined: only one class present (n_pos=" +
                                 std::to_string(est.n_pos) + ", n_neg=" +
                                 std::to_string(est.n_neg) + ")");
    }

    // Mann-Whitney: with ranks ascending in uncertainty, the rank-sum of the
    // incorrect class counts the pairs where an incorrect sample is more
    // uncertain than a correct one, ties at half weight.
    const auto ranks = average_ranks(values);
    double rank_sum_neg = 0.0;
    for (std::size_t i = 0; i < scores.size(); ++i) {
        if (scores[i].label == 0) rank_sum_neg += ranks[i];
    }
    const double n_neg = static_cast<double>(est.n_neg);
    const double u = rank_sum_neg - n_neg * (n_neg + 1.0) / 2.0;
    est.value = u / (static_cast<double>(est.n_pos) * n_neg);

    // Cross-class tie pairs, per tied block.
    std::vector<std::size_t> order(scores.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
    std::size_t i = 0;
    while (i < order.size()) {
        std::size_t j = i;
        std::uint64_t pos = 0, neg = 0;
        while (j < order.size() && values[order[j]] == values[order[i]]) {
            if (scores[order[j]].label == 1) ++pos; else ++neg;
            ++j;
        }
        est.tie_pairs += pos * neg;
        i = j;
    }
    return est;
}

std::pair<AurocEstimate, AurocEstimate> auroc_complement_check(std::span<const ScoredLabel> scores) {
    std::vector<ScoredLabel> negated(scores.begin(), scores.end());
    for (auto& s : negated) s.uncertainty = -s.uncertainty;
    return {auroc(scores), auroc(negated)};
}

KappaResult cohen_kappa(std::span<const int> a, std::span<const int> b) {
    if (a.size() != b.size()) {
        throw ContractError("cohen_kappa: length mismatch (" + std::to_string(a.size()) + " vs " +
                            std::to_string(b.size()) + ")");
    }
    if (a.empty()) throw ContractError("cohen_kappa: empty input");

    const double n = static_cast<double>(a.size());
    double agree = 0.0, a1 = 0.0, b1 = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (a[i] == b[i]) ++agree;
        if (a[i] == 1) ++a1;
        if (b[i] == 1) ++b1;
    }
    const double pa1 = a1 / n, pb1 = b1 / n;
    const double p_o = agree / n;
    const double p_e = pa1 * pb1 + (1.0 - pa1) * (1.0 - pb1);

    KappaResult result;
    const bool a_constant = (a1 == 0.0 || a1 == n);
    const bool b_constant = (b1 == 0.0 || b1 == n);
    result.degenerate = (p_e == 1.0) || a_constant || b_constant;
    result.value = p_e == 1.0 ? 0.0 : (p_o - p_e) / (1.0 - p_e);
    return result;
}

double spearman(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size()) throw ContractError("spearman: length mismatch");
    if (x.size() < 2) throw ContractError("spearman: need at least 2 observations");

    const auto rx = average_ranks(x);
    const auto ry = average_ranks(y);
    const double n = static_cast<double>(x.size());
    const double mx = std::reduce(rx.begin(), rx.end(), 0.0) / n;
    const double my = std::reduce(ry.begin(), ry.end(), 0.0) / n;
    double num = 0.0, dx = 0.0, dy = 0.0;
    for (std::size_t i = 0; i < rx.size(); ++i) {
        num += (rx[i] - mx) * (ry[i] - my);
        dx += (rx[i] - mx) * (rx[i] - mx);
        dy += (ry[i] - my) * (ry[i] - my);
    }
    if (dx == 0.0 || dy == 0.0) {
        throw UndefinedStatError("spearman undefined: constant vector");
    }
    return num / std::sqrt(dx * dy);
}

double spearman_permutation_pvalue(std::span<const double> x, std::span<const double> y,
                                   std::size_t permutations, std::uint64_t seed) {
    const double observed = std::fabs(spearman(x, y));
    std::vector<double> shuffled(y.begin(), y.end());
    Rng rng(seed);
    std::size_t at_least = 1;  // the observed arrangement counts
    for (std::size_t p = 0; p < permutations; ++p) {
        for (std::size_t i = shuffled.size() - 1; i > 0; --i) {
            const std::size_t j = static_cast<std::size_t>(rng.next_u64() % (i + 1));
            std::swap(shuffled[i], shuffled[j]);
        }
        double rho;
        try {
            rho = spearman(x, shuffled);
        } catch (const UndefinedStatError&) {
            continue;
        }
        if (std::fabs(rho) >= observed) ++at_least;
    }
    return static_cast<double>(at_least) / static_cast<double>(permutations + 1);
}

BootstrapInterval auroc_bootstrap_ci(std::span<const ScoredLabel> scores, std::size_t resamples,
                                     double alpha, std::uint64_t seed) {
    if (alpha <= 0.0 || alpha >= 1.0) throw ContractError("bootstrap alpha must be in (0,1)");
    auroc(scores);  // validates both classes are present
    Rng rng(seed);
    std::vector<double> values;
    values.reserve(resamples);
    std::vector<ScoredLabel> resample(scores.size());
    for (std::size_t b = 0; b < resamples; ++b) {
        for (auto& slot : resample) {
            slot = scores[static_cast<std::size_t>(rng.next_u64() % scores.size())];
        }
        try {
            values.push_back(auroc(resample).value);
        } catch (const UndefinedStatError&) {
            // single-class resample, skip
        }
    }
    if (values.empty()) throw UndefinedStatError("bootstrap produced no usable resamples");
    std::sort(values.begin(), values.end());
    auto quantile = [&](double q) {
        const double pos = q * static_cast<double>(values.size() - 1);
        const auto lo = static_cast<std::size_t>(pos);
        const auto hi = std::min(lo + 1, values.size() - 1);
        const double frac = pos - static_cast<double>(lo);
        return values[lo] * (1.0 - frac) + values[hi] * frac;
    };
    return {quantile(alpha / 2.0), quantile(1.0 - alpha / 2.0), values.size()};
}

ConfusionRates confusion_rates(std::span<const int> h, std::span<const int> h_hat) {
    if (h.size() != h_hat.size()) throw ContractError("confusion_rates: length mismatch");
    double hat1 = 0.0, hat0 = 0.0, true1_given_hat1 = 0.0, true0_given_hat0 = 0.0;
    for (std::size_t i = 0; i < h.size(); ++i) {
        if (h_hat[i] == 1) {
            ++hat1;
            if (h[i] == 1) ++true1_given_hat1;
        } else {
            ++hat0;
            if (h[i] == 0) ++true0_given_hat0;
        }
    }
    if (hat1 == 0.0 || hat0 == 0.0) {
        throw UndefinedStatError("confusion rates undefined: estimated labels are single-class");
    }
    return ConfusionRates::from_tpr_tnr(true1_given_hat1 / hat1, true0_given_hat0 / hat0);
}

}  // namespace uqeval
