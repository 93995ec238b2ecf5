#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "uqeval/errors.hpp"
#include "uqeval/stats.hpp"

using namespace uqeval;

namespace {

std::vector<ScoredLabel> zip(const std::vector<double>& g, const std::vector<int>& labels) {
    std::vector<ScoredLabel> out(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) out[i] = {g[i], labels[i]};
    return out;
}

}  // namespace

TEST_CASE("auroc hand cases") {
    // perfect separation: correct samples strictly less uncertain
    CHECK(auroc(zip({0.1, 0.2, 0.3, 0.4}, {1, 1, 0, 0})).value == doctest::Approx(1.0));
    // 3 of 4 cross pairs ordered
    const auto est = auroc(zip({0.1, 0.35, 0.3, 0.4}, {1, 1, 0, 0}));
    CHECK(est.value == doctest::Approx(0.75));
    CHECK(est.n_pos == 2);
    CHECK(est.n_neg == 2);
    CHECK(est.tie_pairs == 0);
    // ties get half credit
    CHECK(auroc(zip({0.5, 0.5}, {1, 0})).value == doctest::Approx(0.5));
    CHECK(auroc(zip({0.5, 0.5}, {1, 0})).tie_pairs == 1);
    CHECK_THROWS_AS(auroc(zip({0.1, 0.2}, {1, 1})), UndefinedStatError);
    CHECK_THROWS_AS(auroc(zip({}, {})), UndefinedStatError);
}

TEST_CASE("auroc equals the all-pairs oracle, ties included") {
    std::mt19937 rng(31);
    std::uniform_int_distribution<int> size(2, 120);
    std::uniform_int_distribution<int> grid(0, 9);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (int trial = 0; trial < 400; ++trial) {
        const int n = size(rng);
        std::vector<double> g(n);
        std::vector<int> labels(n);
        bool tie_heavy = trial % 2 == 0;
        for (int i = 0; i < n; ++i) {
            g[i] = tie_heavy ? grid(rng) / 10.0 : unit(rng);
            labels[i] = unit(rng) < 0.5 ? 1 : 0;
        }
        labels[0] = 1;
        labels[n - 1] = 0;
        const double ours = auroc(zip(g, labels)).value;
        const double brute = oracle::auroc_all_pairs(g, labels);
        CHECK(std::fabs(ours - brute) < 1e-12);
    }
}

TEST_CASE("auroc is a rank statistic: invariant under increasing transforms") {
    std::mt19937 rng(37);
    std::uniform_real_distribution<double> unit(-3.0, 3.0);
    for (int trial = 0; trial < 100; ++trial) {
        std::vector<double> g(50);
        std::vector<int> labels(50);
        for (std::size_t i = 0; i < g.size(); ++i) {
            g[i] = unit(rng);
            labels[i] = i % 2;
        }
        const double base = auroc(zip(g, labels)).value;
        std::vector<double> transformed(g.size());
        for (std::size_t i = 0; i < g.size(); ++i) transformed[i] = std::exp(2.0 * g[i]) + 5.0;
        CHECK(auroc(zip(transformed, labels)).value == doctest::Approx(base).epsilon(1e-12));
    }
}

TEST_CASE("complement identity and label-swap antisymmetry on tie-free data") {
    std::mt19937 rng(41);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (int trial = 0; trial < 100; ++trial) {
        std::vector<double> g(40);
        std::vector<int> labels(40);
        for (std::size_t i = 0; i < g.size(); ++i) {
            g[i] = unit(rng) + static_cast<double>(i) * 1e-9;  // distinct scores
            labels[i] = i % 2;
        }
        const auto [direct, negated] = auroc_complement_check(zip(g, labels));
        CHECK(direct.tie_pairs == 0);
        CHECK(direct.value + negated.value == doctest::Approx(1.0).epsilon(1e-12));

        std::vector<int> swapped(labels.size());
        for (std::size_t i = 0; i < labels.size(); ++i) swapped[i] = 1 - labels[i];
        CHECK(auroc(zip(g, swapped)).value == doctest::Approx(1.0 - direct.value).epsilon(1e-12));
    }
}

TEST_CASE("cohen_kappa hand cases") {
    CHECK(cohen_kappa(std::vector<int>{1, 0, 1, 0}, std::vector<int>{1, 0, 1, 0}).value ==
          doctest::Approx(1.0));
    // p_o = 0.5, p_e = 0.5
    const auto indep = cohen_kappa(std::vector<int>{1, 1, 0, 0}, std::vector<int>{1, 0, 1, 0});
    CHECK(indep.value == doctest::Approx(0.0));
    CHECK_FALSE(indep.degenerate);
    // constant rater against a balanced one: kappa 0 and flagged uninformative
    const auto constant = cohen_kappa(std::vector<int>{1, 1, 1, 1}, std::vector<int>{1, 0, 1, 0});
    CHECK(constant.value == doctest::Approx(0.0));
    CHECK(constant.degenerate);
    // total agreement on a single class: p_e = 1, pinned to 0 with flag
    const auto saturated = cohen_kappa(std::vector<int>{1, 1}, std::vector<int>{1, 1});
    CHECK(saturated.value == 0.0);
    CHECK(saturated.degenerate);
    CHECK_THROWS_AS(cohen_kappa(std::vector<int>{1}, std::vector<int>{1, 0}), ContractError);
    CHECK_THROWS_AS(cohen_kappa(std::vector<int>{}, std::vector<int>{}), ContractError);
}

TEST_CASE("cohen_kappa is symmetric and matches the definition") {
    std::mt19937 rng(43);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (int trial = 0; trial < 200; ++trial) {
        std::vector<int> a(30), b(30);
        for (std::size_t i = 0; i < a.size(); ++i) {
            a[i] = unit(rng) < 0.6 ? 1 : 0;
            b[i] = unit(rng) < 0.4 ? 1 : 0;
        }
        a[0] = 1; a[1] = 0; b[0] = 1; b[1] = 0;  // keep both non-constant
        const auto ab = cohen_kappa(a, b);
        const auto ba = cohen_kappa(b, a);
        CHECK(ab.value == doctest::Approx(ba.value).epsilon(1e-12));
        CHECK(ab.value == doctest::Approx(oracle::kappa_by_definition(a, b)).epsilon(1e-12));
    }
}

TEST_CASE("spearman hand cases") {
    CHECK(spearman(std::vector<double>{1, 2, 3}, std::vector<double>{2, 4, 6}) ==
          doctest::Approx(1.0));
    CHECK(spearman(std::vector<double>{1, 2, 3}, std::vector<double>{3, 2, 1}) ==
          doctest::Approx(-1.0));
    // tie case: ranks [1.5, 1.5, 3] vs [1, 2, 3]
    CHECK(spearman(std::vector<double>{1, 1, 2}, std::vector<double>{1, 2, 3}) ==
          doctest::Approx(std::sqrt(3.0) / 2.0).epsilon(1e-9));
    CHECK_THROWS_AS(spearman(std::vector<double>{1, 1}, std::vector<double>{1, 2}),
                    UndefinedStatError);
    CHECK_THROWS_AS(spearman(std::vector<double>{1}, std::vector<double>{1}), ContractError);
}

TEST_CASE("spearman matches the rank-definition oracle and transform invariance") {
    std::mt19937 rng(47);
    std::uniform_int_distribution<int> grid(0, 6);
    for (int trial = 0; trial < 200; ++trial) {
        std::vector<double> x(25), y(25);
        for (std::size_t i = 0; i < x.size(); ++i) {
            x[i] = grid(rng);
            y[i] = grid(rng);
        }
        x[0] = 10; y[0] = 10;  // guarantee non-constant
        const double ours = spearman(x, y);
        CHECK(ours == doctest::Approx(oracle::spearman_by_definition(x, y)).epsilon(1e-12));

        std::vector<double> tx(x.size());
        for (std::size_t i = 0; i < x.size(); ++i) tx[i] = std::exp(x[i] / 3.0);
        CHECK(spearman(tx, y) == doctest::Approx(ours).epsilon(1e-12));
    }
}

TEST_CASE("spearman permutation p-value is small for a perfect monotone pair") {
    std::vector<double> x(20), y(20);
    for (std::size_t i = 0; i < x.size(); ++i) {
        x[i] = static_cast<double>(i);
        y[i] = static_cast<double>(i * i);
    }
    CHECK(spearman_permutation_pvalue(x, y, 200, 3) < 0.05);
}

TEST_CASE("bootstrap interval brackets the point estimate") {
    std::mt19937 rng(59);
    std::normal_distribution<double> correct(0.0, 1.0), incorrect(1.2, 1.0);
    std::vector<ScoredLabel> scores;
    for (int i = 0; i < 200; ++i) {
        const bool pos = i % 2 == 0;
        scores.push_back({pos ? correct(rng) : incorrect(rng), pos ? 1 : 0});
    }
    const double point = auroc(scores).value;
    const auto ci = auroc_bootstrap_ci(scores, 300, 0.05, 1);
    CHECK(ci.lower <= point);
    CHECK(ci.upper >= point);
    CHECK(ci.lower < ci.upper);
    CHECK(ci.resamples_used > 250);
    // deterministic given the seed
    const auto again = auroc_bootstrap_ci(scores, 300, 0.05, 1);
    CHECK(again.lower == ci.lower);
    CHECK(again.upper == ci.upper);
    CHECK_THROWS_AS(auroc_bootstrap_ci(scores, 100, 0.0, 1), ContractError);
    CHECK_THROWS_AS(auroc_bootstrap_ci(zip({0.1, 0.2}, {1, 1}), 100, 0.05, 1),
                    UndefinedStatError);
}

TEST_CASE("confusion_rates condition on the estimated label") {
    const std::vector<int> h{1, 1, 0, 0};
    const auto identical = confusion_rates(h, h);
    CHECK(identical.tpr == 1.0);
    CHECK(identical.tnr == 1.0);

    const auto half = confusion_rates(std::vector<int>{1, 1, 0, 0}, std::vector<int>{1, 0, 1, 0});
    CHECK(half.tpr == doctest::Approx(0.5));
    CHECK(half.tnr == doctest::Approx(0.5));
    CHECK(half.fpr == doctest::Approx(0.5));
    CHECK(half.fnr == doctest::Approx(0.5));

    const auto inverted = confusion_rates(std::vector<int>{1, 0}, std::vector<int>{0, 1});
    CHECK(inverted.tpr == 0.0);
    CHECK(inverted.tnr == 0.0);

    CHECK_THROWS_AS(confusion_rates(std::vector<int>{1, 0}, std::vector<int>{1, 1}),
                    UndefinedStatError);
}

TEST_CASE("confusion rate complements always hold") {
    std::mt19937 rng(53);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (int trial = 0; trial < 100; ++trial) {
        std::vector<int> h(40), h_hat(40);
        for (std::size_t i = 0; i < h.size(); ++i) {
            h[i] = unit(rng) < 0.5 ? 1 : 0;
            h_hat[i] = unit(rng) < 0.5 ? 1 : 0;
        }
        h_hat[0] = 1;
        h_hat[1] = 0;
        const auto rates = confusion_rates(h, h_hat);
        CHECK(rates.tpr + rates.fpr == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(rates.tnr + rates.fnr == doctest::Approx(1.0).epsilon(1e-12));
    }
}
