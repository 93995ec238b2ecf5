#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "uqeval/errors.hpp"
#include "uqeval/probe.hpp"
#include "uqeval/stats.hpp"

using namespace uqeval;

namespace {

FeatureMatrix matrix_from(const std::vector<std::vector<double>>& rows) {
    FeatureMatrix m;
    m.rows = rows.size();
    m.cols = rows.empty() ? 0 : rows[0].size();
    for (const auto& r : rows) m.data.insert(m.data.end(), r.begin(), r.end());
    return m;
}

}  // namespace

TEST_CASE("separable 1-D data trains to a perfect ranking") {
    std::vector<std::vector<double>> rows;
    std::vector<int> labels;
    for (int i = 0; i < 20; ++i) {
        const bool positive = i % 2 == 0;
        rows.push_back({positive ? 1.0 + 0.05 * i : -1.0 - 0.05 * i});
        labels.push_back(positive ? 1 : 0);
    }
    const auto features = matrix_from(rows);
    const auto model = train_probe(features, labels, {}, "unit-test");

    CHECK(model.converged);
    CHECK(model.final_gradient_norm < 1e-4);
    CHECK(model.iterations <= 10000);
    CHECK(model.label_source == "unit-test");

    std::vector<ScoredLabel> scored;
    for (std::size_t i = 0; i < rows.size(); ++i) {
        scored.push_back({probe_uncertainty(model, rows[i]).value, labels[i]});
    }
    CHECK(auroc(scored).value == doctest::Approx(1.0));
}

TEST_CASE("single-class labels and non-finite features are rejected") {
    const auto features = matrix_from({{1.0}, {2.0}});
    CHECK_THROWS_AS(train_probe(features, std::vector<int>{1, 1}), TrainingError);
    CHECK_THROWS_AS(train_probe(features, std::vector<int>{0, 0}), TrainingError);
    CHECK_THROWS_AS(train_probe(features, std::vector<int>{1}), TrainingError);
    auto bad = matrix_from({{1.0}, {std::numeric_limits<double>::quiet_NaN()}});
    CHECK_THROWS_AS(train_probe(bad, std::vector<int>{1, 0}), TrainingError);
}

TEST_CASE("analytic gradient matches central finite differences") {
    std::mt19937 rng(71);
    std::normal_distribution<double> normal(0.0, 1.0);
    std::uniform_real_distribution<double> unit(0.0, 1.0);

    const std::size_t n = 15, d = 3;
    std::vector<std::vector<double>> rows(n, std::vector<double>(d));
    std::vector<int> labels(n);
    for (std::size_t r = 0; r < n; ++r) {
        for (std::size_t c = 0; c < d; ++c) rows[r][c] = normal(rng);
        labels[r] = unit(rng) < 0.5 ? 1 : 0;
    }
    labels[0] = 1;
    labels[1] = 0;
    const auto features = matrix_from(rows);

    auto loss_at = [&](std::span<const double> params) {
        std::vector<double> scratch(params.size());
        return logistic_loss(features, labels, params, scratch);
    };

    for (int point = 0; point < 20; ++point) {
        std::vector<double> params(d + 1);
        for (auto& p : params) p = 2.0 * unit(rng) - 1.0;
        std::vector<double> grad(params.size());
        logistic_loss(features, labels, params, grad);
        for (std::size_t i = 0; i < params.size(); ++i) {
            const double fd = oracle::central_difference(loss_at, params, i, 1e-5);
            const double rel = std::fabs(grad[i] - fd) /
                               std::max({std::fabs(grad[i]), std::fabs(fd), 1e-8});
            CHECK(rel < 1e-5);
        }
    }
}

TEST_CASE("probe_uncertainty maps logits to incorrectness probability") {
    ProbeModel model;
    model.weights = {1.0};
    model.bias = 0.0;
    CHECK(probe_uncertainty(model, std::vector<double>{0.0}).value == doctest::Approx(0.5));
    CHECK(probe_uncertainty(model, std::vector<double>{std::log(3.0)}).value ==
          doctest::Approx(0.25));
    CHECK(probe_uncertainty(model, std::vector<double>{40.0}).value == doctest::Approx(0.0));
    CHECK_THROWS_AS(probe_uncertainty(model, std::vector<double>{1.0, 2.0}), ContractError);

    // antitone in the logit
    double previous = 1.0;
    for (double logit = -4.0; logit <= 4.0; logit += 0.5) {
        const double value = probe_uncertainty(model, std::vector<double>{logit}).value;
        CHECK(value < previous);
        previous = value;
    }
}

TEST_CASE("stopping contract on a non-separable problem") {
    std::mt19937 rng(73);
    std::normal_distribution<double> normal(0.0, 1.0);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::vector<std::vector<double>> rows;
    std::vector<int> labels;
    for (int i = 0; i < 200; ++i) {
        const double x = normal(rng);
        rows.push_back({x, normal(rng)});
        // noisy labels: logistic in x
        labels.push_back(unit(rng) < 1.0 / (1.0 + std::exp(-1.5 * x)) ? 1 : 0);
    }
    const auto model = train_probe(matrix_from(rows), labels);
    CHECK(model.converged);
    CHECK(model.final_gradient_norm < 1e-4);

    // gradient at the reported optimum really is below tolerance
    const auto features = matrix_from(rows);
    std::vector<double> params = model.weights;
    params.push_back(model.bias);
    std::vector<double> grad(params.size());
    logistic_loss(features, labels, params, grad);
    for (double g : grad) CHECK(std::fabs(g) < 1e-4);
}

TEST_CASE("probe model JSON round-trip") {
    ProbeModel model;
    model.weights = {0.25, -1.5, 3.0};
    model.bias = -0.125;
    model.label_source = "rougeL_recall@0.5";
    model.iterations = 42;
    model.final_gradient_norm = 3.2e-5;
    model.converged = true;
    const auto restored = ProbeModel::from_json(model.to_json());
    CHECK(restored.weights == model.weights);
    CHECK(restored.bias == model.bias);
    CHECK(restored.label_source == model.label_source);
    CHECK(restored.iterations == model.iterations);
    CHECK(restored.final_gradient_norm == model.final_gradient_norm);
    CHECK(restored.converged == model.converged);
}

TEST_CASE("hash split is deterministic and close to 80/20") {
    std::size_t train = 0;
    const std::size_t total = 5000;
    for (std::size_t i = 0; i < total; ++i) {
        const std::string id = "record-" + std::to_string(i);
        const bool first = in_probe_train_split(id, 7);
        CHECK(first == in_probe_train_split(id, 7));
        if (first) ++train;
    }
    const double fraction = static_cast<double>(train) / static_cast<double>(total);
    CHECK(fraction > 0.77);
    CHECK(fraction < 0.83);

    // different seeds move records across the split
    std::size_t moved = 0;
    for (std::size_t i = 0; i < total; ++i) {
        const std::string id = "record-" + std::to_string(i);
        if (in_probe_train_split(id, 7) != in_probe_train_split(id, 8)) ++moved;
    }
    CHECK(moved > 0);
}
