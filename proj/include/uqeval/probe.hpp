#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "uqeval/uq.hpp"

namespace uqeval {

/// Row-major feature matrix.
struct FeatureMatrix {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<double> data;  // rows * cols

    double at(std::size_t r, std::size_t c) const { return data[r * cols + c]; }
};

struct ProbeTrainingConfig {
    double gradient_tolerance = 1e-4;  // stop when ||grad||_inf < this
    std::size_t max_iterations = 10000;
    std::size_t lbfgs_memory = 10;
};

struct ProbeModel {
    std::vector<double> weights;  // dimension = embedding dimension
    double bias = 0.0;
    // training metadata
    std::string label_source;
    std::size_t iterations = 0;
    double final_gradient_norm = 0.0;
    bool converged = false;

    std::string to_json() const;
    static ProbeModel from_json(const std::string& text);
};

/// Mean negative log-likelihood of the logistic model and its gradient
/// (weights first, bias last). Exposed for finite-difference checks.
double logistic_loss(const FeatureMatrix& features, std::span<const int> labels,
                     std::span<const double> params, std::span<double> gradient);

/// Trains an unregularized logistic regression with an L-BFGS optimizer.
/// Stops when the gradient infinity-norm drops below the tolerance or the
/// iteration cap is hit. Throws TrainingError on single-class labels or
/// non-finite features.
ProbeModel train_probe(const FeatureMatrix& features, std::span<const int> labels,
                       const ProbeTrainingConfig& config = {},
                       const std::string& label_source = "");

/// value = 1 - sigmoid(w.e + b): predicted probability of incorrectness.
UncertaintyScore probe_uncertainty(const ProbeModel& model, std::span<const double> embedding);

/// Deterministic hash-based 80/20 split on record id; true = training row.
bool in_probe_train_split(const std::string& record_id, std::uint64_t seed);

}  // namespace uqeval
