#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "uqeval/stats.hpp"

namespace uqeval {

double normal_cdf(double x);
double normal_quantile(double p);

/// Class-conditional Gaussian score model. Correct-class scores sit lower,
/// so the true AUROC exceeds 0.5 whenever the gap is positive.
struct ScoreModel {
    double correct_mean = 0.0;
    double correct_stddev = 1.0;
    double incorrect_mean = 1.0;
    double incorrect_stddev = 1.0;

    /// Unit-variance Gaussians whose mean gap realizes the target AUROC
    /// through the normal link: AUROC = Phi(gap / sqrt(2)).
    static ScoreModel from_true_auroc(double target_auroc);
    double true_auroc() const;
};

/// Generative parameters for the bias laboratory.
struct SimulationConfig {
    std::size_t n_items = 100000;
    double prevalence = 0.5;  // P(h = 1), in (0,1)
    ScoreModel scores = ScoreModel::from_true_auroc(0.8);
    double target_tpr = 0.9;  // P(h=1 | h_hat=1)
    double target_tnr = 0.9;  // P(h=0 | h_hat=0)
    /// Error-score correlation strength in [-1,1]. Negative: confidently
    /// wrong answers tend to be marked correct (over-estimation regime).
    double rho = 0.0;
    /// Logit shift per standardized score unit at |rho| = 1.
    double slope_scale = 4.0;
    std::uint64_t seed = 0;
};

/// One simulated dataset: uncertainty scores, true and estimated labels.
struct SimDraw {
    std::vector<double> g;
    std::vector<int> h;
    std::vector<int> h_hat;
};

/// Per-class label generation probabilities, calibrated so the
/// estimated-label-conditioned rates converge to the configured targets.
struct FlipCalibration {
    double keep_correct = 1.0;    // P(h_hat=1 | h=1)
    double keep_incorrect = 1.0;  // P(h_hat=0 | h=0)
};

/// Bayes inversion of (tpr, tnr, prevalence) into class-conditional keep
/// probabilities. Throws CalibrationError when no solution lies in [0,1].
FlipCalibration calibrate_flips(double tpr, double tnr, double prevalence);

/// Closed-form estimated AUROC under errors independent of the scores:
/// 0.5*FPR*TNR + 0.5*TPR*FNR + A*TPR*TNR + (1-A)*FPR*FNR.
double predicted_auroc_independent(double true_auroc, const ConfusionRates& rates);

/// Case 1 generator: label errors independent of the score given the class.
SimDraw simulate_independent(const SimulationConfig& config);

/// Case 2 generator: the flip probability is a logistic function of the
/// standardized score with slope slope_scale * rho.
SimDraw simulate_correlated(const SimulationConfig& config);

/// Confounded two-method scenario. Method A is informative and
/// z-independent; method B is weaker and z-loaded; label errors are
/// z-loaded with a configurable sign.
struct ConfoundedConfig {
    std::size_t n_items = 50000;
    double prevalence = 0.5;
    double true_auroc_a = 0.80;
    double true_auroc_b = 0.75;
    double target_tpr = 0.9;
    double target_tnr = 0.9;
    /// z weight inside B's unit-variance noise at strength 1. B's
    /// uncertainty falls as z grows.
    double z_loading = 0.8;
    /// Logit shift per unit z in the label errors at strength 1.
    double error_slope = 2.5;
    /// +1: high-z items are rewarded as correct; -1 mirrors.
    double error_sign = 1.0;
    double strength = 1.0;
    std::uint64_t seed = 0;

    static ConfoundedConfig from_json_file(const std::string& path);
    std::string to_json() const;
};

struct ConfoundedDraw {
    std::vector<double> z;
    std::vector<double> g_a;
    std::vector<double> g_b;
    std::vector<int> h;
    std::vector<int> h_hat;
};

ConfoundedDraw simulate_confounded(const ConfoundedConfig& config);

/// Closed-form verification grid.
struct ClosedFormPoint {
    double true_auroc = 0.8;
    double tpr = 0.9;
    double tnr = 0.9;
};

struct ClosedFormResult {
    ClosedFormPoint point;
    double predicted = 0.0;
    double monte_carlo = 0.0;
    double abs_error = 0.0;
    bool pass = false;
};

/// Monte Carlo check of the closed form on every grid point.
std::vector<ClosedFormResult> verify_closed_form(std::span<const ClosedFormPoint> grid,
                                                 std::size_t n_items, double tolerance,
                                                 std::uint64_t seed);

std::vector<ClosedFormPoint> default_verification_grid();

/// Summary of one confounded trial.
struct RankingTrial {
    double estimated_a = 0.0;
    double estimated_b = 0.0;
    double empirical_true_a = 0.0;
    double empirical_true_b = 0.0;
};

RankingTrial run_confounded_trial(const ConfoundedConfig& config, std::uint64_t seed);

}  // namespace uqeval
