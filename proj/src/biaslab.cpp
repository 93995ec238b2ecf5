#include "uqeval/biaslab.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "uqeval/errors.hpp"
#include "uqeval/rng.hpp"

namespace uqeval {

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

// Acklam's rational approximation, |relative error| < 1.2e-9.
double normal_quantile(double p) {
    if (p <= 0.0 || p >= 1.0) throw ContractError("normal_quantile: p must be in (0,1)");
    static const double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                               -2.759285104469687e+02, 1.383577518672690e+02,
                               -3.066479806614716e+01, 2.506628277459239e+00};
    static const double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                               -1.556989798598866e+02, 6.680131188771972e+01,
                               -1.328068155288572e+01};
    static const double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                               -2.400758277161838e+00, -2.549732539343734e+00,
                               4.374664141464968e+00,  2.938163982698783e+00};
    static const double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                               2.445134137142996e+00, 3.754408661907416e+00};
    const double p_low = 0.02425;
    double q, r;
    if (p < p_low) {
        q = std::sqrt(-2.0 * std::log(p));
        return (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
               ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    }
    if (p <= 1.0 - p_low) {
        q = p - 0.5;
        r = q * q;
        return (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
               (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
    }
    q = std::sqrt(-2.0 * std::log(1.0 - p));
    return -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
           ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
}

ScoreModel ScoreModel::from_true_auroc(double target_auroc) {
    if (target_auroc <= 0.0 || target_auroc >= 1.0) {
        throw ContractError("target true AUROC must be in (0,1)");
    }
    ScoreModel m;
    m.correct_mean = 0.0;
    m.incorrect_mean = std::sqrt(2.0) * normal_quantile(target_auroc);
    m.correct_stddev = 1.0;
    m.incorrect_stddev = 1.0;
    return m;
}

double ScoreModel::true_auroc() const {
    const double gap = incorrect_mean - correct_mean;
    const double spread = std::sqrt(correct_stddev * correct_stddev +
                                    incorrect_stddev * incorrect_stddev);
    return normal_cdf(gap / spread);
}

FlipCalibration calibrate_flips(double tpr, double tnr, double prevalence) {
    if (prevalence <= 0.0 || prevalence >= 1.0) {
        throw CalibrationError("prevalence must be in (0,1)");
    }
    const double informativeness = tpr + tnr - 1.0;  // = TPR*TNR - FPR*FNR
    if (informativeness <= 0.0) {
        throw CalibrationError("rate targets are uninformative: tpr + tnr must exceed 1");
    }
    FlipCalibration cal;
    cal.keep_correct = tpr * (tnr - (1.0 - prevalence)) / (prevalence * informativeness);
    cal.keep_incorrect = tnr * (tpr - prevalence) / ((1.0 - prevalence) * informativeness);
    const double slack = 1e-9;  // boundary targets may land epsilon outside [0,1]
    if (cal.keep_correct < -slack || cal.keep_correct > 1.0 + slack ||
        cal.keep_incorrect < -slack || cal.keep_incorrect > 1.0 + slack) {
        std::ostringstream msg;
        msg << "rate targets infeasible at prevalence " << prevalence
            << ": Bayes inversion gives P(h_hat=1|h=1)=" << cal.keep_correct
            << ", P(h_hat=0|h=0)=" << cal.keep_incorrect;
        throw CalibrationError(msg.str());
    }
    cal.keep_correct = std::clamp(cal.keep_correct, 0.0, 1.0);
    cal.keep_incorrect = std::clamp(cal.keep_incorrect, 0.0, 1.0);
    return cal;
}

double predicted_auroc_independent(double true_auroc, const ConfusionRates& r) {
    return 0.5 * r.fpr * r.tnr + 0.5 * r.tpr * r.fnr + true_auroc * r.tpr * r.tnr +
           (1.0 - true_auroc) * r.fpr * r.fnr;
}

namespace {

inline double logit(double p) { return std::log(p / (1.0 - p)); }

inline double sigmoid(double z) {
    if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
    const double e = std::exp(z);
    return e / (1.0 + e);
}

/// Flip probability as a logistic tilt of the base rate; degenerate base
/// rates (0 or 1) stay fixed for every score.
inline double tilted_flip(double base, double shift) {
    if (base <= 0.0 || base >= 1.0) return base;
    return sigmoid(logit(base) + shift);
}

SimDraw simulate_core(const SimulationConfig& config, double rho) {
    if (config.n_items == 0) throw ContractError("simulate: n_items must be positive");
    const FlipCalibration cal =
        calibrate_flips(config.target_tpr, config.target_tnr, config.prevalence);
    const double flip_correct = 1.0 - cal.keep_correct;      // P(h_hat=0 | h=1) at rho=0
    const double flip_incorrect = 1.0 - cal.keep_incorrect;  // P(h_hat=1 | h=0) at rho=0
    const double slope = config.slope_scale * rho;

    SimDraw draw;
    draw.g.reserve(config.n_items);
    draw.h.reserve(config.n_items);
    draw.h_hat.reserve(config.n_items);
    Rng rng(config.seed);
    for (std::size_t i = 0; i < config.n_items; ++i) {
        const bool correct = rng.bernoulli(config.prevalence);
        const double mean = correct ? config.scores.correct_mean : config.scores.incorrect_mean;
        const double sd = correct ? config.scores.correct_stddev : config.scores.incorrect_stddev;
        const double g = rng.normal(mean, sd);
        const double standardized = (g - mean) / sd;

        int h_hat;
        if (correct) {
            // rho < 0: unusually uncertain correct answers get marked wrong.
            const double p_flip = tilted_flip(flip_correct, -slope * standardized);
            h_hat = rng.bernoulli(p_flip) ? 0 : 1;
        } else {
            // rho < 0: confidently wrong answers get marked correct.
            const double p_flip = tilted_flip(flip_incorrect, slope * standardized);
            h_hat = rng.bernoulli(p_flip) ? 1 : 0;
        }
        draw.g.push_back(g);
        draw.h.push_back(correct ? 1 : 0);
        draw.h_hat.push_back(h_hat);
    }
    return draw;
}

}  // namespace

SimDraw simulate_independent(const SimulationConfig& config) { return simulate_core(config, 0.0); }

SimDraw simulate_correlated(const SimulationConfig& config) {
    return simulate_core(config, config.rho);
}

ConfoundedDraw simulate_confounded(const ConfoundedConfig& config) {
    if (config.n_items == 0) throw ContractError("simulate: n_items must be positive");
    if (config.strength < 0.0) throw ContractError("confounder strength must be >= 0");
    const FlipCalibration cal =
        calibrate_flips(config.target_tpr, config.target_tnr, config.prevalence);
    const double flip_correct = 1.0 - cal.keep_correct;
    const double flip_incorrect = 1.0 - cal.keep_incorrect;

    const double gap_a = std::sqrt(2.0) * normal_quantile(config.true_auroc_a);
    const double gap_b = std::sqrt(2.0) * normal_quantile(config.true_auroc_b);
    const double lambda = config.strength * config.z_loading;
    const double noise_scale = 1.0 / std::sqrt(1.0 + lambda * lambda);
    const double error_shift = config.strength * config.error_slope * config.error_sign;

    ConfoundedDraw draw;
    draw.z.reserve(config.n_items);
    draw.g_a.reserve(config.n_items);
    draw.g_b.reserve(config.n_items);
    draw.h.reserve(config.n_items);
    draw.h_hat.reserve(config.n_items);
    Rng rng(config.seed);
    for (std::size_t i = 0; i < config.n_items; ++i) {
        const double z = rng.normal();
        const bool correct = rng.bernoulli(config.prevalence);
        // Method A: informative, z-independent.
        const double g_a = (correct ? 0.0 : gap_a) + rng.normal();
        // Method B: weaker, uncertainty falls as z grows; total noise
        // variance stays 1 so B's true AUROC is strength-invariant.
        const double g_b = (correct ? 0.0 : gap_b) + (-lambda * z + rng.normal()) * noise_scale;

        int h_hat;
        if (correct) {
            // error_sign > 0: low-z correct answers are more likely marked wrong.
            h_hat = rng.bernoulli(tilted_flip(flip_correct, -error_shift * z)) ? 0 : 1;
        } else {
            // error_sign > 0: high-z wrong answers are more likely marked correct.
            h_hat = rng.bernoulli(tilted_flip(flip_incorrect, error_shift * z)) ? 1 : 0;
        }
        draw.z.push_back(z);
        draw.g_a.push_back(g_a);
        draw.g_b.push_back(g_b);
        draw.h.push_back(correct ? 1 : 0);
        draw.h_hat.push_back(h_hat);
    }
    return draw;
}

namespace {

double auroc_of(const std::vector<double>& g, const std::vector<int>& labels) {
    std::vector<ScoredLabel> scored(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) scored[i] = {g[i], labels[i]};
    return auroc(scored).value;
}

}  // namespace

std::vector<ClosedFormResult> verify_closed_form(std::span<const ClosedFormPoint> grid,
                                                 std::size_t n_items, double tolerance,
                                                 std::uint64_t seed) {
    std::vector<ClosedFormResult> results;
    results.reserve(grid.size());
    std::uint64_t point_index = 0;
    for (const auto& point : grid) {
        SimulationConfig config;
        config.n_items = n_items;
        config.scores = ScoreModel::from_true_auroc(point.true_auroc);
        config.target_tpr = point.tpr;
        config.target_tnr = point.tnr;
        config.seed = seed + point_index++;
        const SimDraw draw = simulate_independent(config);

        ClosedFormResult res;
        res.point = point;
        res.predicted = predicted_auroc_independent(
            point.true_auroc, ConfusionRates::from_tpr_tnr(point.tpr, point.tnr));
        res.monte_carlo = auroc_of(draw.g, draw.h_hat);
        res.abs_error = std::fabs(res.monte_carlo - res.predicted);
        res.pass = res.abs_error <= tolerance;
        results.push_back(res);
    }
    return results;
}

std::vector<ClosedFormPoint> default_verification_grid() {
    std::vector<ClosedFormPoint> grid;
    for (double a : {0.6, 0.75, 0.9}) {
        for (double tpr : {0.7, 0.8, 0.9}) {
            for (double tnr : {0.7, 0.8, 0.9}) {
                grid.push_back({a, tpr, tnr});
            }
        }
    }
    return grid;
}

RankingTrial run_confounded_trial(const ConfoundedConfig& config, std::uint64_t seed) {
    ConfoundedConfig c = config;
    c.seed = seed;
    const ConfoundedDraw draw = simulate_confounded(c);
    RankingTrial trial;
    trial.estimated_a = auroc_of(draw.g_a, draw.h_hat);
    trial.estimated_b = auroc_of(draw.g_b, draw.h_hat);
    trial.empirical_true_a = auroc_of(draw.g_a, draw.h);
    trial.empirical_true_b = auroc_of(draw.g_b, draw.h);
    return trial;
}

ConfoundedConfig ConfoundedConfig::from_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open scenario file: " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::parse_error& e) {
        throw ConfigError("bad scenario file " + path + ": " + e.what());
    }
    ConfoundedConfig c;
    c.n_items = j.value("n_items", c.n_items);
    c.prevalence = j.value("prevalence", c.prevalence);
    c.true_auroc_a = j.value("true_auroc_a", c.true_auroc_a);
    c.true_auroc_b = j.value("true_auroc_b", c.true_auroc_b);
    c.target_tpr = j.value("target_tpr", c.target_tpr);
    c.target_tnr = j.value("target_tnr", c.target_tnr);
    c.z_loading = j.value("z_loading", c.z_loading);
    c.error_slope = j.value("error_slope", c.error_slope);
    c.error_sign = j.value("error_sign", c.error_sign);
    c.strength = j.value("strength", c.strength);
    c.seed = j.value("seed", c.seed);
    return c;
}

std::string ConfoundedConfig::to_json() const {
    nlohmann::ordered_json j;
    j["n_items"] = n_items;
    j["prevalence"] = prevalence;
    j["true_auroc_a"] = true_auroc_a;
    j["true_auroc_b"] = true_auroc_b;
    j["target_tpr"] = target_tpr;
    j["target_tnr"] = target_tnr;
    j["z_loading"] = z_loading;
    j["error_slope"] = error_slope;
    j["error_sign"] = error_sign;
    j["strength"] = strength;
    j["seed"] = seed;
    return j.dump(2);
}

}  // namespace uqeval
