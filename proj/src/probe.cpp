#include "uqeval/probe.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <numeric>

#include <json.hpp>

#include "uqeval/errors.hpp"
#include "uqeval/hash.hpp"

namespace uqeval {

namespace {

inline double sigmoid(double z) {
    if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
    const double e = std::exp(z);
    return e / (1.0 + e);
}

/// log(1 + exp(z)) without overflow.
inline double log1pexp(double z) {
    if (z > 0.0) return z + std::log1p(std::exp(-z));
    return std::log1p(std::exp(z));
}

double inf_norm(std::span<const double> v) {
    double m = 0.0;
    for (double x : v) m = std::max(m, std::fabs(x));
    return m;
}

double dot(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

}  // namespace

double logistic_loss(const FeatureMatrix& features, std::span<const int> labels,
                     std::span<const double> params, std::span<double> gradient) {
    const std::size_t n = features.rows;
    const std::size_t d = features.cols;
    std::fill(gradient.begin(), gradient.end(), 0.0);
    double loss = 0.0;
    for (std::size_t r = 0; r < n; ++r) {
        double z = params[d];  // bias
        for (std::size_t c = 0; c < d; ++c) z += params[c] * features.at(r, c);
        const double y = static_cast<double>(labels[r]);
        loss += log1pexp(z) - y * z;
        const double residual = sigmoid(z) - y;
        for (std::size_t c = 0; c < d; ++c) gradient[c] += residual * features.at(r, c);
        gradient[d] += residual;
    }
    const double inv_n = 1.0 / static_cast<double>(n);
    loss *= inv_n;
    for (double& g : gradient) g *= inv_n;
    return loss;
}

ProbeModel train_probe(const FeatureMatrix& features, std::span<const int> labels,
                       const ProbeTrainingConfig& config, const std::string& label_source) {
    const std::size_t n = features.rows;
    const std::size_t d = features.cols;
    if (n != labels.size() || n < 2) {
        throw TrainingError("train_probe: need matching features/labels with at least 2 rows");
    }
    const auto positives = static_cast<std::size_t>(std::count(labels.begin(), labels.end(), 1));
    if (positives == 0 || positives == n) {
        throw TrainingError("train_probe: labels are single-class, nothing to separate");
    }
    for (double v : features.data) {
        if (!std::isfinite(v)) throw TrainingError("train_probe: non-finite feature value");
    }

    const std::size_t dim = d + 1;  // weights + bias
    std::vector<double> params(dim, 0.0), grad(dim, 0.0);
    double loss = logistic_loss(features, labels, params, grad);

    // L-BFGS with two-loop recursion and Armijo backtracking.
    std::deque<std::vector<double>> s_hist, y_hist;
    std::deque<double> rho_hist;
    std::vector<double> direction(dim), new_params(dim), new_grad(dim), alpha;

    ProbeModel model;
    std::size_t iter = 0;
    for (; iter < config.max_iterations; ++iter) {
        if (inf_norm(grad) < config.gradient_tolerance) break;

        // direction = -H * grad via two-loop recursion
        direction.assign(grad.begin(), grad.end());
        alpha.assign(s_hist.size(), 0.0);
        for (std::size_t k = s_hist.size(); k-- > 0;) {
            alpha[k] = rho_hist[k] * dot(s_hist[k], direction);
            for (std::size_t i = 0; i < dim; ++i) direction[i] -= alpha[k] * y_hist[k][i];
        }
        if (!s_hist.empty()) {
            const auto& s = s_hist.back();
            const auto& y = y_hist.back();
            const double gamma = dot(s, y) / dot(y, y);
            for (double& v : direction) v *= gamma;
        }
        for (std::size_t k = 0; k < s_hist.size(); ++k) {
            const double beta = rho_hist[k] * dot(y_hist[k], direction);
            for (std::size_t i = 0; i < dim; ++i) direction[i] += (alpha[k] - beta) * s_hist[k][i];
        }
        for (double& v : direction) v = -v;

        double descent = dot(grad, direction);
        if (descent >= 0.0) {  // fall back to steepest descent
            for (std::size_t i = 0; i < dim; ++i) direction[i] = -grad[i];
            descent = -dot(grad, grad);
        }

        // Backtracking line search, Armijo c1 = 1e-4.
        double step = 1.0;
        double new_loss = loss;
        bool accepted = false;
        for (int ls = 0; ls < 60; ++ls) {
            for (std::size_t i = 0; i < dim; ++i) new_params[i] = params[i] + step * direction[i];
            new_loss = logistic_loss(features, labels, new_params, new_grad);
            if (std::isfinite(new_loss) && new_loss <= loss + 1e-4 * step * descent) {
                accepted = true;
                break;
            }
            step *= 0.5;
        }
        if (!accepted) break;  // no progress possible at machine precision

        std::vector<double> s(dim), y(dim);
        for (std::size_t i = 0; i < dim; ++i) {
            s[i] = new_params[i] - params[i];
            y[i] = new_grad[i] - grad[i];
        }
        const double sy = dot(s, y);
        if (sy > 1e-12) {  // keep the inverse-Hessian approximation positive definite
            s_hist.push_back(std::move(s));
            y_hist.push_back(std::move(y));
            rho_hist.push_back(1.0 / sy);
            if (s_hist.size() > config.lbfgs_memory) {
                s_hist.pop_front();
                y_hist.pop_front();
                rho_hist.pop_front();
            }
        }
        params.swap(new_params);
        grad.swap(new_grad);
        loss = new_loss;
    }

    model.weights.assign(params.begin(), params.begin() + static_cast<std::ptrdiff_t>(d));
    model.bias = params[d];
    model.label_source = label_source;
    model.iterations = iter;
    model.final_gradient_norm = inf_norm(grad);
    model.converged = model.final_gradient_norm < config.gradient_tolerance;
    return model;
}

UncertaintyScore probe_uncertainty(const ProbeModel& model, std::span<const double> embedding) {
    if (embedding.size() != model.weights.size()) {
        throw ContractError("probe_uncertainty: embedding dimension " +
                            std::to_string(embedding.size()) + " does not match model dimension " +
                            std::to_string(model.weights.size()));
    }
    const double z = dot(model.weights, embedding) + model.bias;
    return {"probe", 1.0 - sigmoid(z)};
}

bool in_probe_train_split(const std::string& record_id, std::uint64_t seed) {
    const std::uint64_t h = fnv1a64(record_id + ":" + std::to_string(seed));
    return h % 100 < 80;
}

std::string ProbeModel::to_json() const {
    nlohmann::ordered_json j;
    j["weights"] = weights;
    j["bias"] = bias;
    j["metadata"] = {{"label_source", label_source},
                     {"iterations", iterations},
                     {"final_gradient_norm", final_gradient_norm},
                     {"converged", converged}};
    return j.dump(2);
}

ProbeModel ProbeModel::from_json(const std::string& text) {
    const auto j = nlohmann::json::parse(text);
    ProbeModel m;
    m.weights = j.at("weights").get<std::vector<double>>();
    m.bias = j.at("bias").get<double>();
    const auto& meta = j.at("metadata");
    m.label_source = meta.at("label_source").get<std::string>();
    m.iterations = meta.at("iterations").get<std::size_t>();
    m.final_gradient_norm = meta.at("final_gradient_norm").get<double>();
    m.converged = meta.at("converged").get<bool>();
    return m;
}

}  // namespace uqeval
