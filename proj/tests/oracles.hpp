#pragma once

// Independent brute-force oracles. Everything here recomputes statistics
// straight from their definitions and must stay independent of the library
// implementations it is used to check.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <numeric>
#include <span>
#include <string>
#include <vector>

namespace oracle {

/// AUROC by full cross-class pair enumeration, ties worth 1/2.
inline double auroc_all_pairs(std::span<const double> uncertainty, std::span<const int> labels) {
    double wins = 0.0;
    std::size_t pairs = 0;
    for (std::size_t i = 0; i < labels.size(); ++i) {
        if (labels[i] != 1) continue;
        for (std::size_t j = 0; j < labels.size(); ++j) {
            if (labels[j] != 0) continue;
            ++pairs;
            if (uncertainty[i] < uncertainty[j]) wins += 1.0;
            else if (uncertainty[i] == uncertainty[j]) wins += 0.5;
        }
    }
    return wins / static_cast<double>(pairs);
}

/// LCS by exhaustive subsequence enumeration over the shorter list.
/// Exponential; intended for lengths <= 8.
inline std::size_t lcs_exhaustive(std::span<const std::string> a, std::span<const std::string> b) {
    if (a.size() > b.size()) std::swap(a, b);
    std::size_t best = 0;
    const std::size_t n = a.size();
    for (std::size_t mask = 0; mask < (std::size_t{1} << n); ++mask) {
        std::vector<std::string> candidate;
        for (std::size_t i = 0; i < n; ++i) {
            if (mask & (std::size_t{1} << i)) candidate.push_back(a[i]);
        }
        if (candidate.size() <= best) continue;
        // is candidate a subsequence of b?
        std::size_t pos = 0;
        bool ok = true;
        for (const auto& tok : candidate) {
            while (pos < b.size() && b[pos] != tok) ++pos;
            if (pos == b.size()) {
                ok = false;
                break;
            }
            ++pos;
        }
        if (ok) best = candidate.size();
    }
    return best;
}

/// Average ranks straight from the definition (mean position of ties).
inline std::vector<double> ranks_by_definition(std::span<const double> v) {
    std::vector<double> ranks(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) {
        std::size_t below = 0, equal = 0;
        for (std::size_t j = 0; j < v.size(); ++j) {
            if (v[j] < v[i]) ++below;
            if (v[j] == v[i]) ++equal;
        }
        // ranks of the tied block: below+1 .. below+equal, averaged
        ranks[i] = static_cast<double>(below) + (static_cast<double>(equal) + 1.0) / 2.0;
    }
    return ranks;
}

inline double pearson(std::span<const double> x, std::span<const double> y) {
    const double n = static_cast<double>(x.size());
    const double mx = std::reduce(x.begin(), x.end(), 0.0) / n;
    const double my = std::reduce(y.begin(), y.end(), 0.0) / n;
    double num = 0.0, dx = 0.0, dy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        num += (x[i] - mx) * (y[i] - my);
        dx += (x[i] - mx) * (x[i] - mx);
        dy += (y[i] - my) * (y[i] - my);
    }
    return num / std::sqrt(dx * dy);
}

inline double spearman_by_definition(std::span<const double> x, std::span<const double> y) {
    const auto rx = ranks_by_definition(x);
    const auto ry = ranks_by_definition(y);
    return pearson(rx, ry);
}

inline double kappa_by_definition(std::span<const int> a, std::span<const int> b) {
    const double n = static_cast<double>(a.size());
    double agree = 0.0, a1 = 0.0, b1 = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        agree += a[i] == b[i] ? 1.0 : 0.0;
        a1 += a[i];
        b1 += b[i];
    }
    const double po = agree / n;
    const double pe = (a1 / n) * (b1 / n) + (1.0 - a1 / n) * (1.0 - b1 / n);
    return (po - pe) / (1.0 - pe);
}

/// Central finite difference of f at point p, coordinate i.
inline double central_difference(const std::function<double(std::span<const double>)>& f,
                                 std::vector<double> p, std::size_t i, double h) {
    const double original = p[i];
    p[i] = original + h;
    const double up = f(p);
    p[i] = original - h;
    const double down = f(p);
    return (up - down) / (2.0 * h);
}

}  // namespace oracle
