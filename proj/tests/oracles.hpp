#pragma once

// Independent reference implementations used only by tests. These stay
// deliberately naive: full-matrix dynamic programming, literal definitions,
// exhaustive scans. They must not share code with the library paths they
// check.

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "namelink/rng.hpp"

namespace oracle {

// Full (n+1)x(m+1) dynamic-programming matrix, no row compression.
inline int levenshtein_matrix(const std::u32string& a, const std::u32string& b) {
    const std::size_t n = a.size(), m = b.size();
    std::vector<std::vector<int>> d(n + 1, std::vector<int>(m + 1, 0));
    for (std::size_t i = 0; i <= n; ++i) d[i][0] = static_cast<int>(i);
    for (std::size_t j = 0; j <= m; ++j) d[0][j] = static_cast<int>(j);
    for (std::size_t i = 1; i <= n; ++i) {
        for (std::size_t j = 1; j <= m; ++j) {
            const int cost = a[i - 1] == b[j - 1] ? 0 : 1;
            d[i][j] = std::min({d[i - 1][j] + 1, d[i][j - 1] + 1, d[i - 1][j - 1] + cost});
        }
    }
    return d[n][m];
}

// Literal transliteration of the Jaro definition.
inline double jaro_definition(const std::u32string& a, const std::u32string& b) {
    if (a.empty() && b.empty()) return 1.0;
    if (a.empty() || b.empty()) return 0.0;
    const int la = static_cast<int>(a.size()), lb = static_cast<int>(b.size());
    const int window = std::max(std::max(la, lb) / 2 - 1, 0);
    std::vector<bool> am(la, false), bm(lb, false);
    int m = 0;
    for (int i = 0; i < la; ++i) {
        for (int j = std::max(0, i - window); j <= std::min(lb - 1, i + window); ++j) {
            if (!bm[j] && a[i] == b[j]) {
                am[i] = bm[j] = true;
                ++m;
                break;
            }
        }
    }
    if (m == 0) return 0.0;
    std::u32string sa, sb;
    for (int i = 0; i < la; ++i) {
        if (am[i]) sa.push_back(a[i]);
    }
    for (int j = 0; j < lb; ++j) {
        if (bm[j]) sb.push_back(b[j]);
    }
    int half_transpositions = 0;
    for (std::size_t k = 0; k < sa.size(); ++k) {
        if (sa[k] != sb[k]) ++half_transpositions;
    }
    const double t = half_transpositions / 2.0;
    return ((double)m / la + (double)m / lb + (m - t) / m) / 3.0;
}

inline double jaro_winkler_definition(const std::u32string& a, const std::u32string& b) {
    const double j = jaro_definition(a, b);
    int prefix = 0;
    while (prefix < 4 && prefix < (int)a.size() && prefix < (int)b.size() &&
           a[prefix] == b[prefix]) {
        ++prefix;
    }
    return j + prefix * 0.1 * (1.0 - j);
}

// Quantile by explicit h = (n-1)p interpolation on a sorted copy.
inline double quantile_definition(std::vector<double> values, double p) {
    std::sort(values.begin(), values.end());
    const double h = (static_cast<double>(values.size()) - 1.0) * p;
    const std::size_t lo = static_cast<std::size_t>(std::floor(h));
    const std::size_t hi = std::min(lo + 1, values.size() - 1);
    return values[lo] + (h - lo) * (values[hi] - values[lo]);
}

// Exhaustive threshold scan; mirrors the contract, not the implementation.
inline double brute_force_threshold(const std::vector<double>& weights, double target) {
    std::vector<double> candidates;
    candidates.push_back(-std::numeric_limits<double>::infinity());
    for (const double w : weights) {
        if (std::isfinite(w)) candidates.push_back(w);
    }
    candidates.push_back(std::numeric_limits<double>::infinity());
    std::sort(candidates.begin(), candidates.end());
    candidates.erase(std::unique(candidates.begin(), candidates.end()), candidates.end());

    // the tie rule (lower threshold wins, up to rounding noise) is part of
    // the contract, so the oracle applies the same epsilon
    double best_t = candidates.front();
    double best_d = std::numeric_limits<double>::infinity();
    for (const double t : candidates) {
        int missed = 0;
        for (const double w : weights) {
            if (w < t || w == -std::numeric_limits<double>::infinity()) ++missed;
        }
        const double mmr = static_cast<double>(missed) / static_cast<double>(weights.size());
        if (std::abs(mmr - target) < best_d - 1e-9) {
            best_d = std::abs(mmr - target);
            best_t = t;
        }
    }
    return best_t;
}

inline std::u32string random_name(namelink::SplitMix64& rng, int min_len, int max_len,
                                  int alphabet = 26) {
    const int len = min_len + static_cast<int>(rng.next_below(max_len - min_len + 1));
    std::u32string s;
    for (int i = 0; i < len; ++i) {
        s.push_back(static_cast<char32_t>(U'A' + rng.next_below(alphabet)));
    }
    return s;
}

// Wilson-Hilferty approximation to the chi-square 0.99 quantile.
inline double chi2_99(int df) {
    const double d = static_cast<double>(df);
    const double z = 2.326347874;
    const double term = 1.0 - 2.0 / (9.0 * d) + z * std::sqrt(2.0 / (9.0 * d));
    return d * term * term * term;
}

}  // namespace oracle
