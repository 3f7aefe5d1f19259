#pragma once

// Shared test statistics: two-sample KS, batch-means standard errors for
// autocorrelated chains, and an energy-distance permutation test.

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include <Eigen/Dense>

#include "bvarfsv/rng.hpp"

namespace teststat {

inline double mean_of(const std::vector<double>& v) {
    return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

inline double var_of(const std::vector<double>& v) {
    const double m = mean_of(v);
    double acc = 0.0;
    for (double x : v) acc += (x - m) * (x - m);
    return acc / static_cast<double>(v.size() - 1);
}

// asymptotic Kolmogorov p-value
inline double kolmogorov_q(double lambda) {
    double acc = 0.0;
    for (int j = 1; j <= 100; ++j) {
        const double term = 2.0 * ((j % 2) ? 1.0 : -1.0) * std::exp(-2.0 * j * j * lambda * lambda);
        acc += term;
        if (std::fabs(term) < 1e-12) break;
    }
    return std::min(1.0, std::max(0.0, acc));
}

inline double ks_two_sample_pvalue(std::vector<double> a, std::vector<double> b) {
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    const double na = static_cast<double>(a.size()), nb = static_cast<double>(b.size());
    std::size_t i = 0, j = 0;
    double d = 0.0;
    while (i < a.size() && j < b.size()) {
        const double x = std::min(a[i], b[j]);
        while (i < a.size() && a[i] <= x) ++i;
        while (j < b.size() && b[j] <= x) ++j;
        d = std::max(d, std::fabs(i / na - j / nb));
    }
    const double ne = std::sqrt(na * nb / (na + nb));
    return kolmogorov_q((ne + 0.12 + 0.11 / ne) * d);
}

// standard error of the chain mean via nonoverlapping batch means
inline double batch_means_se(const std::vector<double>& chain) {
    const std::size_t n = chain.size();
    const std::size_t nb = std::max<std::size_t>(10, static_cast<std::size_t>(std::sqrt(double(n))));
    const std::size_t len = n / nb;
    std::vector<double> bm;
    bm.reserve(nb);
    for (std::size_t b = 0; b < nb; ++b) {
        double acc = 0.0;
        for (std::size_t t = b * len; t < (b + 1) * len; ++t) acc += chain[t];
        bm.push_back(acc / static_cast<double>(len));
    }
    return std::sqrt(var_of(bm) / static_cast<double>(nb));
}

inline double zscore_vs(const std::vector<double>& chain, double target) {
    return (mean_of(chain) - target) / batch_means_se(chain);
}

// Szekely-Rizzo energy statistic with permutation p-value; rows are draws.
inline double energy_test_pvalue(const Eigen::MatrixXd& X, const Eigen::MatrixXd& Y,
                                 int n_perm, bvarfsv::RandomStream& rng) {
    const int n = static_cast<int>(X.rows()), m = static_cast<int>(Y.rows());
    const int tot = n + m;
    Eigen::MatrixXd P(tot, X.cols());
    P.topRows(n) = X;
    P.bottomRows(m) = Y;
    Eigen::MatrixXd D(tot, tot);
    for (int i = 0; i < tot; ++i) {
        D(i, i) = 0.0;
        for (int j = i + 1; j < tot; ++j) {
            const double d = (P.row(i) - P.row(j)).norm();
            D(i, j) = d;
            D(j, i) = d;
        }
    }
    std::vector<int> idx(tot);
    std::iota(idx.begin(), idx.end(), 0);
    auto estat = [&](const std::vector<int>& perm) {
        double sxy = 0.0, sxx = 0.0, syy = 0.0;
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) sxx += D(perm[i], perm[j]);
        for (int i = n; i < tot; ++i)
            for (int j = n; j < tot; ++j) syy += D(perm[i], perm[j]);
        for (int i = 0; i < n; ++i)
            for (int j = n; j < tot; ++j) sxy += D(perm[i], perm[j]);
        return 2.0 * sxy / (double(n) * m) - sxx / (double(n) * n) - syy / (double(m) * m);
    };
    const double observed = estat(idx);
    int geq = 0;
    for (int p = 0; p < n_perm; ++p) {
        for (int i = tot - 1; i > 0; --i) {
            const int j = static_cast<int>(rng.raw() % static_cast<std::uint64_t>(i + 1));
            std::swap(idx[i], idx[j]);
        }
        if (estat(idx) >= observed) ++geq;
    }
    return (geq + 1.0) / (n_perm + 1.0);
}

} // namespace teststat
