#include <doctest.h>

#include <cmath>
#include <vector>

#include "bvarfsv/stochvol.hpp"
#include "support/stats.hpp"

using namespace bvarfsv;
using Eigen::MatrixXd;
using Eigen::VectorXd;

namespace {

// prior covariance of a stationary AR(1) path
MatrixXd ar1_cov(double mu, double rho, double sigma2, int T, VectorXd& mean) {
    mean = VectorXd::Constant(T, mu);
    MatrixXd S(T, T);
    const double v = sigma2 / (1.0 - rho * rho);
    for (int i = 0; i < T; ++i)
        for (int j = 0; j < T; ++j) S(i, j) = v * std::pow(rho, std::abs(i - j));
    return S;
}

} // namespace

TEST_CASE("log chi-square mixture table is a proper mixture with the right moments") {
    double psum = 0.0, m1 = 0.0, m2 = 0.0;
    for (int i = 0; i < logchi2::kComponents; ++i) {
        psum += logchi2::kProb[i];
        m1 += logchi2::kProb[i] * logchi2::kMean[i];
        m2 += logchi2::kProb[i] *
              (logchi2::kVar[i] + logchi2::kMean[i] * logchi2::kMean[i]);
    }
    CHECK(std::fabs(psum - 1.0) < 1e-9);
    // log chi^2_1 has mean digamma(1/2) + log 2 and variance pi^2/2
    CHECK(std::fabs(m1 - (-1.270363)) < 0.01);
    CHECK(std::fabs((m2 - m1 * m1) - 4.934802) < 0.02);
}

TEST_CASE("mixture indicator frequencies match the exact posterior weights") {
    RandomStream rng(201);
    for (double x : {-2.0, 1.0, -9.0}) {
        long double w[logchi2::kComponents];
        long double tot = 0.0L;
        for (int i = 0; i < logchi2::kComponents; ++i) {
            const long double d = x - logchi2::kMean[i];
            w[i] = logchi2::kProb[i] / std::sqrt((long double)logchi2::kVar[i]) *
                   std::exp(-0.5L * d * d / logchi2::kVar[i]);
            tot += w[i];
        }
        const int n = 200000;
        std::vector<int> count(logchi2::kComponents, 0);
        for (int k = 0; k < n; ++k) count[draw_mixture_component(x, rng)]++;
        for (int i = 0; i < logchi2::kComponents; ++i) {
            const double p = static_cast<double>(w[i] / tot);
            const double se = std::sqrt(p * (1.0 - p) / n) + 1e-12;
            CHECK(std::fabs(count[i] / double(n) - p) < 5.0 * se + 1e-4);
        }
    }
}

TEST_CASE("ffbs draws match the dense gaussian conditional") {
    const int T = 6;
    const double mu = -1.0, rho = 0.7, sigma2 = 0.3;
    VectorXd y(T), c(T), V(T);
    y << -0.4, 2.1, -3.0, 0.5, -1.8, -0.2;
    c << 0.0, 1.0, -2.0, 0.3, 0.0, -0.5;
    V << 0.11, 2.5, 0.4, 7.3, 0.27, 1.0;

    VectorXd prior_mean;
    MatrixXd S = ar1_cov(mu, rho, sigma2, T, prior_mean);
    MatrixXd Sinv = S.llt().solve(MatrixXd::Identity(T, T));
    MatrixXd post_prec = Sinv;
    for (int t = 0; t < T; ++t) post_prec(t, t) += 1.0 / V[t];
    MatrixXd P = post_prec.llt().solve(MatrixXd::Identity(T, T));
    VectorXd rhs = Sinv * prior_mean;
    for (int t = 0; t < T; ++t) rhs[t] += (y[t] - c[t]) / V[t];
    VectorXd post_mean = P * rhs;

    const int n = 200000;
    RandomStream rng(202);
    VectorXd acc = VectorXd::Zero(T);
    MatrixXd acc2 = MatrixXd::Zero(T, T);
    for (int k = 0; k < n; ++k) {
        VectorXd h = ffbs_linear(y, c, V, mu, rho, sigma2, rng);
        acc += h;
        acc2 += h * h.transpose();
    }
    VectorXd mhat = acc / n;
    MatrixXd chat = acc2 / n - mhat * mhat.transpose();

    for (int t = 0; t < T; ++t)
        CHECK(std::fabs(mhat[t] - post_mean[t]) < 6.0 * std::sqrt(P(t, t) / n));
    for (int i = 0; i < T; ++i)
        for (int j = 0; j < T; ++j) {
            const double se = std::sqrt((P(i, i) * P(j, j) + P(i, j) * P(i, j)) / n);
            CHECK(std::fabs(chat(i, j) - P(i, j)) < 6.0 * se);
        }
}

TEST_CASE("ffbs single-point draw matches the two-gaussian posterior") {
    const double mu = 2.0, rho = 0.9, sigma2 = 0.5;
    const double v0 = sigma2 / (1.0 - rho * rho);
    VectorXd y(1), c(1), V(1);
    y << -3.0;
    c << 0.5;
    V << 0.8;
    const double prec = 1.0 / v0 + 1.0 / V[0];
    const double pv = 1.0 / prec;
    const double pm = pv * (mu / v0 + (y[0] - c[0]) / V[0]);

    RandomStream rng(203);
    const int n = 300000;
    std::vector<double> draws(n);
    for (auto& d : draws) d = ffbs_linear(y, c, V, mu, rho, sigma2, rng)[0];
    CHECK(std::fabs(teststat::mean_of(draws) - pm) < 5.0 * std::sqrt(pv / n));
    CHECK(std::fabs(teststat::var_of(draws) - pv) < 5.0 * pv * std::sqrt(2.0 / n));
}

TEST_CASE("path refresh is deterministic given the seed and stays finite") {
    const int T = 300;
    RandomStream gen(204);
    VectorXd htrue = sv_simulate_path(-9.0, 0.95, 0.04, T, gen);
    VectorXd resid(T);
    for (int t = 0; t < T; ++t) resid[t] = std::exp(0.5 * htrue[t]) * gen.normal();

    auto run = [&](uint64_t seed) {
        SvBlock b;
        b.h = VectorXd::Constant(T, -9.0);
        b.mu = -9.0;
        b.rho = 0.9;
        b.sigma2 = 0.05;
        RandomStream r(seed);
        for (int it = 0; it < 50; ++it) sample_sv_path(resid, b, r);
        return b.h;
    };
    VectorXd h1 = run(77), h2 = run(77), h3 = run(78);
    CHECK((h1 - h2).cwiseAbs().maxCoeff() == 0.0);
    CHECK((h1 - h3).cwiseAbs().maxCoeff() > 0.0);
    CHECK(h1.allFinite());
}

TEST_CASE("parameter sampler with no data reproduces the prior") {
    SvPriors pr;
    SvBlock b;
    b.h.resize(0);
    RandomStream rng(205);
    for (int it = 0; it < 10000; ++it) sample_sv_params(b, pr, rng);
    b.adapting = false;
    const int n = 60000;
    std::vector<double> mus(n), rhos(n), sig2(n), mu2(n);
    for (int it = 0; it < n; ++it) {
        sample_sv_params(b, pr, rng);
        mus[it] = b.mu;
        rhos[it] = b.rho;
        sig2[it] = b.sigma2;
        mu2[it] = b.mu * b.mu;
    }
    // E[rho] = 2 a/(a+b) - 1, E[sigma2] = xi, mu ~ N(0, 10)
    CHECK(std::fabs(teststat::zscore_vs(rhos, 2.0 * pr.rho_a / (pr.rho_a + pr.rho_b) - 1.0)) < 5.0);
    CHECK(std::fabs(teststat::zscore_vs(sig2, pr.xi)) < 5.0);
    CHECK(std::fabs(teststat::zscore_vs(mus, 0.0)) < 5.0);
    CHECK(std::fabs(teststat::zscore_vs(mu2, pr.mu_var)) < 5.0);

    // full-law agreement against direct prior draws on (rho, log sigma2)
    RandomStream rng2(206);
    const int ne = 1200;
    MatrixXd X(ne, 2), Y(ne, 2);
    for (int i = 0; i < ne; ++i) {
        X(i, 0) = rhos[static_cast<std::size_t>(i) * (n / ne)];
        X(i, 1) = std::log(sig2[static_cast<std::size_t>(i) * (n / ne)]);
        SvBlock d;
        sv_prior_draw(d, pr, rng2);
        Y(i, 0) = d.rho;
        Y(i, 1) = std::log(d.sigma2);
    }
    CHECK(teststat::energy_test_pvalue(X, Y, 199, rng2) > 0.005);
}

TEST_CASE("fixing the level keeps it at zero without disturbing the rest") {
    SvPriors pr;
    SvBlock b;
    b.mu_fixed = true;
    b.h.resize(0);
    RandomStream rng(207);
    for (int it = 0; it < 5000; ++it) sample_sv_params(b, pr, rng);
    b.adapting = false;
    const int n = 40000;
    std::vector<double> rhos(n);
    for (int it = 0; it < n; ++it) {
        sample_sv_params(b, pr, rng);
        CHECK(b.mu == 0.0);
        rhos[it] = b.rho;
    }
    CHECK(std::fabs(teststat::zscore_vs(rhos, 2.0 * pr.rho_a / (pr.rho_a + pr.rho_b) - 1.0)) < 5.0);
}

TEST_CASE("parameter sampler concentrates near the truth on a long path") {
    const int T = 3000;
    RandomStream gen(208);
    VectorXd h = sv_simulate_path(-9.0, 0.95, 0.04, T, gen);

    SvPriors pr;
    SvBlock b;
    b.h = h;
    b.mu = -5.0;
    b.rho = 0.5;
    b.sigma2 = 0.5;
    RandomStream rng(209);
    for (int it = 0; it < 6000; ++it) sample_sv_params(b, pr, rng);
    b.adapting = false;
    const int n = 30000;
    std::vector<double> mus(n), rhos(n), sig2(n);
    for (int it = 0; it < n; ++it) {
        sample_sv_params(b, pr, rng);
        mus[it] = b.mu;
        rhos[it] = b.rho;
        sig2[it] = b.sigma2;
    }
    CHECK(std::fabs(teststat::mean_of(mus) + 9.0) < 0.5);
    CHECK(std::fabs(teststat::mean_of(rhos) - 0.95) < 0.04);
    CHECK(teststat::mean_of(sig2) > 0.02);
    CHECK(teststat::mean_of(sig2) < 0.07);
}

TEST_CASE("joint path and parameter gibbs recovers a simulated volatility process") {
    const int T = 1200;
    RandomStream gen(210);
    VectorXd htrue = sv_simulate_path(-9.0, 0.95, 0.04, T, gen);
    VectorXd resid(T);
    for (int t = 0; t < T; ++t) resid[t] = std::exp(0.5 * htrue[t]) * gen.normal();

    VectorXd ystar(T);
    for (int t = 0; t < T; ++t) ystar[t] = std::log(resid[t] * resid[t] + kLogVarOffset);
    const double level0 = ystar.mean() + 1.27;

    SvBlock b;
    b.h = VectorXd::Constant(T, level0);
    b.mu = level0;
    b.rho = 0.9;
    b.sigma2 = 0.01;
    SvPriors pr;
    RandomStream rng(211);
    const int burn = 1000, keep = 3000;
    for (int it = 0; it < burn; ++it) {
        sample_sv_path(resid, b, rng);
        sample_sv_params(b, pr, rng);
    }
    b.adapting = false;
    std::vector<double> mus, rhos, sig2;
    std::vector<double> h_mid;
    for (int it = 0; it < keep; ++it) {
        sample_sv_path(resid, b, rng);
        sample_sv_params(b, pr, rng);
        mus.push_back(b.mu);
        rhos.push_back(b.rho);
        sig2.push_back(b.sigma2);
        h_mid.push_back(b.h[T / 2]);
    }
    CHECK(std::fabs(teststat::mean_of(mus) + 9.0) < 1.0);
    CHECK(teststat::mean_of(rhos) > 0.85);
    CHECK(teststat::mean_of(rhos) < 0.99);
    CHECK(teststat::mean_of(sig2) < 0.2);
    CHECK(std::fabs(teststat::mean_of(h_mid) - htrue[T / 2]) < 2.0);
}

TEST_CASE("one-step volatility forecast has the AR(1) predictive moments") {
    SvBlock b;
    b.h = VectorXd::Constant(4, 0.0);
    b.h[3] = -7.0;
    b.mu = -9.0;
    b.rho = 0.9;
    b.sigma2 = 0.09;
    RandomStream rng(212);
    const int n = 200000;
    std::vector<double> draws(n);
    for (auto& d : draws) d = sv_forecast_step(b, rng);
    const double want = b.mu + b.rho * (b.h[3] - b.mu);
    CHECK(std::fabs(teststat::mean_of(draws) - want) < 5.0 * std::sqrt(b.sigma2 / n));
    CHECK(std::fabs(teststat::var_of(draws) - b.sigma2) < 5.0 * b.sigma2 * std::sqrt(2.0 / n));
}

TEST_CASE("simulated paths have the stationary distribution") {
    RandomStream rng(213);
    const int T = 200000;
    VectorXd h = sv_simulate_path(-3.0, 0.8, 0.36, T, rng);
    std::vector<double> x(h.data(), h.data() + T);
    const double vstat = 0.36 / (1.0 - 0.64);
    CHECK(std::fabs(teststat::zscore_vs(x, -3.0)) < 5.0);
    double c1 = 0.0, v = teststat::var_of(x), m = teststat::mean_of(x);
    for (int t = 1; t < T; ++t) c1 += (h[t] - m) * (h[t - 1] - m);
    c1 /= (T - 1);
    CHECK(std::fabs(v - vstat) < 0.05 * vstat);
    CHECK(std::fabs(c1 / v - 0.8) < 0.02);
}
