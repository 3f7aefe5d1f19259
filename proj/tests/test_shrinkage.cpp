#include <doctest.h>

#include <cmath>
#include <vector>

#include "bvarfsv/shrinkage.hpp"
#include "support/quadrature.hpp"
#include "support/stats.hpp"

using namespace bvarfsv;
using Eigen::VectorXd;

TEST_CASE("single-coefficient simplex weight is always one") {
    auto s = dl_init(0.5, 1);
    RandomStream rng(101);
    VectorXd b(1);
    for (int i = 0; i < 200; ++i) {
        b[0] = rng.normal();
        dl_update(b, s, rng);
        CHECK(s.theta[0] == doctest::Approx(1.0).epsilon(1e-12));
    }
}

TEST_CASE("local scale draw matches the derived conditional") {
    // psi_j | b has density prop. to psi^(-1/2) exp(-(psi + (b/(theta*zeta))^2/psi)/2),
    // a GIG(1/2, 1, (b/(theta*zeta))^2); the sampler reaches it through the
    // reciprocal inverse-Gaussian route.
    const double b0 = 0.3, theta0 = 0.5, zeta0 = 2.0;
    const double chi = (b0 / (theta0 * zeta0)) * (b0 / (theta0 * zeta0));

    RandomStream rng(111);
    std::vector<double> route_a(100000);
    VectorXd b(2);
    b << b0, -0.4;
    for (auto& x : route_a) {
        auto s = dl_init(0.5, 2);
        s.theta << theta0, 1.0 - theta0;
        s.zeta = zeta0;
        dl_draw_psi(b, s, rng);
        x = s.psi[0];
    }

    oracle::QuantileTable table(oracle::gig_logpdf(0.5, 1.0, chi));
    RandomStream rng2(112);
    std::vector<double> route_b(100000);
    for (auto& x : route_b) x = table(rng2.uniform());

    CHECK(teststat::ks_two_sample_pvalue(route_a, route_b) > 0.01);
}

TEST_CASE("global scale conditional has the right shape") {
    // K=2, a=1/2, |b|=(0.1,0.2), theta=(0.5,0.5): zeta ~ GIG(-1, 1, 1.2)
    RandomStream rng(121);
    VectorXd b(2);
    b << 0.1, -0.2;
    std::vector<double> draws(200000);
    for (auto& x : draws) {
        auto s = dl_init(0.5, 2);
        s.theta << 0.5, 0.5;
        s.zeta = 1.0;
        dl_draw_zeta(b, s, rng);
        x = s.zeta;
    }

    auto logf = oracle::gig_logpdf(-1.0, 1.0, 1.2);
    const double m1 = oracle::moment(logf, 1.0);
    const double m2 = oracle::moment(logf, 2.0);
    const double se1 = std::sqrt(teststat::var_of(draws) / draws.size());
    CHECK(std::fabs(teststat::mean_of(draws) - m1) < std::max(4.0 * se1, 0.005 * m1));
    std::vector<double> sq(draws.size());
    for (std::size_t i = 0; i < draws.size(); ++i) sq[i] = draws[i] * draws[i];
    const double se2 = std::sqrt(teststat::var_of(sq) / sq.size());
    CHECK(std::fabs(teststat::mean_of(sq) - m2) < std::max(4.0 * se2, 0.01 * m2));
}

TEST_CASE("simplex invariants hold under random driving") {
    auto s = dl_init(1.0 / 6.0, 6);
    RandomStream rng(131);
    VectorXd b(6);
    for (int i = 0; i < 2000; ++i) {
        for (int j = 0; j < 6; ++j) b[j] = rng.normal() * std::exp(3.0 * rng.normal());
        dl_update(b, s, rng);
        CHECK(std::fabs(s.theta.sum() - 1.0) < 1e-10);
        CHECK(s.theta.minCoeff() > 0.0);
        CHECK(s.psi.allFinite());
        CHECK(std::isfinite(s.zeta));
    }
}

TEST_CASE("dl gibbs with the likelihood switched off reproduces the prior") {
    // alternate b ~ N(0, Phi(state)) and dl_update; marginally b follows the
    // Dirichlet-Laplace prior, checked against direct hierarchical draws
    const double a = 0.5;
    const int K = 2, n = 200000;
    auto s = dl_init(a, K);
    RandomStream rng(141);
    VectorXd b = VectorXd::Zero(K);
    std::vector<double> chain_absb, chain_b2;
    chain_absb.reserve(n);
    for (int i = 0; i < n; ++i) {
        ShrinkageState st = s;
        const VectorXd phi0 = phi_for_equation(st, 0, 1, 2, false);
        for (int j = 0; j < K; ++j) b[j] = std::sqrt(phi0[j]) * rng.normal();
        dl_update(b, s, rng);
        chain_absb.push_back(std::fabs(b[0]));
        chain_b2.push_back(b[0] * b[0]);
    }

    RandomStream rng2(142);
    std::vector<double> direct_absb, direct_b2;
    for (int i = 0; i < n; ++i) {
        const double zeta = sample_gamma(K * a, 0.5, rng2);
        double g0 = sample_gamma(a, 1.0, rng2), g1 = sample_gamma(a, 1.0, rng2);
        const double theta0 = g0 / (g0 + g1);
        const double psi0 = sample_exponential(0.5, rng2);
        const double bd = std::sqrt(psi0) * theta0 * zeta * rng2.normal();
        direct_absb.push_back(std::fabs(bd));
        direct_b2.push_back(bd * bd);
    }

    const double se_abs = std::hypot(teststat::batch_means_se(chain_absb),
                                     std::sqrt(teststat::var_of(direct_absb) / n));
    CHECK(std::fabs(teststat::mean_of(chain_absb) - teststat::mean_of(direct_absb)) <
          5.0 * se_abs);
    const double se_b2 = std::hypot(teststat::batch_means_se(chain_b2),
                                    std::sqrt(teststat::var_of(direct_b2) / n));
    CHECK(std::fabs(teststat::mean_of(chain_b2) - teststat::mean_of(direct_b2)) < 5.0 * se_b2);
}

TEST_CASE("ng local conditional matches quadrature and the zero-coefficient limit") {
    RandomStream rng(151);
    VectorXd b(2);
    b << 0.5, 0.0;
    std::vector<double> tau_half(150000), tau_zero(150000);
    for (std::size_t i = 0; i < tau_half.size(); ++i) {
        auto s = ng_init(1.0, 2);
        s.lambda_glob = 1.0;
        ng_update(b, s, rng);
        tau_half[i] = s.tau2[0];
        tau_zero[i] = s.tau2[1];
    }
    // tau2 | b=0.5 ~ GIG(1/2, 1, 0.25)
    auto logf = oracle::gig_logpdf(0.5, 1.0, 0.25);
    const double m1 = oracle::moment(logf, 1.0);
    const double se = std::sqrt(teststat::var_of(tau_half) / tau_half.size());
    CHECK(std::fabs(teststat::mean_of(tau_half) - m1) < std::max(4.0 * se, 0.005 * m1));
    // tau2 | b=0 collapses to gamma(1/2, lambda/2), mean 1/lambda = 1
    CHECK(teststat::mean_of(tau_zero) == doctest::Approx(1.0).epsilon(0.02));
}

TEST_CASE("ng global scale posterior is the stated gamma") {
    // lambda | tau2 ~ gamma(c0 + a_ng*K, d0 + a_ng/2 * sum tau2): the
    // standardized residual lambda - shape/rate must average to zero with the
    // conditional variance shape/rate^2
    RandomStream rng(161);
    VectorXd b(3);
    b << 0.1, 0.2, 0.3;
    const double a_ng = 0.1;
    const int n = 200000;
    double resid_sum = 0.0, condvar_sum = 0.0;
    for (int i = 0; i < n; ++i) {
        auto s = ng_init(a_ng, 3);
        ng_update(b, s, rng);
        const double shape = s.c0 + a_ng * 3.0;
        const double rate = s.d0 + 0.5 * a_ng * s.tau2.sum();
        resid_sum += s.lambda_glob - shape / rate;
        condvar_sum += shape / (rate * rate);
    }
    const double se = std::sqrt(condvar_sum / n / n);
    CHECK(std::fabs(resid_sum / n) < 4.0 * se);
}

TEST_CASE("prior variance slices") {
    // unit variance identity: psi=1, theta=1/K, zeta=K gives phi = 1
    auto dl = dl_init(0.5, 6);
    dl.zeta = 6.0;
    ShrinkageState sdl = dl;
    const VectorXd phi_dl = phi_for_equation(sdl, 1, 2, 1, true); // m=2, p=1, k=3, K=6
    CHECK(phi_dl.size() == 3);
    for (int c = 0; c < 3; ++c) CHECK(phi_dl[c] == doctest::Approx(1.0).epsilon(1e-12));

    ShrinkageState mn = MinnesotaState{0.001, 2.0};
    const VectorXd phi_mn = phi_for_equation(mn, 0, 2, 2, true); // k = 5
    CHECK(phi_mn[0] == doctest::Approx(0.001));
    CHECK(phi_mn[1] == doctest::Approx(0.001));
    CHECK(phi_mn[2] == doctest::Approx(0.00025));
    CHECK(phi_mn[3] == doctest::Approx(0.00025));
    CHECK(phi_mn[4] == doctest::Approx(0.01));

    auto ng = ng_init(1.0, 6);
    ng.tau2 << 1, 2, 3, 4, 5, 6;
    ShrinkageState sng = ng;
    const VectorXd phi_ng = phi_for_equation(sng, 1, 2, 1, true);
    CHECK(phi_ng[0] == doctest::Approx(4.0));
    CHECK(phi_ng[2] == doctest::Approx(6.0));
}

TEST_CASE("shrinkage updates stay finite under extreme coefficients") {
    auto s = dl_init(1.0 / 110.0, 110);
    RandomStream rng(171);
    VectorXd b = VectorXd::Zero(110);
    b[3] = 1e150;
    b[7] = 1e-280;
    for (int i = 0; i < 50; ++i) {
        dl_update(b, s, rng);
        CHECK(s.psi.allFinite());
        CHECK(s.theta.allFinite());
        CHECK(std::isfinite(s.zeta));
    }
    auto n = ng_init(0.1, 110);
    for (int i = 0; i < 50; ++i) {
        ng_update(b, n, rng);
        CHECK(n.tau2.allFinite());
        CHECK(std::isfinite(n.lambda_glob));
    }
}
