#include <doctest.h>

#include <cmath>
#include <limits>
#include <vector>

#include "bvarfsv/errors.hpp"
#include "bvarfsv/forecast.hpp"

using namespace bvarfsv;
using Eigen::MatrixXd;
using Eigen::VectorXd;

namespace {

constexpr double kLog2Pi = 1.8378770664093454836;

double dense_mvn_logpdf(const VectorXd& mu, const MatrixXd& S, const VectorXd& y) {
    Eigen::LLT<MatrixXd> llt(S);
    REQUIRE(llt.info() == Eigen::Success);
    VectorXd r = y - mu;
    const double logdet = 2.0 * llt.matrixLLT().diagonal().array().log().sum();
    return -0.5 * (static_cast<double>(r.size()) * kLog2Pi + logdet + r.dot(llt.solve(r)));
}

// small stable trivariate system for the expanding-window checks
MatrixXd smoke_panel(Eigen::Index rows, std::uint64_t seed) {
    MatrixXd A(3, 3);
    A << 0.5, 0.1, 0.0, -0.2, 0.4, 0.1, 0.0, 0.1, 0.3;
    VectorXd c(3);
    c << 0.2, -0.1, 0.05;
    RandomStream rng(seed);
    MatrixXd raw(rows, 3);
    VectorXd y = VectorXd::Zero(3);
    for (Eigen::Index t = 0; t < rows; ++t) {
        VectorXd e(3);
        for (int i = 0; i < 3; ++i) e[i] = 0.3 * rng.normal();
        y = A * y + c + e;
        raw.row(t) = y.transpose();
    }
    return raw;
}

} // namespace

TEST_CASE("log predictive score matches hand values and a long double oracle") {
    VectorXd two(2);
    two << std::log(0.2), std::log(0.4);
    CHECK(log_predictive_score(two) == doctest::Approx(std::log(0.3)).epsilon(1e-14));

    VectorXd one(1);
    one << -3.7;
    CHECK(log_predictive_score(one) == doctest::Approx(-3.7).epsilon(1e-15));

    RandomStream rng(41);
    const int n = 200;
    VectorXd ld(n);
    for (int i = 0; i < n; ++i) ld[i] = -50.0 + 60.0 * rng.uniform();
    long double mx = ld.maxCoeff();
    long double s = 0.0L;
    for (int i = 0; i < n; ++i) s += std::exp(static_cast<long double>(ld[i]) - mx);
    const double ref = static_cast<double>(mx + std::log(s) - std::log(static_cast<long double>(n)));
    CHECK(std::abs(log_predictive_score(ld) - ref) < 1e-12 * std::max(1.0, std::abs(ref)));
}

TEST_CASE("log predictive score survives extreme inputs") {
    const double ninf = -std::numeric_limits<double>::infinity();

    VectorXd allz(3);
    allz << ninf, ninf, ninf;
    CHECK(log_predictive_score(allz) == ninf);

    VectorXd mixed(2);
    mixed << ninf, std::log(0.5);
    CHECK(log_predictive_score(mixed) == doctest::Approx(std::log(0.25)).epsilon(1e-14));

    VectorXd huge(2);
    huge << 1e4, 1e4;
    CHECK(log_predictive_score(huge) == doctest::Approx(1e4).epsilon(1e-14));

    VectorXd empty(0);
    CHECK_THROWS_AS(log_predictive_score(empty), std::invalid_argument);

    VectorXd pinf(2);
    pinf << std::numeric_limits<double>::infinity(), 0.0;
    CHECK_THROWS_AS(log_predictive_score(pinf), NumericalError);
}

TEST_CASE("predictive log density agrees with a dense normal evaluation") {
    RandomStream rng(9917);
    const Eigen::Index m = 6, p = 2, q = 2, k = m * p + 1;
    MatrixXd B(m, k), Lambda(m, q);
    for (Eigen::Index i = 0; i < m; ++i) {
        for (Eigen::Index j = 0; j < k; ++j) B(i, j) = 0.1 * rng.normal();
        for (Eigen::Index j = 0; j < q; ++j) Lambda(i, j) = 0.5 * rng.normal();
    }
    VectorXd hf(q), hidio(m), x(k), y(m);
    hf << 0.3, -0.7;
    for (Eigen::Index i = 0; i < m; ++i) hidio[i] = -1.5 + 2.0 * rng.uniform();
    for (Eigen::Index j = 0; j < k; ++j) x[j] = rng.normal();
    for (Eigen::Index i = 0; i < m; ++i) y[i] = rng.normal();

    const VectorXd mean = B * x;
    MatrixXd S = Lambda * hf.array().exp().matrix().asDiagonal() * Lambda.transpose();
    S += hidio.array().exp().matrix().asDiagonal();

    CHECK(std::abs(predictive_logdensity(B, Lambda, hf, hidio, x, y) -
                   dense_mvn_logpdf(mean, S, y)) < 1e-10);

    const std::vector<std::vector<Eigen::Index>> subsets = {{0}, {1, 4}, {0, 2, 3, 5}};
    for (const auto& sub : subsets) {
        const Eigen::Index d = static_cast<Eigen::Index>(sub.size());
        VectorXd ms(d), ys(d);
        MatrixXd Ss(d, d);
        for (Eigen::Index a = 0; a < d; ++a) {
            ms[a] = mean[sub[static_cast<std::size_t>(a)]];
            ys[a] = y[sub[static_cast<std::size_t>(a)]];
            for (Eigen::Index b = 0; b < d; ++b)
                Ss(a, b) = S(sub[static_cast<std::size_t>(a)], sub[static_cast<std::size_t>(b)]);
        }
        CHECK(std::abs(predictive_logdensity(B, Lambda, hf, hidio, x, y, sub) -
                       dense_mvn_logpdf(ms, Ss, ys)) < 1e-10);
    }

    // no factors: the density is a product of univariate normals
    MatrixXd L0(m, 0);
    VectorXd hf0(0);
    double prod = 0.0;
    for (Eigen::Index i = 0; i < m; ++i) {
        const double v = std::exp(hidio[i]);
        prod += -0.5 * (std::log(2.0 * M_PI * v) + (y[i] - mean[i]) * (y[i] - mean[i]) / v);
    }
    CHECK(std::abs(predictive_logdensity(B, L0, hf0, hidio, x, y) - prod) < 1e-10);
}

TEST_CASE("predictive log density validates its inputs") {
    const Eigen::Index m = 4, k = 5, q = 1;
    MatrixXd B = MatrixXd::Zero(m, k), Lambda = MatrixXd::Ones(m, q);
    VectorXd hf = VectorXd::Zero(q), hidio = VectorXd::Zero(m);
    VectorXd x = VectorXd::Ones(k), y = VectorXd::Zero(m);

    CHECK_THROWS_AS(predictive_logdensity(B, Lambda, hf, hidio, x, y, {4}), std::invalid_argument);
    CHECK_THROWS_AS(predictive_logdensity(B, Lambda, hf, hidio, x, y, {2, 1}),
                    std::invalid_argument);
    CHECK_THROWS_AS(predictive_logdensity(B, Lambda, hf, hidio, x, y, {1, 1}),
                    std::invalid_argument);
    CHECK_THROWS_AS(predictive_logdensity(B, Lambda, hf, hidio, x, y, {-1, 2}),
                    std::invalid_argument);
    CHECK_THROWS_AS(predictive_logdensity(B, Lambda, hf, hidio, VectorXd::Ones(k + 1), y),
                    std::invalid_argument);
    CHECK_THROWS_AS(predictive_logdensity(B, Lambda, hf, hidio, x, VectorXd::Zero(m - 1)),
                    std::invalid_argument);
    CHECK_THROWS_AS(predictive_logdensity(B, Lambda, VectorXd::Zero(q + 1), hidio, x, y),
                    std::invalid_argument);
}

TEST_CASE("next regressor lines up with the lagged design") {
    MatrixXd raw(5, 2);
    raw << 1, 2, 3, 4, 5, 6, 7, 8, 9, 10;
    VectorXd x = next_regressor(raw, 2);
    REQUIRE(x.size() == 5);
    CHECK(x[0] == 9.0);
    CHECK(x[1] == 10.0);
    CHECK(x[2] == 7.0);
    CHECK(x[3] == 8.0);
    CHECK(x[4] == 1.0);

    RandomStream rng(77);
    MatrixXd big(12, 3);
    for (Eigen::Index t = 0; t < 12; ++t)
        for (Eigen::Index i = 0; i < 3; ++i) big(t, i) = rng.normal();
    for (Eigen::Index p = 1; p <= 3; ++p) {
        const Eigen::Index t = 7;
        Dataset d = build_dataset(big.topRows(t + 1), p);
        VectorXd nx = next_regressor(big.topRows(t), p);
        CHECK((d.X.row(d.X.rows() - 1).transpose() - nx).cwiseAbs().maxCoeff() == 0.0);
    }

    CHECK_THROWS_AS(next_regressor(raw, 0), std::invalid_argument);
    CHECK_THROWS_AS(next_regressor(raw, 6), std::invalid_argument);
}

TEST_CASE("state extension appends one deterministic period") {
    ChainState s;
    s.B = MatrixXd::Ones(2, 3);
    s.Lambda = MatrixXd::Ones(2, 2);
    s.f = MatrixXd::Random(5, 2);
    const MatrixXd f_before = s.f;
    s.sv_idio.resize(2);
    for (auto& b : s.sv_idio) {
        b.mu = 1.0;
        b.rho = 0.5;
        b.h = VectorXd::LinSpaced(5, -1.0, 3.0);
    }
    s.sv_factor.resize(2);
    for (auto& b : s.sv_factor) {
        b.mu = 0.0;
        b.rho = 0.9;
        b.h = VectorXd::Constant(5, 2.0);
    }

    ChainState e = extend_state(s);
    REQUIRE(e.f.rows() == 6);
    CHECK((e.f.topRows(5) - f_before).cwiseAbs().maxCoeff() == 0.0);
    CHECK(e.f.row(5).cwiseAbs().maxCoeff() == 0.0);
    for (const auto& b : e.sv_idio) {
        REQUIRE(b.h.size() == 6);
        CHECK(b.h[5] == doctest::Approx(1.0 + 0.5 * (3.0 - 1.0)).epsilon(1e-15));
    }
    for (const auto& b : e.sv_factor) {
        REQUIRE(b.h.size() == 6);
        CHECK(b.h[5] == doctest::Approx(0.9 * 2.0).epsilon(1e-15));
    }
    CHECK(e.B == s.B);

    ChainState bad = s;
    bad.sv_idio[0].h.resize(0);
    CHECK_THROWS_AS(extend_state(bad), std::invalid_argument);
}

TEST_CASE("expanding window evaluation is reproducible and marginal scores nest") {
    const MatrixXd raw = smoke_panel(60, 314);

    ForecastConfig cfg;
    cfg.spec.m = 3;
    cfg.spec.p = 1;
    cfg.spec.q = 1;
    cfg.spec.shrink = {ShrinkageKind::DirichletLaplace, 0.5};
    cfg.first_obs = 50;
    cfg.windows = 3;
    cfg.burn_first = 200;
    cfg.burn_warm = 100;
    cfg.draws = 150;
    cfg.seed = 42;

    ForecastRun a = expanding_window_run(raw, cfg);
    REQUIRE(a.windows.size() == 3);
    CHECK(a.evaluated == std::vector<Eigen::Index>{0, 1, 2});
    double tj = 0.0;
    VectorXd tu = VectorXd::Zero(3);
    for (std::size_t w = 0; w < 3; ++w) {
        CHECK(a.windows[w].t_forecast == 50 + static_cast<Eigen::Index>(w));
        CHECK(std::isfinite(a.windows[w].joint));
        REQUIRE(a.windows[w].univariate.size() == 3);
        CHECK(a.windows[w].univariate.allFinite());
        tj += a.windows[w].joint;
        tu += a.windows[w].univariate;
    }
    CHECK(a.total_joint == doctest::Approx(tj).epsilon(1e-15));
    CHECK((a.total_univariate - tu).cwiseAbs().maxCoeff() == 0.0);

    ForecastRun b = expanding_window_run(raw, cfg);
    CHECK(b.total_joint == a.total_joint);
    CHECK((b.total_univariate - a.total_univariate).cwiseAbs().maxCoeff() == 0.0);

    // restricting the joint score to a subset must not change the univariate
    // scores of the series kept: the fit and the propagated volatilities are
    // identical draw for draw
    ForecastConfig sub = cfg;
    sub.subset = {0, 2};
    ForecastRun c = expanding_window_run(raw, sub);
    CHECK(c.evaluated == std::vector<Eigen::Index>{0, 2});
    REQUIRE(c.total_univariate.size() == 2);
    CHECK(c.total_univariate[0] == a.total_univariate[0]);
    CHECK(c.total_univariate[1] == a.total_univariate[2]);
    CHECK(c.total_joint != a.total_joint);
    for (std::size_t w = 0; w < 3; ++w) CHECK(std::isfinite(c.windows[w].joint));
}

TEST_CASE("expanding window evaluation validates its configuration") {
    const MatrixXd raw = smoke_panel(30, 99);
    ForecastConfig cfg;
    cfg.spec.m = 3;
    cfg.first_obs = 25;
    cfg.windows = 2;
    cfg.burn_first = 5;
    cfg.burn_warm = 5;
    cfg.draws = 5;

    ForecastConfig wide = cfg;
    wide.spec.m = 4;
    CHECK_THROWS_AS(expanding_window_run(raw, wide), DataError);

    ForecastConfig none = cfg;
    none.windows = 0;
    CHECK_THROWS_AS(expanding_window_run(raw, none), ConfigError);

    ForecastConfig tiny = cfg;
    tiny.first_obs = 1;
    CHECK_THROWS_AS(expanding_window_run(raw, tiny), ConfigError);

    ForecastConfig past = cfg;
    past.windows = 10;
    CHECK_THROWS_AS(expanding_window_run(raw, past), DataError);

    ForecastConfig badsub = cfg;
    badsub.subset = {2, 1};
    CHECK_THROWS_AS(expanding_window_run(raw, badsub), std::invalid_argument);
}

TEST_CASE("pinned coefficients stay pinned through a run") {
    const MatrixXd raw = smoke_panel(40, 2718);
    ModelSpec spec;
    spec.m = 3;
    spec.p = 1;
    spec.q = 1;
    spec.fixed_coef = fixed_ar_matrix(3, 1, 0.5);
    const MatrixXd pinned = *spec.fixed_coef;

    Dataset data = build_dataset(raw, 1);
    RunOptions opts;
    opts.burn = 10;
    opts.draws = 5;
    opts.seed = 7;
    int seen = 0;
    opts.on_draw = [&](const ChainState& st, Eigen::Index) {
        CHECK((st.B - pinned).cwiseAbs().maxCoeff() == 0.0);
        ++seen;
    };
    RunResult res = run_chain(spec, data, opts);
    CHECK(seen == 5);
    CHECK((res.final_state.B - pinned).cwiseAbs().maxCoeff() == 0.0);

    ForecastConfig cfg;
    cfg.spec = spec;
    cfg.first_obs = 30;
    cfg.windows = 2;
    cfg.burn_first = 50;
    cfg.burn_warm = 25;
    cfg.draws = 40;
    cfg.seed = 5;
    ForecastRun fr = expanding_window_run(raw, cfg);
    for (const auto& w : fr.windows) {
        CHECK(std::isfinite(w.joint));
        CHECK(w.univariate.allFinite());
    }

    CHECK_THROWS_AS(fixed_ar_matrix(0, 1, 0.5), std::invalid_argument);
    MatrixXd F = fixed_ar_matrix(3, 2, 0.8);
    REQUIRE(F.rows() == 3);
    REQUIRE(F.cols() == 7);
    CHECK(F(1, 1) == 0.8);
    CHECK(F(1, 4) == 0.0);
    CHECK(F.cwiseAbs().sum() == doctest::Approx(2.4).epsilon(1e-15));
}

TEST_CASE("univariate scores on unit variance noise sit near the entropy bound") {
    RandomStream rng(606);
    MatrixXd raw(110, 2);
    for (Eigen::Index t = 0; t < raw.rows(); ++t)
        for (Eigen::Index i = 0; i < 2; ++i) raw(t, i) = rng.normal();

    ForecastConfig cfg;
    cfg.spec.m = 2;
    cfg.spec.p = 1;
    cfg.spec.q = 0;
    cfg.spec.shrink = {ShrinkageKind::DirichletLaplace, 0.5};
    cfg.first_obs = 100;
    cfg.windows = 5;
    cfg.burn_first = 300;
    cfg.burn_warm = 150;
    cfg.draws = 200;
    cfg.seed = 17;

    ForecastRun fr = expanding_window_run(raw, cfg);
    const double avg = fr.total_univariate.sum() / (5.0 * 2.0);
    CHECK(avg > -2.2);
    CHECK(avg < -1.0);
}
