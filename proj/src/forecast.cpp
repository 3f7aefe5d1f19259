#include "bvarfsv/forecast.hpp"

#include <Eigen/Cholesky>

#include <cmath>
#include <cstddef>
#include <limits>
#include <stdexcept>

#include "bvarfsv/errors.hpp"
#include "bvarfsv/factors.hpp"
#include "bvarfsv/rng.hpp"
#include "bvarfsv/stochvol.hpp"

namespace bvarfsv {

namespace {

constexpr double kLog2Pi = 1.8378770664093454836;

std::vector<Eigen::Index> all_series(Eigen::Index m) {
    std::vector<Eigen::Index> s(static_cast<std::size_t>(m));
    for (Eigen::Index i = 0; i < m; ++i) s[static_cast<std::size_t>(i)] = i;
    return s;
}

void check_subset(const std::vector<Eigen::Index>& subset, Eigen::Index m) {
    Eigen::Index prev = -1;
    for (Eigen::Index idx : subset) {
        if (idx <= prev || idx >= m)
            throw std::invalid_argument(
                "predictive subset must be strictly increasing and within the panel");
        prev = idx;
    }
}

} // namespace

double predictive_logdensity(const Eigen::MatrixXd& B, const Eigen::MatrixXd& Lambda,
                             const Eigen::VectorXd& hf_next, const Eigen::VectorXd& hidio_next,
                             const Eigen::VectorXd& x_next, const Eigen::VectorXd& y_obs,
                             const std::vector<Eigen::Index>& subset) {
    const Eigen::Index m = B.rows(), k = B.cols(), q = Lambda.cols();
    if (Lambda.rows() != m || hidio_next.size() != m || hf_next.size() != q)
        throw std::invalid_argument("predictive_logdensity: inconsistent draw dimensions");
    if (x_next.size() != k || y_obs.size() != m)
        throw std::invalid_argument(
            "predictive_logdensity: regressor or outcome has the wrong length");
    check_subset(subset, m);

    std::vector<Eigen::Index> all;
    if (subset.empty()) all = all_series(m);
    const std::vector<Eigen::Index>& sel = subset.empty() ? all : subset;
    const Eigen::Index d = static_cast<Eigen::Index>(sel.size());

    Eigen::VectorXd r(d), dv(d);
    Eigen::MatrixXd L(d, q);
    for (Eigen::Index i = 0; i < d; ++i) {
        const Eigen::Index s = sel[static_cast<std::size_t>(i)];
        r[i] = y_obs[s] - B.row(s).dot(x_next);
        dv[i] = bounded_exp(hidio_next[s]);
        if (q > 0) L.row(i) = Lambda.row(s);
    }

    // determinant and quadratic form go through the q x q capacitance matrix
    // of the diagonal-plus-low-rank covariance
    double logdet = dv.array().log().sum();
    double quad = (r.array().square() / dv.array()).sum();
    if (q > 0) {
        Eigen::MatrixXd Lf = L;
        for (Eigen::Index j = 0; j < q; ++j) Lf.col(j) *= std::sqrt(bounded_exp(hf_next[j]));
        Eigen::MatrixXd Lw = (Lf.array().colwise() / dv.array()).matrix();
        Eigen::MatrixXd C = Eigen::MatrixXd::Identity(q, q);
        C.noalias() += Lf.transpose() * Lw;
        Eigen::LLT<Eigen::MatrixXd> llt(C);
        if (llt.info() != Eigen::Success)
            throw NumericalError("predictive_logdensity: capacitance factorization failed");
        logdet += 2.0 * llt.matrixLLT().diagonal().array().log().sum();
        Eigen::VectorXd u = Lw.transpose() * r;
        quad -= u.dot(llt.solve(u));
    }
    return -0.5 * (static_cast<double>(d) * kLog2Pi + logdet + quad);
}

double log_predictive_score(const Eigen::VectorXd& logdens) {
    const Eigen::Index n = logdens.size();
    if (n < 1) throw std::invalid_argument("log_predictive_score: no draws");
    const double mx = logdens.maxCoeff();
    if (!std::isfinite(mx)) {
        if (mx == -std::numeric_limits<double>::infinity()) return mx;
        throw NumericalError("log_predictive_score: non-finite log density");
    }
    double s = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) s += std::exp(logdens[i] - mx);
    return mx + std::log(s) - std::log(static_cast<double>(n));
}

Eigen::VectorXd next_regressor(const Eigen::MatrixXd& raw, Eigen::Index p) {
    const Eigen::Index n = raw.rows(), m = raw.cols();
    if (p < 1) throw std::invalid_argument("next_regressor: need at least one lag");
    if (n < p) throw std::invalid_argument("next_regressor: panel shorter than the lag order");
    Eigen::VectorXd x(m * p + 1);
    for (Eigen::Index l = 0; l < p; ++l) x.segment(l * m, m) = raw.row(n - 1 - l).transpose();
    x[m * p] = 1.0;
    return x;
}

ChainState extend_state(const ChainState& s) {
    ChainState out = s;
    const Eigen::Index T = out.f.rows();
    out.f.conservativeResize(T + 1, Eigen::NoChange);
    if (out.f.cols() > 0) out.f.row(T).setZero();
    auto extend = [](SvBlock& b) {
        const Eigen::Index n = b.h.size();
        if (n == 0) throw std::invalid_argument("extend_state: empty volatility path");
        const double next = b.mu + b.rho * (b.h[n - 1] - b.mu);
        b.h.conservativeResize(n + 1);
        b.h[n] = next;
    };
    for (auto& b : out.sv_idio) extend(b);
    for (auto& b : out.sv_factor) extend(b);
    return out;
}

ForecastRun expanding_window_run(const Eigen::MatrixXd& raw, const ForecastConfig& cfg) {
    const ModelSpec& spec = cfg.spec;
    const Eigen::Index m = spec.m, q = spec.q, p = spec.p;
    if (raw.cols() != m) throw DataError("expanding_window_run: panel width does not match the model");
    if (cfg.windows < 1) throw ConfigError("expanding_window_run: need at least one window");
    if (cfg.first_obs <= p)
        throw ConfigError("expanding_window_run: first window shorter than the lag order");
    if (raw.rows() < cfg.first_obs + cfg.windows)
        throw DataError("expanding_window_run: panel too short for the requested windows");
    check_subset(cfg.subset, m);

    const std::vector<Eigen::Index> sel = cfg.subset.empty() ? all_series(m) : cfg.subset;
    const Eigen::Index ns = static_cast<Eigen::Index>(sel.size());

    ForecastRun out;
    out.evaluated = sel;
    out.total_univariate = Eigen::VectorXd::Zero(ns);
    ChainState carry;
    bool have_carry = false;

    for (Eigen::Index w = 0; w < cfg.windows; ++w) {
        const Eigen::Index t_target = cfg.first_obs + w;
        const Eigen::MatrixXd window = raw.topRows(t_target);
        const Dataset data = build_dataset(window, p);
        const Eigen::VectorXd x_next = next_regressor(window, p);
        const Eigen::VectorXd y_next = raw.row(t_target).transpose();

        RunOptions opts;
        opts.burn = have_carry ? cfg.burn_warm : cfg.burn_first;
        opts.draws = cfg.draws;
        opts.thin = cfg.thin;
        opts.seed = derive_seed(cfg.seed, static_cast<std::uint64_t>(w), 0, 0xE);
        opts.full_b_limit = 0; // scored on the fly, no full draw storage
        ChainState warm;
        if (have_carry) {
            warm = extend_state(carry);
            opts.warm_start = &warm;
        }

        Eigen::VectorXd joint_ld(cfg.draws);
        Eigen::MatrixXd uni_ld(cfg.draws, ns);
        Eigen::VectorXd hf_next(q), hidio_next(m);
        opts.on_draw = [&](const ChainState& st, Eigen::Index dr) {
            RandomStream rr(derive_seed(cfg.seed, static_cast<std::uint64_t>(w),
                                        static_cast<std::uint64_t>(dr), 0xF));
            for (Eigen::Index i = 0; i < m; ++i)
                hidio_next[i] = sv_forecast_step(st.sv_idio[static_cast<std::size_t>(i)], rr);
            for (Eigen::Index j = 0; j < q; ++j)
                hf_next[j] = sv_forecast_step(st.sv_factor[static_cast<std::size_t>(j)], rr);
            joint_ld[dr] = predictive_logdensity(st.B, st.Lambda, hf_next, hidio_next, x_next,
                                                 y_next, cfg.subset);
            for (Eigen::Index i = 0; i < ns; ++i)
                uni_ld(dr, i) = predictive_logdensity(st.B, st.Lambda, hf_next, hidio_next, x_next,
                                                      y_next, {sel[static_cast<std::size_t>(i)]});
        };

        RunResult res = run_chain(spec, data, opts);

        WindowScores ws;
        ws.t_forecast = t_target;
        ws.joint = log_predictive_score(joint_ld);
        ws.univariate.resize(ns);
        for (Eigen::Index i = 0; i < ns; ++i)
            ws.univariate[i] = log_predictive_score(uni_ld.col(i));
        out.total_joint += ws.joint;
        out.total_univariate += ws.univariate;
        out.windows.push_back(std::move(ws));

        carry = std::move(res.final_state);
        have_carry = true;
    }
    return out;
}

} // namespace bvarfsv
