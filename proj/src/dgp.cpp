#include "bvarfsv/dgp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "bvarfsv/errors.hpp"
#include "bvarfsv/stochvol.hpp"

namespace bvarfsv {

namespace {

struct DensityParams {
    double p_off;
    double mean_diag, sd_diag;
    double mean_off, sd_off;
};

DensityParams density_params(Density d) {
    switch (d) {
        case Density::Sparse: return {0.01, 0.30, 0.30, 0.30, 0.30};
        case Density::Intermediate: return {0.10, 0.15, 0.15, 0.10, 0.10};
        case Density::Dense: return {0.80, 0.15, 0.15, 0.01, 0.01};
    }
    throw std::invalid_argument("density_params: unknown regime");
}

double spectral_radius(const Eigen::MatrixXd& A) {
    return A.eigenvalues().cwiseAbs().maxCoeff();
}

} // namespace

const char* density_name(Density d) {
    switch (d) {
        case Density::Sparse: return "sparse";
        case Density::Intermediate: return "intermediate";
        case Density::Dense: return "dense";
    }
    return "unknown";
}

Eigen::MatrixXd generate_coefficients(Eigen::Index m, Density density, RandomStream& rng) {
    if (m < 1) throw std::invalid_argument("generate_coefficients: need m >= 1");
    const DensityParams dp = density_params(density);
    for (int attempt = 0; attempt < 1000; ++attempt) {
        Eigen::MatrixXd coef = Eigen::MatrixXd::Zero(m, m + 1);
        for (Eigen::Index i = 0; i < m; ++i) {
            for (Eigen::Index j = 0; j < m; ++j) {
                if (i == j) {
                    if (rng.uniform() < 0.8) coef(i, j) = dp.mean_diag + dp.sd_diag * rng.normal();
                } else {
                    if (rng.uniform() < dp.p_off) coef(i, j) = dp.mean_off + dp.sd_off * rng.normal();
                }
            }
            if (rng.uniform() < 0.1) coef(i, m) = 0.01 + 0.01 * rng.normal();
        }
        if (spectral_radius(coef.leftCols(m)) < 0.99) return coef;
    }
    throw NumericalError("generate_coefficients: no stable draw in 1000 attempts");
}

DgpDraw generate_dataset(const DgpConfig& cfg, RandomStream& rng) {
    if (cfg.T < 1 || cfg.warmup < 0)
        throw std::invalid_argument("generate_dataset: need T >= 1 and warmup >= 0");
    const Eigen::Index m = cfg.m;
    DgpDraw out;
    out.coef = generate_coefficients(m, cfg.density, rng);
    out.lambda.resize(m);
    for (Eigen::Index i = 0; i < m; ++i) out.lambda[i] = 0.001 + 0.001 * rng.normal();

    const Eigen::Index steps = cfg.warmup + cfg.T + 1;
    Eigen::MatrixXd h_idio(steps, m);
    for (Eigen::Index i = 0; i < m; ++i) {
        const double rho = 0.85 + 0.13 * rng.uniform();
        const double sig = 0.1 + 0.2 * rng.uniform();
        h_idio.col(i) = sv_simulate_path(-12.0, rho, sig * sig, steps, rng);
    }
    Eigen::VectorXd h_fac = sv_simulate_path(0.0, 0.99, 0.01, steps, rng);

    const Eigen::MatrixXd A = out.coef.leftCols(m);
    const Eigen::VectorXd c = out.coef.col(m);
    Eigen::VectorXd y = Eigen::VectorXd::Zero(m);
    Eigen::MatrixXd raw(cfg.T + 1, m);
    for (Eigen::Index t = 0; t < steps; ++t) {
        const double f = std::exp(0.5 * h_fac[t]) * rng.normal();
        Eigen::VectorXd next = A * y + c + out.lambda * f;
        for (Eigen::Index i = 0; i < m; ++i)
            next[i] += std::exp(0.5 * h_idio(t, i)) * rng.normal();
        y = next;
        if (t >= cfg.warmup) raw.row(t - cfg.warmup) = y.transpose();
    }
    out.raw = raw;
    return out;
}

double rmse(const Eigen::MatrixXd& estimate, const Eigen::MatrixXd& truth) {
    if (estimate.rows() != truth.rows() || estimate.cols() != truth.cols())
        throw std::invalid_argument("rmse: shape mismatch");
    return std::sqrt((estimate - truth).squaredNorm() / static_cast<double>(truth.size()));
}

bool ols_estimate(const Dataset& data, Eigen::MatrixXd& out) {
    const Eigen::Index T = data.X.rows(), k = data.X.cols(), m = data.Y.cols();
    if (k >= T) return false;
    Eigen::MatrixXd gram = data.X.transpose() * data.X;
    Eigen::LLT<Eigen::MatrixXd> llt(gram);
    if (llt.info() != Eigen::Success) return false;
    out.resize(m, k);
    for (Eigen::Index i = 0; i < m; ++i)
        out.row(i) = llt.solve(data.X.transpose() * data.Y.col(i)).transpose();
    return true;
}

std::vector<StudyEstimator> study_estimators(Eigen::Index m) {
    const double invK = 1.0 / static_cast<double>(m * (m + 1));
    return {
        {"dl-half", false, {ShrinkageKind::DirichletLaplace, 0.5}},
        {"dl-inv-k", false, {ShrinkageKind::DirichletLaplace, invK}},
        {"ng-1", false, {ShrinkageKind::NormalGamma, 1.0}},
        {"ng-0.1", false, {ShrinkageKind::NormalGamma, 0.1}},
        {"minn-1e-3", false, {ShrinkageKind::Minnesota, 0.001}},
        {"minn-1e-4", false, {ShrinkageKind::Minnesota, 0.0001}},
        {"ols", true, {}},
    };
}

CellResult run_scenario_cell(const DgpConfig& cfg, Eigen::Index reps, Eigen::Index mcmc_burn,
                             Eigen::Index mcmc_draws, std::uint64_t seed,
                             const std::vector<std::size_t>& active) {
    if (reps < 1) throw std::invalid_argument("run_scenario_cell: need at least one replicate");
    const auto estimators = study_estimators(cfg.m);
    std::vector<bool> run_it(estimators.size(), active.empty());
    for (std::size_t e : active) {
        if (e >= estimators.size())
            throw std::invalid_argument("run_scenario_cell: estimator index out of range");
        run_it[e] = true;
    }
    if (!active.empty()) {
        for (std::size_t e = 0; e < estimators.size(); ++e)
            if (estimators[e].name == "dl-inv-k") run_it[e] = true;
    }
    CellResult res;
    res.scenario = density_name(cfg.density);
    res.m = cfg.m;
    res.T = cfg.T;
    res.reps = reps;
    for (const auto& e : estimators) res.names.push_back(e.name);
    res.rep_rmse.assign(estimators.size(), std::vector<double>());

    for (Eigen::Index rep = 0; rep < reps; ++rep) {
        RandomStream gen(derive_seed(seed, 1000 + static_cast<std::uint64_t>(rep), 0, 0));
        DgpDraw draw = generate_dataset(cfg, gen);
        Dataset data = build_dataset(draw.raw, 1);

        for (std::size_t e = 0; e < estimators.size(); ++e) {
            double err = std::numeric_limits<double>::quiet_NaN();
            if (!run_it[e]) {
                res.rep_rmse[e].push_back(err);
                continue;
            }
            if (estimators[e].is_ols) {
                Eigen::MatrixXd bhat;
                if (ols_estimate(data, bhat)) err = rmse(bhat, draw.coef);
            } else {
                ModelSpec spec;
                spec.m = cfg.m;
                spec.p = 1;
                spec.q = 1;
                spec.shrink = estimators[e].shrink;
                RunOptions opts;
                opts.burn = mcmc_burn;
                opts.draws = mcmc_draws;
                opts.seed = derive_seed(seed, static_cast<std::uint64_t>(rep),
                                        static_cast<std::uint64_t>(e) + 1, 7);
                RunResult run = run_chain(spec, data, opts);
                Eigen::VectorXd est = run.store.b_mean();
                Eigen::MatrixXd bhat(cfg.m, cfg.m + 1);
                for (Eigen::Index i = 0; i < cfg.m; ++i)
                    bhat.row(i) = est.segment(i * (cfg.m + 1), cfg.m + 1).transpose();
                err = rmse(bhat, draw.coef);
            }
            res.rep_rmse[e].push_back(err);
        }
    }

    res.median_rmse.resize(estimators.size());
    std::size_t pivot = 0;
    for (std::size_t e = 0; e < estimators.size(); ++e) {
        if (estimators[e].name == "dl-inv-k") pivot = e;
        std::vector<double> v = res.rep_rmse[e];
        bool any_nan = false;
        for (double x : v)
            if (!std::isfinite(x)) any_nan = true;
        if (any_nan || v.empty()) {
            res.median_rmse[e] = std::numeric_limits<double>::quiet_NaN();
            continue;
        }
        std::sort(v.begin(), v.end());
        const std::size_t n = v.size();
        res.median_rmse[e] = n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
    }
    res.relative.resize(estimators.size());
    for (std::size_t e = 0; e < estimators.size(); ++e)
        res.relative[e] = res.median_rmse[e] / res.median_rmse[pivot];
    return res;
}

} // namespace bvarfsv
