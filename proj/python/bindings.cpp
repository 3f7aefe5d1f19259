#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <stdexcept>

#include "bvarfsv/dataio.hpp"
#include "bvarfsv/dgp.hpp"
#include "bvarfsv/dists.hpp"
#include "bvarfsv/engine.hpp"
#include "bvarfsv/forecast.hpp"
#include "bvarfsv/gausslin.hpp"

namespace py = pybind11;
using namespace bvarfsv;

namespace {

using RowMat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

ShrinkageConfig make_shrink(const std::string& kind, double hyper) {
    if (kind == "dl") return {ShrinkageKind::DirichletLaplace, hyper};
    if (kind == "ng") return {ShrinkageKind::NormalGamma, hyper};
    if (kind == "minnesota") return {ShrinkageKind::Minnesota, hyper};
    throw std::invalid_argument("shrinkage kind must be dl, ng, or minnesota");
}

Density make_density(const std::string& s) {
    if (s == "sparse") return Density::Sparse;
    if (s == "intermediate") return Density::Intermediate;
    if (s == "dense") return Density::Dense;
    throw std::invalid_argument("density must be sparse, intermediate, or dense");
}

Eigen::MatrixXd unflatten(const Eigen::VectorXd& v, Eigen::Index rows, Eigen::Index cols) {
    return Eigen::Map<const RowMat>(v.data(), rows, cols);
}

} // namespace

PYBIND11_MODULE(_core, mod) {
    mod.doc() = "Bayesian vector autoregressions with factor stochastic volatility";

    py::class_<RandomStream>(mod, "RandomStream")
        .def(py::init<std::uint64_t>(), py::arg("seed"))
        .def("normal", [](RandomStream& r) { return r.normal(); })
        .def("uniform", [](RandomStream& r) { return r.uniform(); });

    mod.def(
        "sample_gig",
        [](double lam, double rho, double chi, Eigen::Index n, std::uint64_t seed) {
            RandomStream rng(seed);
            Eigen::VectorXd out(n);
            for (Eigen::Index i = 0; i < n; ++i) out[i] = sample_gig({lam, rho, chi}, rng);
            return out;
        },
        py::arg("lam"), py::arg("rho"), py::arg("chi"), py::arg("n") = 1, py::arg("seed") = 1);

    mod.def(
        "sample_inverse_gaussian",
        [](double mean, double shape, Eigen::Index n, std::uint64_t seed) {
            RandomStream rng(seed);
            Eigen::VectorXd out(n);
            for (Eigen::Index i = 0; i < n; ++i)
                out[i] = sample_inverse_gaussian({mean, shape}, rng);
            return out;
        },
        py::arg("mean"), py::arg("shape"), py::arg("n") = 1, py::arg("seed") = 1);

    mod.def("state_dimension", &state_dimension, py::arg("m"), py::arg("p"), py::arg("q"),
            py::arg("T"));

    mod.def(
        "select_strategy",
        [](Eigen::Index k, Eigen::Index T) {
            return select_strategy(k, T) == RowStrategy::Fast ? "fast" : "dense";
        },
        py::arg("k"), py::arg("T"));

    mod.def(
        "sample_coefficient_row",
        [](const Eigen::MatrixXd& X, const Eigen::VectorXd& z, const Eigen::VectorXd& phi,
           const std::string& strategy, std::uint64_t seed) {
            EquationDesign d{X, z, phi};
            RandomStream rng(seed);
            if (strategy == "fast") return sample_row(d, RowStrategy::Fast, rng);
            if (strategy == "dense") return sample_row(d, RowStrategy::Dense, rng);
            throw std::invalid_argument("strategy must be fast or dense");
        },
        py::arg("X"), py::arg("z"), py::arg("phi"), py::arg("strategy") = "fast",
        py::arg("seed") = 1);

    mod.def(
        "build_dataset",
        [](const Eigen::MatrixXd& raw, Eigen::Index p) {
            const Dataset d = build_dataset(raw, p);
            return py::make_tuple(d.X, d.Y);
        },
        py::arg("raw"), py::arg("p"));

    mod.def(
        "generate_coefficients",
        [](Eigen::Index m, const std::string& density, std::uint64_t seed) {
            RandomStream rng(seed);
            return generate_coefficients(m, make_density(density), rng);
        },
        py::arg("m"), py::arg("density") = "sparse", py::arg("seed") = 1);

    mod.def(
        "generate_dataset",
        [](Eigen::Index m, Eigen::Index T, const std::string& density, std::uint64_t seed) {
            DgpConfig cfg;
            cfg.m = m;
            cfg.T = T;
            cfg.density = make_density(density);
            RandomStream rng(seed);
            const DgpDraw draw = generate_dataset(cfg, rng);
            py::dict out;
            out["coef"] = draw.coef;
            out["raw"] = draw.raw;
            out["loadings"] = draw.lambda;
            return out;
        },
        py::arg("m"), py::arg("T"), py::arg("density") = "sparse", py::arg("seed") = 1);

    mod.def("rmse", &rmse, py::arg("estimate"), py::arg("truth"));

    mod.def("log_predictive_score", &log_predictive_score, py::arg("logdens"));

    mod.def(
        "apply_transform",
        [](const Eigen::VectorXd& series, int tcode, const std::string& name) {
            return apply_transform(series, tcode, name);
        },
        py::arg("series"), py::arg("tcode"), py::arg("name") = "series");

    mod.def(
        "fit",
        [](const Eigen::MatrixXd& raw, Eigen::Index p, Eigen::Index q, const std::string& kind,
           double hyper, Eigen::Index burn, Eigen::Index draws, std::uint64_t seed) {
            ModelSpec spec;
            spec.m = raw.cols();
            spec.p = p;
            spec.q = q;
            spec.shrink = make_shrink(kind, hyper);
            const Dataset data = build_dataset(raw, p);
            RunOptions opts;
            opts.burn = burn;
            opts.draws = draws;
            opts.seed = seed;
            const RunResult run = run_chain(spec, data, opts);
            const Eigen::Index m = spec.m, k = data.X.cols(), n = run.store.draws();
            py::dict out;
            out["draws"] = n;
            out["b_mean"] = unflatten(run.store.b_mean(), m, k);
            out["b_sd"] = unflatten(run.store.b_sd(), m, k);
            if (q > 0) {
                const Eigen::VectorXd lm =
                    run.store.lambda_draws().topRows(n).colwise().mean().transpose();
                out["loadings_mean"] = unflatten(lm, m, q);
            }
            const Eigen::VectorXd sv =
                run.store.sv_param_draws().topRows(n).colwise().mean().transpose();
            out["sv_params_mean"] = unflatten(sv, m + q, 3);
            return out;
        },
        py::arg("raw"), py::arg("p") = 1, py::arg("q") = 0, py::arg("shrinkage") = "dl",
        py::arg("hyper") = 0.5, py::arg("burn") = 1000, py::arg("draws") = 2000,
        py::arg("seed") = 1);

    mod.def(
        "expanding_window_scores",
        [](const Eigen::MatrixXd& raw, Eigen::Index p, Eigen::Index q, const std::string& kind,
           double hyper, Eigen::Index first_obs, Eigen::Index windows, Eigen::Index burn_first,
           Eigen::Index burn_warm, Eigen::Index draws, std::uint64_t seed) {
            ForecastConfig fc;
            fc.spec.m = raw.cols();
            fc.spec.p = p;
            fc.spec.q = q;
            fc.spec.shrink = make_shrink(kind, hyper);
            fc.first_obs = first_obs;
            fc.windows = windows;
            fc.burn_first = burn_first;
            fc.burn_warm = burn_warm;
            fc.draws = draws;
            fc.seed = seed;
            const ForecastRun run = expanding_window_run(raw, fc);
            py::dict out;
            out["total_joint"] = run.total_joint;
            out["total_univariate"] = run.total_univariate;
            std::vector<double> joints;
            std::vector<Eigen::Index> t_forecast;
            for (const auto& w : run.windows) {
                joints.push_back(w.joint);
                t_forecast.push_back(w.t_forecast);
            }
            out["joint"] = joints;
            out["t_forecast"] = t_forecast;
            return out;
        },
        py::arg("raw"), py::arg("p") = 1, py::arg("q") = 0, py::arg("shrinkage") = "dl",
        py::arg("hyper") = 0.5, py::arg("first_obs") = 80, py::arg("windows") = 8,
        py::arg("burn_first") = 1000, py::arg("burn_warm") = 500, py::arg("draws") = 1000,
        py::arg("seed") = 1);
}
