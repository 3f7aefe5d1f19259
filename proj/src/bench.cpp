#include "bvarfsv/bench.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <stdexcept>

namespace bvarfsv {

namespace {

double median_of(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    const std::size_t n = v.size();
    return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

EquationDesign synthetic_equation(Eigen::Index k, Eigen::Index T, std::uint64_t seed) {
    RandomStream rng(seed);
    EquationDesign d;
    d.X.resize(T, k);
    for (Eigen::Index t = 0; t < T; ++t)
        for (Eigen::Index j = 0; j < k; ++j) d.X(t, j) = rng.normal();
    d.z.resize(T);
    for (Eigen::Index t = 0; t < T; ++t) d.z[t] = rng.normal();
    d.phi.resize(k);
    for (Eigen::Index j = 0; j < k; ++j) d.phi[j] = 0.5 + rng.uniform();
    return d;
}

} // namespace

double time_equation_draw(Eigen::Index k, Eigen::Index T, RowStrategy strat, int sweeps,
                          int warmup, std::uint64_t seed) {
    if (sweeps < 1 || warmup < 0)
        throw std::invalid_argument("time_equation_draw: need sweeps >= 1 and warmup >= 0");
    const EquationDesign d = synthetic_equation(
        k, T, derive_seed(seed, 1, static_cast<std::uint64_t>(k), static_cast<std::uint64_t>(T)));
    RandomStream rng(
        derive_seed(seed, 2, static_cast<std::uint64_t>(k), static_cast<std::uint64_t>(T)));
    std::vector<double> times;
    times.reserve(static_cast<std::size_t>(sweeps));
    double sink = 0.0;
    for (int it = 0; it < warmup + sweeps; ++it) {
        const auto t0 = std::chrono::steady_clock::now();
        sink += sample_row(d, strat, rng).sum();
        const auto t1 = std::chrono::steady_clock::now();
        if (it >= warmup) times.push_back(std::chrono::duration<double>(t1 - t0).count());
    }
    if (!std::isfinite(sink)) throw std::runtime_error("time_equation_draw: draws went non-finite");
    return median_of(times);
}

double time_sweep(const ModelSpec& spec, Eigen::Index T, int sweeps, int warmup,
                  std::uint64_t seed) {
    if (sweeps < 1 || warmup < 0)
        throw std::invalid_argument("time_sweep: need sweeps >= 1 and warmup >= 0");
    RandomStream rng(derive_seed(seed, 3, static_cast<std::uint64_t>(spec.m),
                                 static_cast<std::uint64_t>(T)));
    Eigen::MatrixXd raw(T + spec.p, spec.m);
    for (Eigen::Index t = 0; t < raw.rows(); ++t)
        for (Eigen::Index i = 0; i < spec.m; ++i) raw(t, i) = rng.normal();
    const Dataset data = build_dataset(raw, spec.p);
    ChainState state = init_chain(spec, data, rng);
    std::vector<double> times;
    times.reserve(static_cast<std::size_t>(sweeps));
    std::uint64_t sweep = 0;
    for (int it = 0; it < warmup + sweeps; ++it) {
        const auto t0 = std::chrono::steady_clock::now();
        gibbs_sweep(state, spec, data, seed, sweep++);
        const auto t1 = std::chrono::steady_clock::now();
        if (it >= warmup) times.push_back(std::chrono::duration<double>(t1 - t0).count());
    }
    return median_of(times);
}

double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size() || x.size() < 2)
        throw std::invalid_argument("loglog_slope: need two or more matched points");
    const std::size_t n = x.size();
    double mx = 0.0, my = 0.0;
    std::vector<double> lx(n), ly(n);
    for (std::size_t i = 0; i < n; ++i) {
        if (!(x[i] > 0.0) || !(y[i] > 0.0))
            throw std::invalid_argument("loglog_slope: points must be strictly positive");
        lx[i] = std::log(x[i]);
        ly[i] = std::log(y[i]);
        mx += lx[i];
        my += ly[i];
    }
    mx /= static_cast<double>(n);
    my /= static_cast<double>(n);
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        sxx += (lx[i] - mx) * (lx[i] - mx);
        sxy += (lx[i] - mx) * (ly[i] - my);
    }
    if (!(sxx > 0.0)) throw std::invalid_argument("loglog_slope: x values are all equal");
    return sxy / sxx;
}

} // namespace bvarfsv
