#include "bvarfsv/engine.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "bvarfsv/errors.hpp"

namespace bvarfsv {

namespace {

Eigen::Index coef_per_eq(const ModelSpec& spec) { return spec.m * spec.p + 1; }

void require_finite(bool ok, std::uint64_t sweep, const char* block) {
    if (!ok) {
        std::ostringstream os;
        os << "gibbs_sweep " << sweep << ": non-finite draw in the " << block << " block";
        throw NumericalError(os.str());
    }
}

// sub-stream ids for seed derivation
enum Block : std::uint64_t {
    kCoef = 1,
    kShrink = 2,
    kFactors = 3,
    kLoadings = 4,
    kSvIdio = 5,
    kSvFactor = 6,
};

} // namespace

Eigen::Index state_dimension(Eigen::Index m, Eigen::Index p, Eigen::Index q, Eigen::Index T) {
    if (m < 1 || p < 0 || q < 0 || T < 0)
        throw std::invalid_argument("state_dimension: need m >= 1 and nonnegative p, q, T");
    const Eigen::Index K = m + m * m * p;
    return K + (2 * K + 1) + q * T + m * q + (T + 1) * (m + q) + (3 * m + 2 * q);
}

Eigen::MatrixXd fixed_ar_matrix(Eigen::Index m, Eigen::Index p, double c) {
    if (m < 1 || p < 1) throw std::invalid_argument("fixed_ar_matrix: need m >= 1 and p >= 1");
    Eigen::MatrixXd B = Eigen::MatrixXd::Zero(m, m * p + 1);
    for (Eigen::Index i = 0; i < m; ++i) B(i, i) = c;
    return B;
}

Dataset build_dataset(const Eigen::MatrixXd& raw, Eigen::Index p) {
    const Eigen::Index total = raw.rows(), m = raw.cols();
    if (p < 1) throw std::invalid_argument("build_dataset: need at least one lag");
    if (total <= p)
        throw std::invalid_argument("build_dataset: panel shorter than the lag order");
    const Eigen::Index T = total - p;
    Dataset d;
    d.X.resize(T, m * p + 1);
    d.Y = raw.bottomRows(T);
    for (Eigen::Index t = 0; t < T; ++t) {
        for (Eigen::Index l = 0; l < p; ++l)
            d.X.block(t, l * m, 1, m) = raw.row(t + p - 1 - l);
        d.X(t, m * p) = 1.0;
    }
    return d;
}

Eigen::VectorXd flatten_coefficients(const Eigen::MatrixXd& B) {
    Eigen::VectorXd b(B.size());
    const Eigen::Index m = B.rows(), k = B.cols();
    for (Eigen::Index i = 0; i < m; ++i) b.segment(i * k, k) = B.row(i).transpose();
    return b;
}

ChainState init_chain(const ModelSpec& spec, const Dataset& data, RandomStream& rng) {
    const Eigen::Index m = spec.m, q = spec.q, T = data.Y.rows(), k = coef_per_eq(spec);
    if (data.Y.cols() != m || data.X.cols() != k)
        throw std::invalid_argument("init_chain: dataset does not match the model dimensions");

    ChainState s;
    if (spec.fixed_coef) {
        if (spec.fixed_coef->rows() != m || spec.fixed_coef->cols() != k)
            throw std::invalid_argument("init_chain: fixed_coef must be m x (m p + 1)");
        s.B = *spec.fixed_coef;
    } else {
        s.B = Eigen::MatrixXd::Zero(m, k);
    }
    const Eigen::Index K = m * k;
    switch (spec.shrink.kind) {
        case ShrinkageKind::DirichletLaplace: s.shrink = dl_init(spec.shrink.hyper, K); break;
        case ShrinkageKind::NormalGamma: s.shrink = ng_init(spec.shrink.hyper, K); break;
        case ShrinkageKind::Minnesota: s.shrink = MinnesotaState{spec.shrink.hyper, 2.0}; break;
    }
    s.Lambda.resize(m, q);
    for (Eigen::Index i = 0; i < m; ++i)
        for (Eigen::Index j = 0; j < q; ++j) s.Lambda(i, j) = 0.1 * rng.normal();
    s.f = Eigen::MatrixXd::Zero(T, q);

    s.sv_idio.resize(static_cast<std::size_t>(m));
    for (Eigen::Index i = 0; i < m; ++i) {
        auto& b = s.sv_idio[static_cast<std::size_t>(i)];
        double v = T > 1 ? (data.Y.col(i).array() - data.Y.col(i).mean()).square().sum() /
                               static_cast<double>(T - 1)
                         : 1.0;
        if (!(v > 1e-12)) v = 1e-12;
        b.mu = std::log(v);
        b.rho = 0.9;
        b.sigma2 = 0.01;
        b.h = Eigen::VectorXd::Constant(T, b.mu);
    }
    s.sv_factor.resize(static_cast<std::size_t>(q));
    for (Eigen::Index j = 0; j < q; ++j) {
        auto& b = s.sv_factor[static_cast<std::size_t>(j)];
        b.mu_fixed = true;
        b.mu = 0.0;
        b.rho = 0.9;
        b.sigma2 = 0.01;
        b.h = Eigen::VectorXd::Zero(T);
    }
    return s;
}

void gibbs_sweep(ChainState& state, const ModelSpec& spec, const Dataset& data,
                 std::uint64_t master_seed, std::uint64_t sweep_index) {
    const Eigen::Index m = spec.m, q = spec.q, T = data.Y.rows(), k = coef_per_eq(spec);
    if (state.B.rows() != m || state.B.cols() != k || state.f.rows() != T ||
        state.Lambda.cols() != q)
        throw std::invalid_argument("gibbs_sweep: state does not match the model dimensions");

    // coefficients, equation by equation, on common-component-removed data
    // with rows weighted by the idiosyncratic volatilities; pinned coefficients
    // skip both this block and the shrinkage auxiliaries
    if (!spec.fixed_coef) {
        Eigen::MatrixXd common = state.f * state.Lambda.transpose(); // T x m
        EquationDesign d;
        d.X.resize(T, k);
        d.z.resize(T);
        double s_zu = 0.0, s_uu = 0.0;
        for (Eigen::Index i = 0; i < m; ++i) {
            const auto& h = state.sv_idio[static_cast<std::size_t>(i)].h;
            for (Eigen::Index t = 0; t < T; ++t) {
                const double w = bounded_exp(-0.5 * h[t]);
                d.X.row(t) = data.X.row(t) * w;
                d.z[t] = (data.Y(t, i) - common(t, i)) * w;
            }
            d.phi = phi_for_equation(state.shrink, i, m, spec.p, true);
            RandomStream rr(derive_seed(master_seed, sweep_index, kCoef, static_cast<std::uint64_t>(i)));
            const RowStrategy strat = select_strategy(k, T, spec.rows);
            state.B.row(i) = sample_row(d, strat, rr).transpose();
            const Eigen::VectorXd u = d.X * state.B.row(i).transpose();
            s_zu += d.z.dot(u);
            s_uu += u.squaredNorm();
        }
        require_finite(state.B.allFinite(), sweep_index, "coefficient");

        RandomStream rr(derive_seed(master_seed, sweep_index, kShrink, 0));
        Eigen::VectorXd b = flatten_coefficients(state.B);
        if (auto* dl = std::get_if<DlState>(&state.shrink)) {
            dl_update(b, *dl, rr);
            state.B *= dl_scale_move(*dl, s_zu, s_uu, 0.3, rr);
            require_finite(dl->psi.allFinite() && dl->theta.allFinite() &&
                               std::isfinite(dl->zeta),
                           sweep_index, "shrinkage");
        } else if (auto* ng = std::get_if<NgState>(&state.shrink)) {
            ng_update(b, *ng, rr);
            require_finite(ng->tau2.allFinite() && std::isfinite(ng->lambda_glob), sweep_index,
                           "shrinkage");
        }
    }

    Eigen::MatrixXd eps = data.Y - data.X * state.B.transpose(); // T x m

    Eigen::MatrixXd hidio(T, m), hf(T, q);
    for (Eigen::Index i = 0; i < m; ++i) hidio.col(i) = state.sv_idio[static_cast<std::size_t>(i)].h;
    for (Eigen::Index j = 0; j < q; ++j) hf.col(j) = state.sv_factor[static_cast<std::size_t>(j)].h;

    if (q > 0) {
        {
            RandomStream rr(derive_seed(master_seed, sweep_index, kFactors, 0));
            state.f = sample_factors(eps, state.Lambda, hf, hidio, rr);
            require_finite(state.f.allFinite(), sweep_index, "factor");
        }
        {
            RandomStream rr(derive_seed(master_seed, sweep_index, kLoadings, 0));
            sample_loadings(eps, state.f, hidio, state.Lambda, rr);
            require_finite(state.Lambda.allFinite(), sweep_index, "loading");
        }
    }

    // volatilities: idiosyncratic blocks see the fully cleaned residuals,
    // factor blocks see the factors themselves
    Eigen::MatrixXd eta = eps - state.f * state.Lambda.transpose();
    for (Eigen::Index i = 0; i < m; ++i) {
        auto& blk = state.sv_idio[static_cast<std::size_t>(i)];
        RandomStream rr(derive_seed(master_seed, sweep_index, kSvIdio, static_cast<std::uint64_t>(i)));
        sample_sv_path(eta.col(i), blk, rr);
        sample_sv_params(blk, spec.sv, rr);
        require_finite(blk.h.allFinite() && std::isfinite(blk.mu) && std::isfinite(blk.sigma2),
                       sweep_index, "idiosyncratic volatility");
    }
    for (Eigen::Index j = 0; j < q; ++j) {
        auto& blk = state.sv_factor[static_cast<std::size_t>(j)];
        RandomStream rr(
            derive_seed(master_seed, sweep_index, kSvFactor, static_cast<std::uint64_t>(j)));
        sample_sv_path(state.f.col(j), blk, rr);
        sample_sv_params(blk, spec.sv, rr);
        require_finite(blk.h.allFinite() && std::isfinite(blk.sigma2), sweep_index,
                       "factor volatility");
    }
}

P2Quantile::P2Quantile(double prob) : prob_(prob) {
    for (int i = 0; i < 5; ++i) q_[i] = n_[i] = np_[i] = dn_[i] = 0.0;
    dn_[0] = 0.0;
    dn_[1] = prob / 2.0;
    dn_[2] = prob;
    dn_[3] = (1.0 + prob) / 2.0;
    dn_[4] = 1.0;
}

void P2Quantile::add(double x) {
    if (count_ < 5) {
        q_[count_++] = x;
        if (count_ == 5) {
            std::sort(q_, q_ + 5);
            for (int i = 0; i < 5; ++i) n_[i] = i + 1;
            for (int i = 0; i < 5; ++i) np_[i] = 1.0 + 4.0 * dn_[i];
        }
        return;
    }
    int cell;
    if (x < q_[0]) {
        q_[0] = x;
        cell = 0;
    } else if (x >= q_[4]) {
        q_[4] = x;
        cell = 3;
    } else {
        cell = 0;
        while (cell < 3 && x >= q_[cell + 1]) ++cell;
    }
    for (int i = cell + 1; i < 5; ++i) n_[i] += 1.0;
    for (int i = 0; i < 5; ++i) np_[i] += dn_[i];
    ++count_;

    for (int i = 1; i <= 3; ++i) {
        const double gap = np_[i] - n_[i];
        if ((gap >= 1.0 && n_[i + 1] - n_[i] > 1.0) || (gap <= -1.0 && n_[i - 1] - n_[i] < -1.0)) {
            const double s = gap >= 1.0 ? 1.0 : -1.0;
            const double parab =
                q_[i] + s / (n_[i + 1] - n_[i - 1]) *
                            ((n_[i] - n_[i - 1] + s) * (q_[i + 1] - q_[i]) / (n_[i + 1] - n_[i]) +
                             (n_[i + 1] - n_[i] - s) * (q_[i] - q_[i - 1]) / (n_[i] - n_[i - 1]));
            if (q_[i - 1] < parab && parab < q_[i + 1]) {
                q_[i] = parab;
            } else {
                const int j = i + static_cast<int>(s);
                q_[i] = q_[i] + s * (q_[j] - q_[i]) / (n_[j] - n_[i]);
            }
            n_[i] += s;
        }
    }
}

double P2Quantile::value() const {
    if (count_ == 0) return 0.0;
    if (count_ < 5) {
        double tmp[5];
        std::copy(q_, q_ + count_, tmp);
        std::sort(tmp, tmp + count_);
        const double pos = prob_ * static_cast<double>(count_ - 1);
        const int lo = static_cast<int>(pos);
        const int hi = std::min<int>(lo + 1, static_cast<int>(count_) - 1);
        return tmp[lo] + (pos - lo) * (tmp[hi] - tmp[lo]);
    }
    return q_[2];
}

const double ScalarSketch::kLevels[5] = {0.05, 0.25, 0.50, 0.75, 0.95};

ScalarSketch::ScalarSketch()
    : qs_{P2Quantile(kLevels[0]), P2Quantile(kLevels[1]), P2Quantile(kLevels[2]),
          P2Quantile(kLevels[3]), P2Quantile(kLevels[4])} {}

void ScalarSketch::add(double x) {
    ++n_;
    const double d = x - m1_;
    m1_ += d / static_cast<double>(n_);
    m2_ += d * (x - m1_);
    for (auto& q : qs_) q.add(x);
}

double ScalarSketch::quantile(int which) const { return qs_[which].value(); }

DrawStore::DrawStore(const ModelSpec& spec, Eigen::Index T, Eigen::Index expected_draws,
                     Eigen::Index full_b_limit)
    : m_(spec.m), k_(spec.m * spec.p + 1), q_(spec.q), T_(T), full_b_(spec.m <= full_b_limit) {
    b_sketch_.resize(static_cast<std::size_t>(m_ * k_));
    h_sketch_.resize(static_cast<std::size_t>(T_ * m_));
    if (full_b_) b_draws_.resize(expected_draws, m_ * k_);
    lambda_draws_.resize(expected_draws, m_ * q_);
    fh_draws_.resize(expected_draws, T_ * q_);
    sv_draws_.resize(expected_draws, 3 * (m_ + q_));
}

void DrawStore::record(const ChainState& state) {
    const Eigen::Index K = m_ * k_;
    Eigen::VectorXd b = flatten_coefficients(state.B);
    for (Eigen::Index j = 0; j < K; ++j) b_sketch_[static_cast<std::size_t>(j)].add(b[j]);
    for (Eigen::Index t = 0; t < T_; ++t)
        for (Eigen::Index i = 0; i < m_; ++i)
            h_sketch_[static_cast<std::size_t>(t * m_ + i)].add(
                state.sv_idio[static_cast<std::size_t>(i)].h[t]);

    if (recorded_ >= lambda_draws_.rows()) {
        const Eigen::Index grown = std::max<Eigen::Index>(2 * lambda_draws_.rows(), recorded_ + 1);
        if (full_b_) b_draws_.conservativeResize(grown, Eigen::NoChange);
        lambda_draws_.conservativeResize(grown, Eigen::NoChange);
        fh_draws_.conservativeResize(grown, Eigen::NoChange);
        sv_draws_.conservativeResize(grown, Eigen::NoChange);
    }
    if (full_b_) b_draws_.row(recorded_) = b.transpose();
    for (Eigen::Index i = 0; i < m_; ++i)
        lambda_draws_.row(recorded_).segment(i * q_, q_) = state.Lambda.row(i);
    for (Eigen::Index j = 0; j < q_; ++j)
        fh_draws_.row(recorded_).segment(j * T_, T_) =
            state.sv_factor[static_cast<std::size_t>(j)].h.transpose();
    for (Eigen::Index i = 0; i < m_; ++i) {
        const auto& blk = state.sv_idio[static_cast<std::size_t>(i)];
        sv_draws_(recorded_, 3 * i + 0) = blk.mu;
        sv_draws_(recorded_, 3 * i + 1) = blk.rho;
        sv_draws_(recorded_, 3 * i + 2) = blk.sigma2;
    }
    for (Eigen::Index j = 0; j < q_; ++j) {
        const auto& blk = state.sv_factor[static_cast<std::size_t>(j)];
        sv_draws_(recorded_, 3 * (m_ + j) + 0) = blk.mu;
        sv_draws_(recorded_, 3 * (m_ + j) + 1) = blk.rho;
        sv_draws_(recorded_, 3 * (m_ + j) + 2) = blk.sigma2;
    }
    ++recorded_;
}

Eigen::VectorXd DrawStore::b_mean() const {
    Eigen::VectorXd out(m_ * k_);
    for (Eigen::Index j = 0; j < out.size(); ++j) out[j] = b_sketch_[static_cast<std::size_t>(j)].mean();
    return out;
}

Eigen::VectorXd DrawStore::b_quantile(int which) const {
    Eigen::VectorXd out(m_ * k_);
    for (Eigen::Index j = 0; j < out.size(); ++j)
        out[j] = b_sketch_[static_cast<std::size_t>(j)].quantile(which);
    return out;
}

Eigen::VectorXd DrawStore::b_sd() const {
    Eigen::VectorXd out(m_ * k_);
    for (Eigen::Index j = 0; j < out.size(); ++j)
        out[j] = std::sqrt(b_sketch_[static_cast<std::size_t>(j)].variance());
    return out;
}

RunResult run_chain(const ModelSpec& spec, const Dataset& data, const RunOptions& opts) {
    if (opts.burn < 0 || opts.draws < 1 || opts.thin < 1)
        throw std::invalid_argument("run_chain: need burn >= 0, draws >= 1, thin >= 1");
    const Eigen::Index T = data.Y.rows();

    ChainState state;
    if (opts.warm_start) {
        state = *opts.warm_start;
        if (state.B.rows() != spec.m || state.f.rows() != T)
            throw std::invalid_argument("run_chain: warm start does not match the model");
    } else {
        RandomStream rng(derive_seed(opts.seed, 0, 0, 0));
        state = init_chain(spec, data, rng);
    }
    for (auto& b : state.sv_idio) b.adapting = opts.adapt;
    for (auto& b : state.sv_factor) b.adapting = opts.adapt;

    DrawStore store(spec, T, opts.draws, opts.full_b_limit);
    std::uint64_t sweep = 0;
    for (Eigen::Index it = 0; it < opts.burn; ++it) gibbs_sweep(state, spec, data, opts.seed, sweep++);
    for (auto& b : state.sv_idio) b.adapting = false;
    for (auto& b : state.sv_factor) b.adapting = false;
    for (Eigen::Index d = 0; d < opts.draws; ++d) {
        for (Eigen::Index s = 0; s < opts.thin; ++s) gibbs_sweep(state, spec, data, opts.seed, sweep++);
        store.record(state);
        if (opts.on_draw) opts.on_draw(state, d);
    }
    return RunResult{std::move(store), std::move(state)};
}

} // namespace bvarfsv
