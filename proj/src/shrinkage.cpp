#include "bvarfsv/shrinkage.hpp"

#include <cfloat>
#include <cmath>
#include <sstream>

#include "bvarfsv/errors.hpp"

namespace bvarfsv {

namespace {

// keeps |b| and prior variances away from exact zero so the GIG and inverse
// Gaussian parameters stay in their domains
constexpr double kTiny = 1e-300;
constexpr double kHuge = 1e300;

double clamp_pos(double x) {
    if (!(x > kTiny)) return kTiny;
    if (x > kHuge) return kHuge;
    return x;
}

void check_sizes(const Eigen::VectorXd& b, Eigen::Index K, const char* what) {
    if (b.size() != K) {
        std::ostringstream os;
        os << what << ": coefficient vector has length " << b.size() << ", state expects " << K;
        throw std::invalid_argument(os.str());
    }
}

} // namespace

DlState dl_init(double a, Eigen::Index K) {
    if (!(a > 0.0)) throw std::domain_error("dl_init: concentration must be positive");
    DlState s;
    s.a = a;
    s.psi = Eigen::VectorXd::Ones(K);
    s.theta = Eigen::VectorXd::Constant(K, 1.0 / static_cast<double>(K));
    s.zeta = static_cast<double>(K) * a;
    return s;
}

NgState ng_init(double a_ng, Eigen::Index K) {
    if (!(a_ng > 0.0)) throw std::domain_error("ng_init: shape must be positive");
    NgState s;
    s.a_ng = a_ng;
    s.tau2 = Eigen::VectorXd::Ones(K);
    s.lambda_glob = 1.0;
    return s;
}

void dl_draw_theta(const Eigen::VectorXd& b, DlState& state, RandomStream& rng) {
    const Eigen::Index K = state.theta.size();
    check_sizes(b, K, "dl_draw_theta");
    // simplex weights via normalized GIG draws
    double total = 0.0;
    for (Eigen::Index j = 0; j < K; ++j) {
        const double absb = clamp_pos(std::fabs(b[j]));
        state.theta[j] = sample_gig({state.a - 1.0, 1.0, 2.0 * absb}, rng);
        total += state.theta[j];
    }
    state.theta /= total;
    for (Eigen::Index j = 0; j < K; ++j) state.theta[j] = clamp_pos(state.theta[j]);
}

void dl_draw_zeta(const Eigen::VectorXd& b, DlState& state, RandomStream& rng) {
    const Eigen::Index K = state.theta.size();
    check_sizes(b, K, "dl_draw_zeta");
    double S = 0.0;
    for (Eigen::Index j = 0; j < K; ++j)
        S += clamp_pos(std::fabs(b[j])) / clamp_pos(state.theta[j]);
    state.zeta = clamp_pos(
        sample_gig({static_cast<double>(K) * (state.a - 1.0), 1.0, clamp_pos(2.0 * S)}, rng));
}

void dl_draw_psi(const Eigen::VectorXd& b, DlState& state, RandomStream& rng) {
    const Eigen::Index K = state.theta.size();
    check_sizes(b, K, "dl_draw_psi");
    // psi_j = 1 / iG(theta_j*zeta/|b_j|, 1)
    for (Eigen::Index j = 0; j < K; ++j) {
        const double absb = clamp_pos(std::fabs(b[j]));
        const double mean = clamp_pos(state.theta[j] * state.zeta / absb);
        state.psi[j] = clamp_pos(1.0 / sample_inverse_gaussian({mean, 1.0}, rng));
    }
}

void dl_update(const Eigen::VectorXd& b, DlState& state, RandomStream& rng) {
    // The weight draw integrates out both scale layers and the global draw
    // integrates out the locals, so this nesting is the only composition that
    // preserves the joint distribution.
    dl_draw_theta(b, state, rng);
    dl_draw_zeta(b, state, rng);
    dl_draw_psi(b, state, rng);
}

void ng_update(const Eigen::VectorXd& b, NgState& state, RandomStream& rng) {
    const Eigen::Index K = state.tau2.size();
    check_sizes(b, K, "ng_update");

    for (Eigen::Index j = 0; j < K; ++j) {
        const double chi = clamp_pos(b[j] * b[j]);
        state.tau2[j] = clamp_pos(
            sample_gig({state.a_ng - 0.5, state.a_ng * state.lambda_glob, chi}, rng));
    }
    const double shape = state.c0 + state.a_ng * static_cast<double>(K);
    const double rate = state.d0 + 0.5 * state.a_ng * state.tau2.sum();
    state.lambda_glob = clamp_pos(sample_gamma(shape, rate, rng));
}

double dl_scale_move(DlState& state, double s_zu, double s_uu, double step, RandomStream& rng) {
    const double K = static_cast<double>(state.theta.size());
    const double c = std::exp(step * rng.normal());
    // likelihood change, the zeta prior ratio c^(K a - 1) exp(-(c-1) zeta / 2),
    // the Gaussian normalizations c^-K, and the (K+1)-dimensional Jacobian
    // c^(K+1) collapse to the three terms below
    const double lr = (c - 1.0) * s_zu - 0.5 * (c * c - 1.0) * s_uu +
                      K * state.a * std::log(c) - 0.5 * (c - 1.0) * state.zeta;
    if (std::isfinite(lr) && std::log(rng.uniform_pos()) < lr) {
        state.zeta = clamp_pos(state.zeta * c);
        return c;
    }
    return 1.0;
}

Eigen::VectorXd phi_for_equation(const ShrinkageState& state, Eigen::Index equation,
                                 Eigen::Index m, Eigen::Index p, bool intercept) {
    const Eigen::Index k = m * p + (intercept ? 1 : 0);
    if (equation < 0 || equation >= m)
        throw std::invalid_argument("phi_for_equation: equation index out of range");

    if (const auto* mn = std::get_if<MinnesotaState>(&state)) {
        Eigen::VectorXd phi(k);
        for (Eigen::Index c = 0; c < m * p; ++c) {
            const double lag = static_cast<double>(c / m + 1);
            phi[c] = mn->a_m / std::pow(lag, mn->lag_decay);
        }
        if (intercept) phi[k - 1] = 10.0 * mn->a_m;
        return phi;
    }

    const Eigen::Index lo = equation * k;
    if (const auto* dl = std::get_if<DlState>(&state)) {
        if (dl->theta.size() != m * k)
            throw std::invalid_argument("phi_for_equation: state sized for a different model");
        Eigen::VectorXd phi(k);
        const double z2 = dl->zeta * dl->zeta;
        for (Eigen::Index c = 0; c < k; ++c)
            phi[c] = clamp_pos(z2 * dl->psi[lo + c] * dl->theta[lo + c] * dl->theta[lo + c]);
        return phi;
    }

    const auto& ng = std::get<NgState>(state);
    if (ng.tau2.size() != m * k)
        throw std::invalid_argument("phi_for_equation: state sized for a different model");
    Eigen::VectorXd phi(k);
    for (Eigen::Index c = 0; c < k; ++c) phi[c] = clamp_pos(ng.tau2[lo + c]);
    return phi;
}

} // namespace bvarfsv
