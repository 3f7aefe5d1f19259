#pragma once

#include <variant>

#include <Eigen/Dense>

#include "bvarfsv/dists.hpp"
#include "bvarfsv/rng.hpp"

namespace bvarfsv {

// Dirichlet-Laplace: b_j ~ N(0, psi_j * theta_j^2 * zeta^2), psi_j ~ Exp(1/2),
// theta on the K-simplex with concentration a, zeta ~ gamma(K*a, 1/2).
struct DlState {
    double a = 0.5;
    Eigen::VectorXd psi;
    Eigen::VectorXd theta;
    double zeta = 1.0;
};

// Normal-gamma: b_j ~ N(0, tau2_j), tau2_j ~ gamma(a_ng, a_ng*lambda_glob/2),
// lambda_glob ~ gamma(c0, d0).
struct NgState {
    double a_ng = 1.0;
    Eigen::VectorXd tau2;
    double lambda_glob = 1.0;
    double c0 = 0.01;
    double d0 = 0.01;
};

// deterministic prior variances: a_m / lag^lag_decay, intercept 10 * a_m
struct MinnesotaState {
    double a_m = 0.001;
    double lag_decay = 2.0;
};

using ShrinkageState = std::variant<DlState, NgState, MinnesotaState>;

DlState dl_init(double a, Eigen::Index K);
NgState ng_init(double a_ng, Eigen::Index K);

// Individual conditional draws. theta integrates out both scale layers and
// zeta integrates out the locals, so composing them is only valid in the
// order theta, zeta, psi.
void dl_draw_theta(const Eigen::VectorXd& b, DlState& state, RandomStream& rng);
void dl_draw_zeta(const Eigen::VectorXd& b, DlState& state, RandomStream& rng);
void dl_draw_psi(const Eigen::VectorXd& b, DlState& state, RandomStream& rng);

// Gibbs refresh of all auxiliary blocks given the coefficient vector b
// (length K): theta, then zeta, then psi.
void dl_update(const Eigen::VectorXd& b, DlState& state, RandomStream& rng);
void ng_update(const Eigen::VectorXd& b, NgState& state, RandomStream& rng);

// Joint rescale (b, zeta) -> (c b, c zeta) with log c ~ N(0, step^2), so the
// global scale moves without waiting on the coordinate-wise walk. s_zu and
// s_uu are the whitened-fit cross products <z, Xb> and <Xb, Xb> summed over
// equations, giving the likelihood change (c-1) s_zu - (c^2-1) s_uu / 2; pass
// zeros for a likelihood-free refresh. Updates zeta and returns c on
// acceptance, 1.0 on rejection; the caller scales the coefficients by the
// returned factor.
double dl_scale_move(DlState& state, double s_zu, double s_uu, double step, RandomStream& rng);

// Prior variance slice for one equation. The global coefficient vector is laid
// out row-major: equation i owns indices [i*k, (i+1)*k) where k = m*p +
// intercept, columns ordered lag-1 block, ..., lag-p block, intercept last.
Eigen::VectorXd phi_for_equation(const ShrinkageState& state, Eigen::Index equation,
                                 Eigen::Index m, Eigen::Index p, bool intercept);

} // namespace bvarfsv
