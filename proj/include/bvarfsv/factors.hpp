#pragma once

#include <Eigen/Dense>

#include "bvarfsv/rng.hpp"

namespace bvarfsv {

// Residual factor structure: eps_t = Lambda f_t + eta_t with
// eta_t ~ N(0, diag(exp hidio_t)) and f_t ~ N(0, diag(exp hf_t)).
// eps is T x m, Lambda m x q, hf T x q, hidio T x m. q may be zero
// throughout; every routine then degenerates to the diagonal model.

// Per-period conditional draw:
// f_t ~ N(P_t Lambda' Sigma_t^{-1} eps_t, P_t),
// P_t = (Lambda' Sigma_t^{-1} Lambda + V_t^{-1})^{-1}. Returns T x q.
Eigen::MatrixXd sample_factors(const Eigen::MatrixXd& eps, const Eigen::MatrixXd& Lambda,
                               const Eigen::MatrixXd& hf, const Eigen::MatrixXd& hidio,
                               RandomStream& rng);

// Row-wise conjugate update of Lambda with independent N(0, I_q) priors:
// eps_{t i} = f_t . lambda_i + N(0, exp(hidio_{t i})).
void sample_loadings(const Eigen::MatrixXd& eps, const Eigen::MatrixXd& f,
                     const Eigen::MatrixXd& hidio, Eigen::MatrixXd& Lambda, RandomStream& rng);

// Omega_t = Lambda diag(exp hf_t) Lambda' + diag(exp hidio_t)
Eigen::MatrixXd covariance_at(const Eigen::MatrixXd& Lambda, const Eigen::VectorXd& hf_t,
                              const Eigen::VectorXd& hidio_t);

// exp with the argument clamped so the result stays positive and finite
double bounded_exp(double x);

} // namespace bvarfsv
