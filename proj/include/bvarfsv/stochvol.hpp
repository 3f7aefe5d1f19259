#pragma once

#include <Eigen/Dense>

#include "bvarfsv/rng.hpp"

namespace bvarfsv {

// Ten-component normal mixture approximation to the log chi^2_1 distribution
// of log-squared Gaussian noise.
namespace logchi2 {
inline constexpr int kComponents = 10;
inline constexpr double kProb[kComponents] = {0.00609, 0.04775, 0.13057, 0.20674, 0.22715,
                                              0.18842, 0.12047, 0.05591, 0.01575, 0.00115};
inline constexpr double kMean[kComponents] = {1.92677,  1.34744,  0.73504,  0.02266,  -0.85173,
                                              -1.97278, -3.46788, -5.55246, -8.68384, -14.65000};
inline constexpr double kVar[kComponents] = {0.11265, 0.17788, 0.26768, 0.40611, 0.62699,
                                             0.98583, 1.57469, 2.54498, 4.16591, 7.33342};
} // namespace logchi2

// added to squared residuals before taking logs
inline constexpr double kLogVarOffset = 1e-8;

// One log-variance block: h_t follows a stationary AR(1) around mu with
// innovation variance sigma2. Factor blocks pin mu at zero. The proposal
// state belongs to the adaptive random-walk sampler for (mu, atanh rho,
// log sigma).
struct SvBlock {
    Eigen::VectorXd h;
    double mu = 0.0;
    double rho = 0.9;
    double sigma2 = 0.01;
    bool mu_fixed = false;
    double log_step = -2.3;
    long mh_count = 0;
    bool adapting = true;
};

struct SvPriors {
    double mu_var = 10.0; // mu ~ N(0, mu_var)
    double rho_a = 20.0;  // (rho+1)/2 ~ Beta(rho_a, rho_b)
    double rho_b = 1.5;
    double xi = 1.0; // sigma2 ~ gamma(1/2, rate 1/(2*xi))
};

// Posterior draw of the mixture component for one observation, where
// x = log(resid^2 + offset) - h.
int draw_mixture_component(double x, RandomStream& rng);

// Forward-filter backward-sample for y_t = h_t + obs_mean_t + N(0, obs_var_t)
// with h_t - mu = rho (h_{t-1} - mu) + N(0, sigma2) and stationary
// initialization h_1 ~ N(mu, sigma2 / (1 - rho^2)). Exact joint draw.
Eigen::VectorXd ffbs_linear(const Eigen::VectorXd& y, const Eigen::VectorXd& obs_mean,
                            const Eigen::VectorXd& obs_var, double mu, double rho, double sigma2,
                            RandomStream& rng);

// Replaces block.h with a draw given the residuals (mixture indicators are
// refreshed internally against the current path).
void sample_sv_path(const Eigen::VectorXd& resid, SvBlock& block, RandomStream& rng);

// Log posterior density of the parameters in the transformed coordinates
// (mu, atanh rho, log sigma), including the Jacobians; h may be empty, which
// leaves only the prior. With mu_fixed the mu terms are dropped.
double sv_param_log_target(double mu, double arho, double lsig, const Eigen::VectorXd& h,
                           const SvPriors& priors, bool mu_fixed);

// One joint random-walk Metropolis step on the transformed parameters, with
// Robbins-Monro step adaptation toward 0.25 acceptance while block.adapting.
void sample_sv_params(SvBlock& block, const SvPriors& priors, RandomStream& rng);

// Draws (mu, rho, sigma2) from the prior into the block, honoring mu_fixed.
void sv_prior_draw(SvBlock& block, const SvPriors& priors, RandomStream& rng);

// Simulates a stationary AR(1) log-variance path.
Eigen::VectorXd sv_simulate_path(double mu, double rho, double sigma2, Eigen::Index T,
                                 RandomStream& rng);

// One-step-ahead draw of the next log variance given the end of the path.
double sv_forecast_step(const SvBlock& block, RandomStream& rng);

} // namespace bvarfsv
