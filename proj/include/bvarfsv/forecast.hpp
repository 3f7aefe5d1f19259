#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <vector>

#include "bvarfsv/engine.hpp"

namespace bvarfsv {

// Log density of y_obs under the one-step predictive normal implied by a
// single posterior draw: mean B x_next, covariance
// Lambda diag(exp hf_next) Lambda' + diag(exp hidio_next). A nonempty subset
// restricts the density to those series (strictly increasing indices); the
// factor structure keeps the cost at O(d q^2) for d series kept.
double predictive_logdensity(const Eigen::MatrixXd& B, const Eigen::MatrixXd& Lambda,
                             const Eigen::VectorXd& hf_next, const Eigen::VectorXd& hidio_next,
                             const Eigen::VectorXd& x_next, const Eigen::VectorXd& y_obs,
                             const std::vector<Eigen::Index>& subset = {});

// log of the average density, log((1/n) sum_i exp(logdens_i)), computed with
// a max shift so large magnitudes cannot overflow
double log_predictive_score(const Eigen::VectorXd& logdens);

// Regressor row [y_n, ..., y_{n-p+1}, 1] for predicting the period after the
// last row of raw; matches the layout build_dataset would produce if that
// period were appended.
Eigen::VectorXd next_regressor(const Eigen::MatrixXd& raw, Eigen::Index p);

// Extend a fitted state by one period -- factors by zero, log-variance paths
// by their conditional means -- so it can warm-start the chain for the next
// expanding window.
ChainState extend_state(const ChainState& s);

struct ForecastConfig {
    ModelSpec spec;
    Eigen::Index first_obs = 80; // estimation rows in the first window
    Eigen::Index windows = 8;    // one-step forecasts, window growing by one row each
    Eigen::Index burn_first = 1000;
    Eigen::Index burn_warm = 500; // later windows restart from the previous fit
    Eigen::Index draws = 1000;
    Eigen::Index thin = 1;
    std::uint64_t seed = 1;
    std::vector<Eigen::Index> subset; // series entering the joint score; empty = all
};

struct WindowScores {
    Eigen::Index t_forecast = 0; // row of the panel being predicted
    double joint = 0.0;
    Eigen::VectorXd univariate; // per evaluated series
};

struct ForecastRun {
    std::vector<WindowScores> windows;
    double total_joint = 0.0;
    Eigen::VectorXd total_univariate;
    std::vector<Eigen::Index> evaluated; // series the univariate columns refer to
};

// Expanding-window density evaluation: fit on rows [0, first_obs + w) and
// score the one-step predictive density of row first_obs + w for
// w = 0 .. windows - 1. Volatilities are propagated one step per retained
// draw before scoring.
ForecastRun expanding_window_run(const Eigen::MatrixXd& raw, const ForecastConfig& cfg);

} // namespace bvarfsv
