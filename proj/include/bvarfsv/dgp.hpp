#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>

#include "bvarfsv/engine.hpp"
#include "bvarfsv/rng.hpp"

namespace bvarfsv {

// Coefficient sparsity regimes for the one-lag study model. Off-diagonal lag
// entries enter with the stated probability; diagonal entries enter with
// probability 0.8 and intercepts with probability 0.1 in every regime.
enum class Density { Sparse, Intermediate, Dense };

// Random one-lag coefficient matrix, m x (m + 1) with the intercept last.
// Redraws until the lag block's spectral radius is below 0.99; throws
// NumericalError after 1000 failed attempts.
Eigen::MatrixXd generate_coefficients(Eigen::Index m, Density density, RandomStream& rng);

struct DgpConfig {
    Eigen::Index m = 10;
    Eigen::Index T = 50; // regression rows delivered (panel has T + 1)
    Density density = Density::Sparse;
    Eigen::Index warmup = 100;
};

struct DgpDraw {
    Eigen::MatrixXd coef; // m x (m + 1)
    Eigen::MatrixXd raw;  // (T + 1) x m panel
    Eigen::VectorXd lambda;
};

// Simulates the one-factor volatility VAR: a tiny-loading common factor with
// slow log-variance movements plus idiosyncratic volatilities around a very
// low level.
DgpDraw generate_dataset(const DgpConfig& cfg, RandomStream& rng);

double rmse(const Eigen::MatrixXd& estimate, const Eigen::MatrixXd& truth);

// Least-squares baseline, equation by equation. Returns false when the
// design has at least as many columns as rows, where it is undefined.
bool ols_estimate(const Dataset& data, Eigen::MatrixXd& out);

struct StudyEstimator {
    std::string name;
    bool is_ols = false;
    ShrinkageConfig shrink;
};

// The study lineup: two Dirichlet-Laplace settings (1/2 and 1/K with
// K = m(m+1)), two normal-gamma settings, two fixed-variance settings, and
// least squares.
std::vector<StudyEstimator> study_estimators(Eigen::Index m);

struct CellResult {
    std::string scenario;
    Eigen::Index m = 0, T = 0, reps = 0;
    std::vector<std::string> names;
    std::vector<std::vector<double>> rep_rmse; // [estimator][rep], NaN if undefined
    std::vector<double> median_rmse;           // NaN if undefined anywhere
    std::vector<double> relative;              // versus the 1/K Dirichlet-Laplace row
};

// Runs the estimators on `reps` fresh datasets from the cell's
// configuration. Chains use q = 1, the given budget, and seeds derived from
// (seed, rep, estimator), so the result is reproducible and independent of
// which estimators run. A nonempty `active` restricts the run to those
// lineup indices (the 1/K Dirichlet-Laplace benchmark is always added so the
// relative column stays defined); the rest report NaN.
CellResult run_scenario_cell(const DgpConfig& cfg, Eigen::Index reps, Eigen::Index mcmc_burn,
                             Eigen::Index mcmc_draws, std::uint64_t seed,
                             const std::vector<std::size_t>& active = {});

const char* density_name(Density d);

} // namespace bvarfsv
