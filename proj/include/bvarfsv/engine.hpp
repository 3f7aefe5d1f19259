#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "bvarfsv/factors.hpp"
#include "bvarfsv/gausslin.hpp"
#include "bvarfsv/rng.hpp"
#include "bvarfsv/shrinkage.hpp"
#include "bvarfsv/stochvol.hpp"

namespace bvarfsv {

enum class ShrinkageKind { DirichletLaplace, NormalGamma, Minnesota };

struct ShrinkageConfig {
    ShrinkageKind kind = ShrinkageKind::DirichletLaplace;
    // DL concentration, NG shape, or the Minnesota tightness respectively
    double hyper = 0.5;
};

struct ModelSpec {
    Eigen::Index m = 1; // series
    Eigen::Index p = 1; // lags
    Eigen::Index q = 0; // factors
    ShrinkageConfig shrink;
    SvPriors sv;
    StrategyPolicy rows; // dense versus rank-based coefficient sampling
    // benchmark mode: pin the coefficients and skip their updates entirely
    std::optional<Eigen::MatrixXd> fixed_coef;
};

// m x (m p + 1) matrix with c on the own first lags and zeros elsewhere
Eigen::MatrixXd fixed_ar_matrix(Eigen::Index m, Eigen::Index p, double c);

// Nominal count of sampled quantities: coefficients, their shrinkage
// auxiliaries, factors, loadings, log-variance paths (with their initial
// states), and the volatility parameters.
Eigen::Index state_dimension(Eigen::Index m, Eigen::Index p, Eigen::Index q, Eigen::Index T);

// Lagged design built from a raw (T + p) x m panel: row t of X is
// [y_{t-1}, ..., y_{t-p}, 1] and Y holds the corresponding left-hand sides.
struct Dataset {
    Eigen::MatrixXd X; // T x (m p + 1)
    Eigen::MatrixXd Y; // T x m
};
Dataset build_dataset(const Eigen::MatrixXd& raw, Eigen::Index p);

struct ChainState {
    Eigen::MatrixXd B;      // m x (m p + 1), equation per row, intercept last
    ShrinkageState shrink;
    Eigen::MatrixXd Lambda; // m x q
    Eigen::MatrixXd f;      // T x q
    std::vector<SvBlock> sv_idio;   // m blocks
    std::vector<SvBlock> sv_factor; // q blocks with the level pinned at zero
};

ChainState init_chain(const ModelSpec& spec, const Dataset& data, RandomStream& rng);

// Row-major flattening of the coefficient matrix, matching the shrinkage
// layout: entry i*k + c is equation i, column c.
Eigen::VectorXd flatten_coefficients(const Eigen::MatrixXd& B);

// One full sweep over all blocks. Sub-streams are derived from
// (master_seed, sweep_index, block, unit) so results do not depend on
// execution schedule. Throws NumericalError naming the sweep and block if a
// draw goes non-finite.
void gibbs_sweep(ChainState& state, const ModelSpec& spec, const Dataset& data,
                 std::uint64_t master_seed, std::uint64_t sweep_index);

// Single-quantile streaming estimator (five-marker parabolic interpolation).
class P2Quantile {
  public:
    explicit P2Quantile(double prob);
    void add(double x);
    double value() const;
    std::int64_t count() const { return count_; }

  private:
    double prob_;
    std::int64_t count_ = 0;
    double q_[5];
    double n_[5];
    double np_[5];
    double dn_[5];
};

// Streaming summary of one scalar: mean, variance, and the five standard
// quantile levels 5/25/50/75/95.
class ScalarSketch {
  public:
    ScalarSketch();
    void add(double x);
    double mean() const { return n_ ? m1_ : 0.0; }
    double variance() const { return n_ > 1 ? m2_ / static_cast<double>(n_ - 1) : 0.0; }
    double quantile(int which) const; // 0..4 -> 5,25,50,75,95 percent
    std::int64_t count() const { return n_; }
    static const double kLevels[5];

  private:
    std::int64_t n_ = 0;
    double m1_ = 0.0, m2_ = 0.0;
    P2Quantile qs_[5];
};

// Posterior draw accumulator. Coefficients and idiosyncratic log-variance
// paths are always sketched; full coefficient draws are kept as well when
// m <= full_b_limit. Loadings, volatility parameters, and factor
// log-variance paths are kept in full.
class DrawStore {
  public:
    DrawStore(const ModelSpec& spec, Eigen::Index T, Eigen::Index expected_draws,
              Eigen::Index full_b_limit = 50);

    void record(const ChainState& state);

    Eigen::Index draws() const { return recorded_; }
    bool has_full_b() const { return full_b_; }
    const Eigen::MatrixXd& b_draws() const { return b_draws_; }
    const Eigen::MatrixXd& lambda_draws() const { return lambda_draws_; }
    const Eigen::MatrixXd& factor_h_draws() const { return fh_draws_; }
    // per block: mu, rho, sigma2, idiosyncratic blocks first
    const Eigen::MatrixXd& sv_param_draws() const { return sv_draws_; }

    Eigen::VectorXd b_mean() const;
    Eigen::VectorXd b_quantile(int which) const; // 0..4 -> 5,25,50,75,95
    Eigen::VectorXd b_sd() const;
    const ScalarSketch& b_sketch(Eigen::Index j) const { return b_sketch_[j]; }
    const ScalarSketch& idio_h_sketch(Eigen::Index t, Eigen::Index i) const {
        return h_sketch_[static_cast<std::size_t>(t) * m_ + i];
    }

    Eigen::Index m() const { return m_; }
    Eigen::Index k() const { return k_; }
    Eigen::Index q() const { return q_; }
    Eigen::Index T() const { return T_; }

  private:
    Eigen::Index m_, k_, q_, T_;
    bool full_b_;
    Eigen::Index recorded_ = 0;
    std::vector<ScalarSketch> b_sketch_; // m k
    std::vector<ScalarSketch> h_sketch_; // T m, time major
    Eigen::MatrixXd b_draws_;
    Eigen::MatrixXd lambda_draws_;
    Eigen::MatrixXd fh_draws_;
    Eigen::MatrixXd sv_draws_;
};

struct RunOptions {
    Eigen::Index burn = 1000;
    Eigen::Index draws = 2000;
    Eigen::Index thin = 1;
    std::uint64_t seed = 1;
    Eigen::Index full_b_limit = 50;
    // volatility parameter proposals adapt during burn-in, then freeze
    bool adapt = true;
    const ChainState* warm_start = nullptr;
    // called after each retained draw
    std::function<void(const ChainState&, Eigen::Index)> on_draw;
};

struct RunResult {
    DrawStore store;
    ChainState final_state;
};

RunResult run_chain(const ModelSpec& spec, const Dataset& data, const RunOptions& opts);

} // namespace bvarfsv
