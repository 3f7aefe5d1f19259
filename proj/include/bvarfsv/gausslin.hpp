#pragma once

#include <Eigen/Dense>

#include "bvarfsv/rng.hpp"

namespace bvarfsv {

// One equation's weighted regression pieces. X and z must already be scaled
// row-wise by the inverse residual standard deviations; phi holds the prior
// variances of the k coefficients, so the target is
//   N(Q X'z, Q) with Q = (X'X + diag(phi)^-1)^-1.
struct EquationDesign {
    Eigen::MatrixXd X; // T x k
    Eigen::VectorXd z; // T
    Eigen::VectorXd phi; // k, all strictly positive
};

enum class RowStrategy { Dense, Fast };

struct StrategyPolicy {
    enum Mode { Auto, ForceDense, ForceFast };
    Mode mode = Auto;
    // fast route wins when k > crossover * T
    double crossover = 1.0;
};

RowStrategy select_strategy(Eigen::Index k, Eigen::Index T, const StrategyPolicy& policy = {});

// O(k^3) route: factor the k x k posterior precision directly.
Eigen::VectorXd sample_row_dense(const EquationDesign& d, RandomStream& rng);

// O(T^2 k + T^3) route: prior draw plus a T x T correction solve; exact, not
// approximate, and law-identical to the dense route.
Eigen::VectorXd sample_row_fast(const EquationDesign& d, RandomStream& rng);

Eigen::VectorXd sample_row(const EquationDesign& d, RowStrategy s, RandomStream& rng);

struct PosteriorMoments {
    Eigen::VectorXd mean;
    Eigen::MatrixXd cov;
};

// exact moments via the dense factorization; shared by tests and the
// least-squares baseline
PosteriorMoments posterior_moments(const EquationDesign& d);

} // namespace bvarfsv
