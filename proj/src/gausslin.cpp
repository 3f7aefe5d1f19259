#include "bvarfsv/gausslin.hpp"

#include <sstream>

#include "bvarfsv/errors.hpp"

namespace bvarfsv {

namespace {

void check_design(const EquationDesign& d) {
    if (d.X.rows() != d.z.size() || d.X.cols() != d.phi.size()) {
        std::ostringstream os;
        os << "equation design shape mismatch: X is " << d.X.rows() << "x" << d.X.cols()
           << ", z has " << d.z.size() << ", phi has " << d.phi.size();
        throw std::invalid_argument(os.str());
    }
    if ((d.phi.array() <= 0.0).any())
        throw std::domain_error("prior variances must be strictly positive");
}

[[noreturn]] void factorization_failed(const char* where, Eigen::Index n) {
    std::ostringstream os;
    os << where << ": Cholesky factorization failed on a " << n << "x" << n
       << " matrix; the system is numerically singular";
    throw NumericalError(os.str());
}

Eigen::LLT<Eigen::MatrixXd> dense_precision_llt(const EquationDesign& d) {
    const Eigen::Index k = d.X.cols();
    Eigen::MatrixXd G = Eigen::MatrixXd::Zero(k, k);
    G.selfadjointView<Eigen::Lower>().rankUpdate(d.X.transpose());
    G.diagonal() += d.phi.cwiseInverse();
    Eigen::LLT<Eigen::MatrixXd> llt(G.selfadjointView<Eigen::Lower>());
    if (llt.info() != Eigen::Success) factorization_failed("sample_row_dense", k);
    return llt;
}

} // namespace

RowStrategy select_strategy(Eigen::Index k, Eigen::Index T, const StrategyPolicy& policy) {
    switch (policy.mode) {
    case StrategyPolicy::ForceDense: return RowStrategy::Dense;
    case StrategyPolicy::ForceFast: return RowStrategy::Fast;
    default: break;
    }
    return (static_cast<double>(k) > policy.crossover * static_cast<double>(T))
               ? RowStrategy::Fast
               : RowStrategy::Dense;
}

Eigen::VectorXd sample_row_dense(const EquationDesign& d, RandomStream& rng) {
    check_design(d);
    auto llt = dense_precision_llt(d);
    const Eigen::VectorXd mean = llt.solve(d.X.transpose() * d.z);
    // with G = LL', mean + L^-T eps has covariance G^-1
    return mean + llt.matrixU().solve(rng.normal_vector(d.X.cols()));
}

Eigen::VectorXd sample_row_fast(const EquationDesign& d, RandomStream& rng) {
    check_design(d);
    const Eigen::Index T = d.X.rows();
    const Eigen::Index k = d.X.cols();

    const Eigen::VectorXd sqrt_phi = d.phi.cwiseSqrt();
    const Eigen::VectorXd u = sqrt_phi.cwiseProduct(rng.normal_vector(k));
    const Eigen::VectorXd v = d.X * u + rng.normal_vector(T);

    Eigen::MatrixXd M = Eigen::MatrixXd::Identity(T, T);
    M.selfadjointView<Eigen::Lower>().rankUpdate(d.X * sqrt_phi.asDiagonal());
    Eigen::LLT<Eigen::MatrixXd> llt(M.selfadjointView<Eigen::Lower>());
    if (llt.info() != Eigen::Success) factorization_failed("sample_row_fast", T);

    const Eigen::VectorXd w = llt.solve(d.z - v);
    return u + d.phi.cwiseProduct(d.X.transpose() * w);
}

Eigen::VectorXd sample_row(const EquationDesign& d, RowStrategy s, RandomStream& rng) {
    return s == RowStrategy::Dense ? sample_row_dense(d, rng) : sample_row_fast(d, rng);
}

PosteriorMoments posterior_moments(const EquationDesign& d) {
    check_design(d);
    auto llt = dense_precision_llt(d);
    PosteriorMoments out;
    out.mean = llt.solve(d.X.transpose() * d.z);
    out.cov = llt.solve(Eigen::MatrixXd::Identity(d.X.cols(), d.X.cols()));
    return out;
}

} // namespace bvarfsv
