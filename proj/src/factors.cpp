#include "bvarfsv/factors.hpp"

#include <cmath>
#include <sstream>

#include "bvarfsv/errors.hpp"

namespace bvarfsv {

double bounded_exp(double x) {
    if (x > 690.0) x = 690.0;
    if (x < -690.0) x = -690.0;
    return std::exp(x);
}

namespace {

void check_shapes(Eigen::Index T, Eigen::Index m, Eigen::Index q, const Eigen::MatrixXd& Lambda,
                  const Eigen::MatrixXd& hf, const Eigen::MatrixXd& hidio, const char* where) {
    if (Lambda.rows() != m || Lambda.cols() != q || hf.rows() != T || hf.cols() != q ||
        hidio.rows() != T || hidio.cols() != m) {
        std::ostringstream os;
        os << where << ": inconsistent shapes, T=" << T << " m=" << m << " q=" << q
           << " Lambda=" << Lambda.rows() << "x" << Lambda.cols() << " hf=" << hf.rows() << "x"
           << hf.cols() << " hidio=" << hidio.rows() << "x" << hidio.cols();
        throw std::invalid_argument(os.str());
    }
}

// draw from N(solve(M, rhs), M^{-1}) given the precision M
Eigen::VectorXd precision_draw(const Eigen::MatrixXd& M, const Eigen::VectorXd& rhs,
                               RandomStream& rng, const char* where) {
    Eigen::LLT<Eigen::MatrixXd> llt(M);
    if (llt.info() != Eigen::Success) {
        std::ostringstream os;
        os << where << ": " << M.rows() << "x" << M.cols() << " precision is not positive definite";
        throw NumericalError(os.str());
    }
    Eigen::VectorXd mean = llt.solve(rhs);
    Eigen::VectorXd z = rng.normal_vector(M.rows());
    return mean + llt.matrixU().solve(z);
}

} // namespace

Eigen::MatrixXd sample_factors(const Eigen::MatrixXd& eps, const Eigen::MatrixXd& Lambda,
                               const Eigen::MatrixXd& hf, const Eigen::MatrixXd& hidio,
                               RandomStream& rng) {
    const Eigen::Index T = eps.rows(), m = eps.cols(), q = Lambda.cols();
    check_shapes(T, m, q, Lambda, hf, hidio, "sample_factors");
    Eigen::MatrixXd f(T, q);
    if (q == 0 || T == 0) return f;

    Eigen::MatrixXd scaled(m, q);
    for (Eigen::Index t = 0; t < T; ++t) {
        for (Eigen::Index i = 0; i < m; ++i) {
            const double dinv = 1.0 / bounded_exp(hidio(t, i));
            scaled.row(i) = Lambda.row(i) * dinv;
        }
        Eigen::MatrixXd M = Lambda.transpose() * scaled;
        for (Eigen::Index j = 0; j < q; ++j) M(j, j) += 1.0 / bounded_exp(hf(t, j));
        Eigen::VectorXd rhs = scaled.transpose() * eps.row(t).transpose();
        f.row(t) = precision_draw(M, rhs, rng, "sample_factors").transpose();
    }
    return f;
}

void sample_loadings(const Eigen::MatrixXd& eps, const Eigen::MatrixXd& f,
                     const Eigen::MatrixXd& hidio, Eigen::MatrixXd& Lambda, RandomStream& rng) {
    const Eigen::Index T = eps.rows(), m = eps.cols(), q = Lambda.cols();
    if (f.rows() != T || f.cols() != q || Lambda.rows() != m || hidio.rows() != T ||
        hidio.cols() != m) {
        std::ostringstream os;
        os << "sample_loadings: inconsistent shapes, eps=" << T << "x" << m << " f=" << f.rows()
           << "x" << f.cols() << " Lambda=" << Lambda.rows() << "x" << Lambda.cols()
           << " hidio=" << hidio.rows() << "x" << hidio.cols();
        throw std::invalid_argument(os.str());
    }
    if (q == 0) return;

    Eigen::MatrixXd fw(T, q);
    for (Eigen::Index i = 0; i < m; ++i) {
        for (Eigen::Index t = 0; t < T; ++t)
            fw.row(t) = f.row(t) / bounded_exp(hidio(t, i));
        Eigen::MatrixXd M = f.transpose() * fw;
        M += Eigen::MatrixXd::Identity(q, q);
        Eigen::VectorXd rhs = fw.transpose() * eps.col(i);
        Lambda.row(i) = precision_draw(M, rhs, rng, "sample_loadings").transpose();
    }
}

Eigen::MatrixXd covariance_at(const Eigen::MatrixXd& Lambda, const Eigen::VectorXd& hf_t,
                              const Eigen::VectorXd& hidio_t) {
    const Eigen::Index m = Lambda.rows(), q = Lambda.cols();
    if (hf_t.size() != q || hidio_t.size() != m)
        throw std::invalid_argument("covariance_at: log-variance lengths do not match the loadings");
    Eigen::MatrixXd omega = Eigen::MatrixXd::Zero(m, m);
    if (q > 0) {
        Eigen::MatrixXd scaled = Lambda;
        for (Eigen::Index j = 0; j < q; ++j)
            scaled.col(j) *= std::sqrt(bounded_exp(hf_t[j]));
        omega.selfadjointView<Eigen::Lower>().rankUpdate(scaled, 1.0);
        omega.triangularView<Eigen::StrictlyUpper>() =
            omega.triangularView<Eigen::StrictlyLower>().transpose();
    }
    for (Eigen::Index i = 0; i < m; ++i) omega(i, i) += bounded_exp(hidio_t[i]);
    return omega;
}

} // namespace bvarfsv
