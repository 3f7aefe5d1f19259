#include "bvarfsv/stochvol.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "bvarfsv/dists.hpp"
#include "bvarfsv/errors.hpp"

namespace bvarfsv {

namespace {

void check_ar1(double rho, double sigma2, const char* where) {
    if (!(std::fabs(rho) < 1.0) || !(sigma2 > 0.0) || !std::isfinite(sigma2)) {
        std::ostringstream os;
        os << where << ": need |rho| < 1 and sigma2 > 0, got rho=" << rho
           << " sigma2=" << sigma2;
        throw NumericalError(os.str());
    }
}

} // namespace

int draw_mixture_component(double x, RandomStream& rng) {
    double logw[logchi2::kComponents];
    double mx = -std::numeric_limits<double>::infinity();
    for (int i = 0; i < logchi2::kComponents; ++i) {
        const double d = x - logchi2::kMean[i];
        logw[i] = std::log(logchi2::kProb[i]) - 0.5 * std::log(logchi2::kVar[i]) -
                  0.5 * d * d / logchi2::kVar[i];
        if (logw[i] > mx) mx = logw[i];
    }
    double total = 0.0;
    for (int i = 0; i < logchi2::kComponents; ++i) {
        logw[i] = std::exp(logw[i] - mx);
        total += logw[i];
    }
    const double u = rng.uniform() * total;
    double cum = 0.0;
    for (int i = 0; i < logchi2::kComponents; ++i) {
        cum += logw[i];
        if (u < cum) return i;
    }
    return logchi2::kComponents - 1;
}

Eigen::VectorXd ffbs_linear(const Eigen::VectorXd& y, const Eigen::VectorXd& obs_mean,
                            const Eigen::VectorXd& obs_var, double mu, double rho, double sigma2,
                            RandomStream& rng) {
    const Eigen::Index T = y.size();
    if (obs_mean.size() != T || obs_var.size() != T)
        throw std::invalid_argument("ffbs_linear: observation vectors must share y's length");
    check_ar1(rho, sigma2, "ffbs_linear");
    Eigen::VectorXd h(T);
    if (T == 0) return h;
    for (Eigen::Index t = 0; t < T; ++t)
        if (!(obs_var[t] > 0.0))
            throw std::invalid_argument("ffbs_linear: observation variances must be positive");

    Eigen::VectorXd fm(T), fv(T);
    double pm = mu;
    double pv = sigma2 / (1.0 - rho * rho);
    for (Eigen::Index t = 0; t < T; ++t) {
        const double resid = (y[t] - obs_mean[t]) - pm;
        const double F = pv + obs_var[t];
        const double K = pv / F;
        fm[t] = pm + K * resid;
        fv[t] = pv * (1.0 - K);
        pm = mu + rho * (fm[t] - mu);
        pv = rho * rho * fv[t] + sigma2;
    }

    h[T - 1] = fm[T - 1] + std::sqrt(fv[T - 1]) * rng.normal();
    for (Eigen::Index t = T - 2; t >= 0; --t) {
        const double prec = 1.0 / fv[t] + rho * rho / sigma2;
        const double v = 1.0 / prec;
        const double m =
            v * ((fm[t] - mu) / fv[t] + rho * (h[t + 1] - mu) / sigma2) + mu;
        h[t] = m + std::sqrt(v) * rng.normal();
    }
    if (!h.allFinite()) throw NumericalError("ffbs_linear: produced a non-finite path");
    return h;
}

void sample_sv_path(const Eigen::VectorXd& resid, SvBlock& block, RandomStream& rng) {
    const Eigen::Index T = resid.size();
    if (block.h.size() != T)
        throw std::invalid_argument("sample_sv_path: block path length differs from residuals");
    if (T == 0) return;
    check_ar1(block.rho, block.sigma2, "sample_sv_path");

    Eigen::VectorXd ystar(T), om(T), ov(T);
    for (Eigen::Index t = 0; t < T; ++t) {
        ystar[t] = std::log(resid[t] * resid[t] + kLogVarOffset);
        const int c = draw_mixture_component(ystar[t] - block.h[t], rng);
        om[t] = logchi2::kMean[c];
        ov[t] = logchi2::kVar[c];
    }
    block.h = ffbs_linear(ystar, om, ov, block.mu, block.rho, block.sigma2, rng);
}

// stationary AR(1) log density of the path given (mu, rho, sigma2)
static double sv_path_loglike(double mu, double rho, double sigma2, const Eigen::VectorXd& h) {
    const Eigen::Index T = h.size();
    if (T == 0) return 0.0;
    const double v0 = sigma2 / (1.0 - rho * rho);
    double d = h[0] - mu;
    double lp = -0.5 * std::log(v0) - 0.5 * d * d / v0;
    for (Eigen::Index t = 1; t < T; ++t) {
        d = h[t] - mu - rho * (h[t - 1] - mu);
        lp += -0.5 * std::log(sigma2) - 0.5 * d * d / sigma2;
    }
    return lp;
}

double sv_param_log_target(double mu, double arho, double lsig, const Eigen::VectorXd& h,
                           const SvPriors& priors, bool mu_fixed) {
    const double rho = std::tanh(arho);
    const double sigma2 = std::exp(2.0 * lsig);
    if (!std::isfinite(rho) || !(sigma2 > 0.0) || !std::isfinite(sigma2))
        return -std::numeric_limits<double>::infinity();
    const double one_m_r2 = 1.0 - rho * rho;
    if (!(one_m_r2 > 0.0)) return -std::numeric_limits<double>::infinity();

    double lp = 0.0;
    if (!mu_fixed) lp += -0.5 * mu * mu / priors.mu_var;
    // Beta prior on (rho+1)/2 plus the tanh Jacobian (1-rho^2)/2
    lp += (priors.rho_a - 1.0) * std::log((1.0 + rho) / 2.0) +
          (priors.rho_b - 1.0) * std::log((1.0 - rho) / 2.0) + std::log(one_m_r2 / 2.0);
    // gamma(1/2, rate 1/(2 xi)) on sigma2 plus the exp(2 lsig) Jacobian
    lp += -0.5 * (2.0 * lsig) - sigma2 / (2.0 * priors.xi) + 2.0 * lsig;

    lp += sv_path_loglike(mu, rho, sigma2, h);
    return std::isfinite(lp) ? lp : -std::numeric_limits<double>::infinity();
}

void sample_sv_params(SvBlock& block, const SvPriors& priors, RandomStream& rng) {
    check_ar1(block.rho, block.sigma2, "sample_sv_params");

    // the path is Gaussian in the level, so the level draw is exact
    if (!block.mu_fixed && block.h.size() > 0) {
        const Eigen::Index T = block.h.size();
        const double v0 = block.sigma2 / (1.0 - block.rho * block.rho);
        const double omr = 1.0 - block.rho;
        double prec = 1.0 / priors.mu_var + 1.0 / v0;
        double pm = block.h[0] / v0;
        for (Eigen::Index t = 1; t < T; ++t) {
            prec += omr * omr / block.sigma2;
            pm += (block.h[t] - block.rho * block.h[t - 1]) * omr / block.sigma2;
        }
        block.mu = pm / prec + rng.normal() / std::sqrt(prec);
    }

    const double step = std::exp(block.log_step);

    const double cur_mu = block.mu;
    const double cur_a = std::atanh(block.rho);
    const double cur_s = 0.5 * std::log(block.sigma2);
    const double cur_lp = sv_param_log_target(cur_mu, cur_a, cur_s, block.h, priors, block.mu_fixed);

    const double prop_mu = block.mu_fixed ? 0.0 : cur_mu + step * rng.normal();
    const double prop_a = cur_a + step * rng.normal();
    const double prop_s = cur_s + step * rng.normal();
    const double prop_lp =
        sv_param_log_target(prop_mu, prop_a, prop_s, block.h, priors, block.mu_fixed);

    const double lr = prop_lp - cur_lp;
    const double alpha = lr >= 0.0 ? 1.0 : std::exp(lr);
    if (rng.uniform() < alpha) {
        block.mu = prop_mu;
        block.rho = std::tanh(prop_a);
        block.sigma2 = std::exp(2.0 * prop_s);
    }

    block.mh_count += 1;
    if (block.adapting) {
        const double gain = std::pow(static_cast<double>(block.mh_count), -0.6);
        block.log_step += gain * (alpha - 0.25);
        if (block.log_step < -7.0) block.log_step = -7.0;
        if (block.log_step > 2.5) block.log_step = 2.5;
    }

    // independence refresh proposed from the prior and accepted on the path
    // likelihood alone: the local walk equilibrates within a mode while this
    // step crosses the prior scale when the path is short or diffuse
    const double ind_mu = block.mu_fixed ? 0.0 : std::sqrt(priors.mu_var) * rng.normal();
    const double ind_rho = 2.0 * sample_beta(priors.rho_a, priors.rho_b, rng) - 1.0;
    const double ind_s2 = sample_gamma(0.5, 1.0 / (2.0 * priors.xi), rng);
    if (std::fabs(ind_rho) < 1.0 && ind_s2 > 0.0 && std::isfinite(ind_s2)) {
        const double cur_ll = sv_path_loglike(block.mu, block.rho, block.sigma2, block.h);
        const double ind_ll = sv_path_loglike(ind_mu, ind_rho, ind_s2, block.h);
        if (std::log(rng.uniform_pos()) < ind_ll - cur_ll) {
            block.mu = ind_mu;
            block.rho = ind_rho;
            block.sigma2 = ind_s2;
        }
    }
}

void sv_prior_draw(SvBlock& block, const SvPriors& priors, RandomStream& rng) {
    block.mu = block.mu_fixed ? 0.0 : std::sqrt(priors.mu_var) * rng.normal();
    block.rho = 2.0 * sample_beta(priors.rho_a, priors.rho_b, rng) - 1.0;
    block.sigma2 = sample_gamma(0.5, 1.0 / (2.0 * priors.xi), rng);
}

Eigen::VectorXd sv_simulate_path(double mu, double rho, double sigma2, Eigen::Index T,
                                 RandomStream& rng) {
    check_ar1(rho, sigma2, "sv_simulate_path");
    Eigen::VectorXd h(T);
    if (T == 0) return h;
    const double sig = std::sqrt(sigma2);
    h[0] = mu + sig / std::sqrt(1.0 - rho * rho) * rng.normal();
    for (Eigen::Index t = 1; t < T; ++t)
        h[t] = mu + rho * (h[t - 1] - mu) + sig * rng.normal();
    return h;
}

double sv_forecast_step(const SvBlock& block, RandomStream& rng) {
    check_ar1(block.rho, block.sigma2, "sv_forecast_step");
    if (block.h.size() == 0)
        throw std::invalid_argument("sv_forecast_step: block has an empty path");
    const double last = block.h[block.h.size() - 1];
    return block.mu + block.rho * (last - block.mu) + std::sqrt(block.sigma2) * rng.normal();
}

} // namespace bvarfsv
