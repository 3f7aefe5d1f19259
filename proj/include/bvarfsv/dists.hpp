#pragma once

#include "bvarfsv/rng.hpp"

namespace bvarfsv {

// Generalized inverse Gaussian, density proportional to
//   x^(lambda-1) * exp(-(rho*x + chi/x)/2),  x > 0.
// Valid parameter region: chi >= 0, rho >= 0 with
//   chi > 0, rho > 0           any real lambda
//   chi == 0                   lambda > 0, rho > 0   (gamma limit)
//   rho == 0                   lambda < 0, chi > 0   (inverse-gamma limit)
// Useful identities under this convention:
//   1/GIG(lambda, rho, chi) == GIG(-lambda, chi, rho) in distribution
//   GIG(-1/2, rho, chi)     == inverse Gaussian(mean sqrt(chi/rho), shape chi)
//   GIG(lambda, rho, 0)     == gamma(shape lambda, rate rho/2)
struct GigParams {
    double lambda;
    double rho;
    double chi;
};

// mean mu, shape lam; density proportional to x^(-3/2) exp(-lam*(x-mu)^2/(2*mu^2*x))
struct InvGaussParams {
    double mean;
    double shape;
};

double sample_gig(const GigParams& p, RandomStream& rng);
double sample_inverse_gaussian(const InvGaussParams& p, RandomStream& rng);

// shape/rate parameterization, mean = shape/rate
double sample_gamma(double shape, double rate, RandomStream& rng);
double sample_beta(double a, double b, RandomStream& rng);
double sample_exponential(double rate, RandomStream& rng);

} // namespace bvarfsv
