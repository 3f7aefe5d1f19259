#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <vector>

#include "bvarfsv/engine.hpp"
#include "bvarfsv/gausslin.hpp"

namespace bvarfsv {

// Median wall-clock seconds for one coefficient draw on a synthetic
// equation of the given size, with warm-up calls discarded.
double time_equation_draw(Eigen::Index k, Eigen::Index T, RowStrategy strat, int sweeps,
                          int warmup, std::uint64_t seed);

// Median wall-clock seconds for one full Gibbs sweep on a synthetic panel.
double time_sweep(const ModelSpec& spec, Eigen::Index T, int sweeps, int warmup,
                  std::uint64_t seed);

// least-squares slope of log y on log x; the scaling exponent of a timing grid
double loglog_slope(const std::vector<double>& x, const std::vector<double>& y);

} // namespace bvarfsv
