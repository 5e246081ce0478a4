#pragma once

#include <armadillo>
#include <functional>

#include "rng.hpp"

namespace dfosr {

// Gaussian in precision form: mean Q^{-1} ell, covariance Q^{-1}.
struct GaussianSystem {
  arma::mat Q;
  arma::vec ell;
};

// Draw from N(Q^{-1} ell, Q^{-1}) by Cholesky Q = L L', forward solve
// L lbar = ell, back solve L' x = lbar + z with z standard normal.
arma::vec sample_gaussian_precision(const GaussianSystem& sys, RandomStream& rng);

// Draw from N(Q^{-1} ell, Q^{-1}) conditional on C x = 0 (C is c x n, full
// row rank, c < n). The unconstrained draw is projected through the
// triangular-solve sequence; the constraint holds to rounding on every call.
arma::vec sample_constrained_gaussian(const GaussianSystem& sys,
                                      const arma::mat& C, RandomStream& rng);

// One stepping-out-and-shrinkage slice-sampling update of a univariate
// target restricted to (lo, hi). Initial width `width` on the working scale,
// at most 100 expansions per side.
double slice_sample(const std::function<double(double)>& log_density,
                    double x0, double lo, double hi, double width,
                    RandomStream& rng);

// Draw from Gamma(shape, rate) conditioned to exceed `lower`, by inverse CDF
// on the truncated region.
double sample_truncated_gamma(double shape, double rate, double lower,
                              RandomStream& rng);

}  // namespace dfosr
