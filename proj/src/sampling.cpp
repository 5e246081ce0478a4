#include "sampling.hpp"

#include <boost/math/special_functions/gamma.hpp>
#include <cmath>

#include "errors.hpp"

namespace dfosr {

namespace {

arma::mat chol_lower(const arma::mat& Q) {
  const arma::uword n = Q.n_rows;
  if (Q.n_cols != n) throw InvalidArgument("precision matrix must be square");
  const double scale = 1.0 + arma::abs(Q).max();
  if (arma::abs(Q - Q.t()).max() > 1e-10 * scale) {
    throw InvalidArgument("precision matrix not symmetric within 1e-10");
  }
  arma::mat L;
  if (!arma::chol(L, Q, "lower")) {
    throw NumericalError("precision matrix not positive definite");
  }
  return L;
}

arma::vec draw_given_chol(const arma::mat& L, const arma::vec& ell,
                          RandomStream& rng) {
  const arma::uword n = L.n_rows;
  arma::vec lbar = arma::solve(arma::trimatl(L), ell);
  arma::vec z(n);
  for (auto& zi : z) zi = rng.normal();
  return arma::solve(arma::trimatu(L.t()), lbar + z);
}

}  // namespace

arma::vec sample_gaussian_precision(const GaussianSystem& sys,
                                    RandomStream& rng) {
  return draw_given_chol(chol_lower(sys.Q), sys.ell, rng);
}

arma::vec sample_constrained_gaussian(const GaussianSystem& sys,
                                      const arma::mat& C, RandomStream& rng) {
  const arma::uword n = sys.Q.n_rows;
  const arma::uword c = C.n_rows;
  if (c == 0) return sample_gaussian_precision(sys, rng);
  if (C.n_cols != n || c >= n) {
    throw InvalidArgument("constraint matrix must be c x n with c < n");
  }
  const arma::mat L = chol_lower(sys.Q);
  const arma::vec x0 = draw_given_chol(L, sys.ell, rng);

  arma::mat Cbar = arma::solve(arma::trimatl(L), C.t());
  arma::mat Ctil = arma::solve(arma::trimatu(L.t()), Cbar);  // Q^{-1} C'
  arma::mat S = C * Ctil;  // C Q^{-1} C'
  S = 0.5 * (S + S.t());
  arma::mat Ls;
  if (!arma::chol(Ls, S, "lower") || arma::rcond(S) < 1e-12) {
    throw NumericalError("constraints redundant: C Q^{-1} C' singular");
  }
  arma::vec w = arma::solve(arma::trimatl(Ls), C * x0);
  arma::vec y = arma::solve(arma::trimatu(Ls.t()), w);
  return x0 - Ctil * y;
}

double slice_sample(const std::function<double(double)>& log_density,
                    double x0, double lo, double hi, double width,
                    RandomStream& rng) {
  if (!(lo < x0 && x0 < hi)) {
    throw InvalidArgument("slice_sample: x0 outside (lo, hi)");
  }
  auto eval = [&](double x) {
    const double f = log_density(x);
    if (std::isnan(f)) {
      throw NumericalError("slice_sample: log density returned NaN at x = " +
                           std::to_string(x));
    }
    return f;
  };
  const double f0 = eval(x0);
  if (!std::isfinite(f0)) {
    throw NumericalError("slice_sample: log density not finite at x0");
  }
  const double logy = f0 - rng.exponential();

  // stepping out
  double left = x0 - width * rng.uniform();
  double right = left + width;
  for (int i = 0; i < 100; ++i) {
    if (left <= lo) {
      left = lo;
      break;
    }
    if (eval(left) <= logy) break;
    left -= width;
  }
  for (int i = 0; i < 100; ++i) {
    if (right >= hi) {
      right = hi;
      break;
    }
    if (eval(right) <= logy) break;
    right += width;
  }
  left = std::max(left, lo);
  right = std::min(right, hi);

  // shrinkage
  for (int i = 0; i < 1000; ++i) {
    const double x1 = left + (right - left) * rng.uniform_open();
    if (eval(x1) >= logy) return x1;
    if (x1 < x0) {
      left = x1;
    } else {
      right = x1;
    }
  }
  return x0;
}

double sample_truncated_gamma(double shape, double rate, double lower,
                              RandomStream& rng) {
  if (!(shape > 0.0) || !(rate > 0.0) || !std::isfinite(shape) ||
      !std::isfinite(rate) || !(lower >= 0.0)) {
    throw InvalidArgument("sample_truncated_gamma: bad parameters");
  }
  if (lower == 0.0) return rng.gamma(shape, rate);
  // work in the upper tail so draws stay >= lower even when the truncation
  // point sits far in the right tail
  const double q0 = boost::math::gamma_q(shape, rate * lower);
  if (q0 < 1e-300) {
    throw NumericalError("sample_truncated_gamma: truncation mass underflow");
  }
  const double q = q0 * rng.uniform_open();
  return boost::math::gamma_q_inv(shape, q) / rate;
}

}  // namespace dfosr
