#include "basis.hpp"

#include <algorithm>
#include <cmath>

#include "errors.hpp"

namespace dfosr {

namespace {

// type-7 sample quantile on sorted values
double sample_quantile(const arma::vec& sorted, double p) {
  const arma::uword n = sorted.n_elem;
  const double h = (static_cast<double>(n) - 1.0) * p;
  const auto i = static_cast<arma::uword>(std::floor(h));
  if (i + 1 >= n) return sorted(n - 1);
  const double frac = h - std::floor(h);
  return sorted(i) + frac * (sorted(i + 1) - sorted(i));
}

}  // namespace

ObservationGrid ObservationGrid::from_points(const std::vector<double>& raw) {
  return from_points(arma::vec(raw));
}

ObservationGrid ObservationGrid::from_points(const arma::vec& raw) {
  if (!raw.is_finite()) {
    throw InvalidArgument("observation points must all be finite");
  }
  arma::vec pts = arma::sort(raw);
  std::vector<double> uniq;
  uniq.reserve(pts.n_elem);
  for (const double v : pts) {
    if (uniq.empty() || v > uniq.back()) uniq.push_back(v);
  }
  if (uniq.size() < 4) {
    throw InvalidArgument("need at least 4 unique observation points, got " +
                          std::to_string(uniq.size()));
  }
  return ObservationGrid{arma::vec(uniq)};
}

arma::vec select_knots(const ObservationGrid& grid) {
  const arma::uword M = grid.size();
  if (M < 4) throw InvalidArgument("invalid grid: fewer than 4 unique points");
  const int D = 1;
  arma::uword n_k;
  if (M <= 25) {
    n_k = M - D - 1;  // full-rank rule capped so L = n_k + D + 1 <= M
  } else {
    n_k = std::min<arma::uword>(M / 4, 150);
  }
  arma::vec knots(n_k);
  for (arma::uword l = 0; l < n_k; ++l) {
    knots(l) = sample_quantile(grid.points,
                               static_cast<double>(l + 1) /
                                   static_cast<double>(n_k + 1));
  }
  return knots;
}

double tps_kernel(double r, int D) {
  if (D != 1) {
    throw InvalidArgument("tps_kernel: only D = 1 is supported");
  }
  if (r < 0.0) throw InvalidArgument("tps_kernel: negative radius");
  return r * r * r;
}

BasisSystem build_basis(const ObservationGrid& grid) {
  return build_basis(grid, select_knots(grid));
}

BasisSystem build_basis(const ObservationGrid& grid, const arma::vec& knots) {
  const int D = 1;
  const arma::uword M = grid.size();
  const arma::uword n_k = knots.n_elem;
  const arma::uword L = n_k + D + 1;
  if (n_k < 1) throw InvalidArgument("build_basis: need at least one knot");
  if (L > M) {
    throw InvalidArgument("build_basis: L = " + std::to_string(L) +
                          " exceeds M = " + std::to_string(M));
  }
  if (!knots.is_sorted("strictascend")) {
    throw InvalidArgument("build_basis: knots must be strictly increasing");
  }
  if (knots.front() < grid.min() || knots.back() > grid.max()) {
    throw InvalidArgument("build_basis: knots outside the grid range");
  }

  BasisSystem sys;
  sys.D = D;
  sys.grid = grid.points;
  sys.knots = knots;
  sys.scale_shift = grid.min();
  sys.scale_range = grid.max() - grid.min();

  // kernel on the [0,1] working scale; raw domain scales condition badly
  const arma::vec s = (grid.points - sys.scale_shift) / sys.scale_range;
  const arma::vec ks = (knots - sys.scale_shift) / sys.scale_range;
  sys.knots_scaled = ks;

  arma::mat W0(M, D + 1);
  W0.col(0).ones();
  W0.col(1) = s;

  arma::mat Z0(M, n_k);
  for (arma::uword j = 0; j < M; ++j) {
    for (arma::uword l = 0; l < n_k; ++l) {
      Z0(j, l) = tps_kernel(std::abs(s(j) - ks(l)), D);
    }
  }
  arma::mat OmZ(n_k, n_k);
  for (arma::uword l = 0; l < n_k; ++l) {
    for (arma::uword m = 0; m <= l; ++m) {
      const double v = tps_kernel(std::abs(ks(l) - ks(m)), D);
      OmZ(l, m) = v;
      OmZ(m, l) = v;
    }
  }

  // Omega_Z0^{-1/2} from the spectral decomposition; singular values are the
  // absolute eigenvalues (the radial kernel matrix is indefinite by itself)
  arma::vec eval;
  arma::mat evec;
  if (!arma::eig_sym(eval, evec, OmZ)) {
    throw NumericalError("build_basis: eigendecomposition failed");
  }
  const arma::vec aeval = arma::abs(eval);
  const double emax = aeval.max();
  if (aeval.min() < 1e-12 * emax) {
    throw NumericalError("build_basis: degenerate knots (near-singular kernel)");
  }
  sys.kernel_transform = evec * arma::diagmat(1.0 / arma::sqrt(aeval));

  arma::mat B0(M, L);
  B0.cols(0, D) = W0;
  B0.cols(D + 1, L - 1) = Z0 * sys.kernel_transform;

  arma::mat Q, R;
  if (!arma::qr_econ(Q, R, B0)) {
    throw NumericalError("build_basis: QR factorization failed");
  }
  // fix signs so diag(R) > 0
  for (arma::uword i = 0; i < L; ++i) {
    if (R(i, i) < 0.0) {
      R.row(i) *= -1.0;
      Q.col(i) *= -1.0;
    }
  }
  const double rmax = arma::abs(R.diag()).max();
  if (arma::abs(R.diag()).min() < 1e-12 * rmax) {
    throw NumericalError("build_basis: initial basis is rank deficient");
  }
  sys.Rinv = arma::solve(arma::trimatu(R), arma::eye(L, L));
  sys.B = Q;

  // Omega = Rinv' diag(0_{D+1}, 1) Rinv, assembled from the penalized rows
  const arma::mat Rz = sys.Rinv.rows(D + 1, L - 1);
  sys.Omega = Rz.t() * Rz;
  sys.Omega = 0.5 * (sys.Omega + sys.Omega.t());
  return sys;
}

arma::vec evaluate_basis(const BasisSystem& sys, double tau_new) {
  const double lo = sys.grid.front();
  const double hi = sys.grid.back();
  const double tol = 1e-12 * (1.0 + std::abs(hi - lo));
  if (tau_new < lo - tol || tau_new > hi + tol) {
    throw InvalidArgument("evaluate_basis: point " + std::to_string(tau_new) +
                          " outside the observed range [" + std::to_string(lo) +
                          ", " + std::to_string(hi) + "]");
  }
  const arma::uword n_k = sys.knots_scaled.n_elem;
  const arma::uword L = sys.dim();
  const double s = (tau_new - sys.scale_shift) / sys.scale_range;

  arma::rowvec b0(L);
  b0(0) = 1.0;
  b0(1) = s;
  arma::rowvec z(n_k);
  for (arma::uword l = 0; l < n_k; ++l) {
    z(l) = tps_kernel(std::abs(s - sys.knots_scaled(l)), sys.D);
  }
  b0.cols(sys.D + 1, L - 1) = z * sys.kernel_transform;
  return (b0 * sys.Rinv).t();
}

arma::mat evaluate_basis(const BasisSystem& sys, const arma::vec& tau_new) {
  arma::mat out(tau_new.n_elem, sys.dim());
  for (arma::uword i = 0; i < tau_new.n_elem; ++i) {
    out.row(i) = evaluate_basis(sys, tau_new(i)).t();
  }
  return out;
}

}  // namespace dfosr
