#pragma once

#include <armadillo>
#include <vector>

namespace dfosr {

// Sorted unique observation locations of a univariate functional domain.
struct ObservationGrid {
  arma::vec points;  // strictly increasing, M >= 4, all finite

  // Sorts, collapses duplicates and validates the raw locations.
  static ObservationGrid from_points(const std::vector<double>& raw);
  static ObservationGrid from_points(const arma::vec& raw);

  arma::uword size() const { return points.n_elem; }
  double min() const { return points.front(); }
  double max() const { return points.back(); }
};

// Orthonormalized low-rank thin-plate-spline basis with its roughness
// penalty. B has orthonormal columns; Omega is PSD with a two-dimensional
// null space spanned by the affine functions of tau.
struct BasisSystem {
  arma::mat B;      // M x L, B'B = I_L
  arma::mat Omega;  // L x L, symmetric PSD, rank L - 2
  arma::vec knots;  // knot locations, domain units
  arma::mat Rinv;   // L x L upper-triangular inverse from the QR step
  int D = 1;

  // evaluation support for new points
  arma::vec grid;              // observation points, domain units
  double scale_shift = 0.0;    // tau_scaled = (tau - shift) / range
  double scale_range = 1.0;
  arma::vec knots_scaled;      // knots on the [0,1] working scale
  arma::mat kernel_transform;  // n_knots x n_knots, Omega_Z0^{-1/2}

  arma::uword n_obs() const { return B.n_rows; }
  arma::uword dim() const { return B.n_cols; }
};

// Knot rule: M <= 25 uses M - D - 1 interior quantile knots (so L <= M);
// M > 25 uses min{floor(M/4), 150} knots at the l/(n_k+1) sample quantiles
// of the unique points.
arma::vec select_knots(const ObservationGrid& grid);

// Cubic thin-plate radial function, r^3 for D = 1 (the only supported D).
double tps_kernel(double r, int D);

BasisSystem build_basis(const ObservationGrid& grid, const arma::vec& knots);
BasisSystem build_basis(const ObservationGrid& grid);

// Basis row at a new location inside the observed range; equals the matching
// row of B at an observed point.
arma::vec evaluate_basis(const BasisSystem& sys, double tau_new);
arma::mat evaluate_basis(const BasisSystem& sys, const arma::vec& tau_new);

}  // namespace dfosr
