#pragma once

#include <armadillo>
#include <string>

#include "gibbs.hpp"

namespace dfosr {

// Posterior band for one curve: pointwise quantile interval plus the
// simultaneous band from the max standardized deviation statistic. The
// simultaneous band contains the pointwise band at every point.
struct BandSummary {
  arma::vec mean;
  arma::vec pw_lo, pw_hi;
  arma::vec sim_lo, sim_hi;
};

// curve_draws is n_draws x M (each row one draw of the curve); level is the
// band probability, e.g. 0.95. Requires at least 100 draws.
BandSummary simultaneous_band(const arma::mat& curve_draws, double level);

// type-7 quantile of a column vector
double quantile(const arma::vec& sorted_values, double p);
arma::vec quantiles(arma::vec values, const arma::vec& ps);

struct SummaryOptions {
  double band_level = 0.95;
  arma::uword grid_points = 0;  // > M: also evaluate on a dense tau grid
};

// Writes tidy CSVs (alpha_surface, fitted, loadings, sigma_eps, imputed, and
// dense-grid variants when requested) plus a JSON run manifest into out_dir.
void write_summaries(const PosteriorDraws& draws, const std::string& out_dir,
                     const SummaryOptions& options);

}  // namespace dfosr
