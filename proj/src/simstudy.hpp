#pragma once

#include <armadillo>
#include <string>
#include <vector>

#include "gibbs.hpp"

namespace dfosr {

enum class SimKind { Dynamic, Static };

// Ground truth of one replicate of the simulation design: K* = 4 orthonormal
// polynomial loadings, p = 15 predictors of which p0 = 10 have identically
// zero coefficient paths, AR(0.8) factor errors, noise set by RSNR = 5.
struct SimTruth {
  arma::vec tau;          // M equally spaced points on [0, 1]
  arma::mat f_star;       // M x 4, orthonormal columns
  arma::cube alpha_star;  // T x p x 4
  arma::vec mu_star;      // 4, entries 1/k
  arma::mat gamma_star;   // 4 x T
  arma::mat X;            // T x p
  arma::mat beta_star;    // 4 x T
  arma::mat Ystar, Y;     // T x M noiseless / noisy
  double sigma_star = 0.0;
  arma::cube surface;     // T x M x p, true regression surfaces

  arma::uword n_times() const { return Y.n_rows; }
  arma::uword n_points() const { return Y.n_cols; }
  arma::uword n_pred() const { return X.n_cols; }

  FunctionalDataset to_dataset() const;
};

SimTruth simulate_design(SimKind kind, arma::uword T, arma::uword M,
                         std::uint64_t seed);

// RMSE of an estimated set of regression surfaces (T x M x p) against truth.
double rmse(const arma::cube& estimate, const SimTruth& truth);
// Posterior-mean surfaces are the estimator for Bayesian fits.
double rmse(const PosteriorDraws& draws, const SimTruth& truth);
arma::cube posterior_mean_surfaces(const PosteriorDraws& draws);

// Mean credible interval width (95% minus 5% posterior quantiles averaged
// over cells) and empirical cell coverage of the central 90% interval.
struct IntervalMetrics {
  double mciw = 0.0;
  double coverage = 0.0;
};
// cell_draws is n_draws x n_cells; truth_cells matches the columns.
IntervalMetrics interval_metrics_from_cells(const arma::mat& cell_draws,
                                            const arma::vec& truth_cells,
                                            double level);
IntervalMetrics mciw_and_coverage(const PosteriorDraws& draws,
                                  const SimTruth& truth, double level = 0.90);

struct StudyRow {
  arma::uword replicate = 0;
  std::string method;
  std::string status = "ok";
  double rmse = arma::datum::nan;
  double mciw = arma::datum::nan;
  double coverage = arma::datum::nan;
  double seconds = 0.0;
  std::uint64_t y_checksum = 0;
};

struct StudyMethod {
  std::string name;
  McmcConfig config;  // seed field is overridden per replicate
};

// Runs n_reps paired replicates (one design draw per replicate shared across
// methods) and collects metrics. Replicates run in parallel, capped by the
// DFOSR_THREADS environment variable; failures are recorded and the study
// continues.
std::vector<StudyRow> run_study(SimKind kind, arma::uword T, arma::uword M,
                                const std::vector<StudyMethod>& methods,
                                arma::uword n_reps, std::uint64_t seed);

void write_study_csv(const std::vector<StudyRow>& rows,
                     const std::string& path);

}  // namespace dfosr
